#include <doctest.h>

#include "fopforge/fologic.hpp"
#include "fopforge/reductions.hpp"
#include "test_helpers.hpp"

using namespace fopforge;
using fftest::naive_eval;

namespace {

const Vocabulary kSatVocab{{{"P", 2}, {"N", 2}}, {}};
const Vocabulary kSsVocab{{{"W", 2}, {"L", 1}}, {}};

Structure plain(Elem m) {
    Structure s;
    s.size = m;
    s.base = m;
    return s;
}

}  // namespace

TEST_CASE("parser produces the expected atoms") {
    FormulaPtr f = parse_formula("SUC(x4,max)", kSatVocab);
    REQUIRE(f->kind == Formula::Kind::NumericAtom);
    CHECK(f->pred == NumPred::Suc);
    CHECK(f->terms[0] == t_var("x4"));
    CHECK(f->terms[1] == t_max());

    FormulaPtr g = parse_formula("P(x2,w2)", kSatVocab);
    REQUIRE(g->kind == Formula::Kind::InputAtom);
    CHECK(g->rel == "P");

    CHECK_THROWS_AS(parse_formula("P(x1)", kSatVocab), ParseError);
    CHECK_THROWS_AS(parse_formula("Q(x1,x2)", kSatVocab), ParseError);
    CHECK_THROWS_AS(parse_formula("SUC(x1,x2,x3)", kSatVocab), ParseError);
    CHECK_THROWS_AS(parse_formula("x1 =", kSatVocab), ParseError);
    CHECK_THROWS_AS(parse_formula("x1 = 0 extra", kSatVocab), ParseError);
}

TEST_CASE("operator precedence and quantifier scope") {
    // & binds tighter than |
    FormulaPtr f = parse_formula("x=0 & y=0 | z=0", kSatVocab);
    REQUIRE(f->kind == Formula::Kind::Or);
    CHECK(f->lhs->kind == Formula::Kind::And);

    // quantifier scope extends maximally
    FormulaPtr g = parse_formula("E x . x=0 | x=1", kSatVocab);
    REQUIRE(g->kind == Formula::Kind::Exists);
    CHECK(g->body->kind == Formula::Kind::Or);
    CHECK(eval(g, plain(5)));

    CHECK_THROWS_AS(parse_formula("E x . E x . x=0", kSatVocab), ParseError);
    CHECK_THROWS_AS(parse_formula("E _n1 . _n1=0", kSatVocab), ParseError);
}

TEST_CASE("numeric literal sugar expands to successor chains") {
    FormulaPtr two = parse_formula("w2=2", kSatVocab);
    REQUIRE(two->kind == Formula::Kind::NumericAtom);
    CHECK(two->pred == NumPred::Suc);
    CHECK(two->terms[0] == t_one());

    FormulaPtr three = parse_formula("w2=3", kSatVocab);
    REQUIRE(three->kind == Formula::Kind::Exists);
    CHECK(print_formula(three) == "w2=3");

    // semantics: w2=N holds exactly at N
    for (long long n : {0ll, 1ll, 2ll, 3ll, 4ll, 9ll}) {
        FormulaPtr f = parse_formula("v=" + std::to_string(n), kSatVocab);
        for (Elem v = 0; v < 16; ++v) {
            Env env{{"v", v}};
            CHECK(eval(f, plain(16), env) == (v == n));
        }
    }
    // at sizes too small for the chain the formula is plain false
    FormulaPtr four = parse_formula("v=4", kSatVocab);
    for (Elem v = 0; v < 3; ++v) {
        Env env{{"v", v}};
        CHECK_FALSE(eval(four, plain(3), env));
    }
}

TEST_CASE("print then parse is the identity on ASTs") {
    for (const auto* def : builtin_defs()) {
        for (const auto& [rel, of] : def->rel_formulas) {
            FormulaPtr reparsed = parse_formula(print_formula(of.formula), def->input_vocab);
            CHECK(formula_equal(reparsed, of.formula));
        }
    }
    fftest::FormulaGen gen(2024);
    Vocabulary vocab = kSatVocab;
    for (int i = 0; i < 300; ++i) {
        FormulaPtr f = gen.gen(3);
        FormulaPtr g = parse_formula(print_formula(f), vocab);
        CHECK(formula_equal(f, g));
    }
}

TEST_CASE("parse then print is the identity up to whitespace on the fixtures") {
    auto strip = [](std::string s) {
        std::string out;
        for (char c : s)
            if (!std::isspace((unsigned char)c)) out += c;
        return out;
    };
    for (const char* name : {"rho1", "rho2"}) {
        const ReductionDef& def = *find_builtin(name);
        for (const auto& [key, text] : builtin_formula_texts(name)) {
            const Vocabulary& vocab = def.input_vocab;
            CHECK(strip(print_formula(parse_formula(text, vocab))) == strip(text));
        }
    }
}

TEST_CASE("eval agrees with an independent truth-table evaluator") {
    std::mt19937_64 rng(99);
    fftest::FormulaGen gen(31337);
    for (int trial = 0; trial < 200; ++trial) {
        Elem m = 2 + (Elem)(rng() % 3);
        Structure s = fftest::random_pn_structure(rng, m);
        FormulaPtr f = gen.gen(3);
        for (Elem a = 0; a < m; ++a)
            for (Elem b = 0; b < m; ++b) {
                Env env{{"a", a}, {"b", b}};
                std::map<std::string, Elem> naive_env{{"a", a}, {"b", b}};
                REQUIRE(eval(f, s, env) == naive_eval(f, s, naive_env));
            }
    }
}

TEST_CASE("inner quantifier bindings shadow outer ones") {
    // the parser rejects shadowing, but programmatic ASTs may carry it
    FormulaPtr inner = mk_exists("x", mk_num(NumPred::Eq, {t_var("x"), t_zero()}));
    FormulaPtr outer = mk_exists(
        "x", mk_and(mk_num(NumPred::Eq, {t_var("x"), t_one()}), inner));
    Structure s;
    s.size = 3;
    s.base = 3;
    CHECK(eval(outer, s));
    std::map<std::string, Elem> env;
    CHECK(fftest::naive_eval(outer, s, env));
}

TEST_CASE("eval reports unbound variables") {
    FormulaPtr f = parse_formula("x=0", kSatVocab);
    CHECK_THROWS_AS(eval(f, plain(4)), EvalError);
}

TEST_CASE("trivial sentence") {
    CHECK(eval(parse_formula("0=0", kSatVocab), plain(2)));
}

TEST_CASE("half-split formulas partition the universe") {
    // left:  k <= (n-2)/2 or k < (n-1)/2, whichever fraction is integral
    const std::string left =
        "(E t1 . E t2 . SUC(t1,max) & PLUS(t2,t2,t1) & w1<=t2) | "
        "(E t2 . PLUS(t2,t2,max) & w1<t2)";
    const std::string right =
        "(E t1 . E t2 . SUC(t1,max) & PLUS(t2,t2,t1) & t2<w1) | "
        "(E t2 . PLUS(t2,t2,max) & t2<=w1)";
    FormulaPtr fl = parse_formula(left, kSsVocab);
    FormulaPtr fr = parse_formula(right, kSsVocab);

    auto left_oracle = [](Elem w, Elem m) {
        for (Elem t1 = 0; t1 < m; ++t1)
            for (Elem t2 = 0; t2 < m; ++t2)
                if (t1 + 1 == m - 1 && t2 + t2 == t1 && w <= t2) return true;
        for (Elem t2 = 0; t2 < m; ++t2)
            if (t2 + t2 == m - 1 && w < t2) return true;
        return false;
    };

    Structure s16 = plain(16);
    Env env{{"w1", 7}};
    CHECK(eval(fl, s16, env));
    env[0].second = 8;
    CHECK_FALSE(eval(fl, s16, env));
    CHECK(eval(fr, s16, env));

    for (Elem m : {16, 17, 80, 81}) {
        Structure s = plain(m);
        for (Elem w = 0; w < m; ++w) {
            Env e{{"w1", w}};
            bool l = eval(fl, s, e), r = eval(fr, s, e);
            CHECK(l == left_oracle(w, m));
            CHECK(l != r);  // mutually exclusive and jointly exhaustive
        }
    }
}

TEST_CASE("is_numeric") {
    CHECK(is_numeric(rho1_def().rel_formulas.at("L").formula));
    CHECK_FALSE(is_numeric(rho1_def().rel_formulas.at("W").formula));
    CHECK(is_numeric(mk_true()));
    CHECK_FALSE(is_numeric(parse_formula("E x . P(x,x)", kSatVocab)));
}

TEST_CASE("classify_projection on the built-ins") {
    ProjectionForm w = classify_projection(rho1_def().rel_formulas.at("W").formula);
    CHECK(w.alpha0.size() == 4);
    REQUIRE(w.guarded.size() == 2);
    CHECK(w.guarded[0].literal.rel == "P");
    CHECK(w.guarded[0].literal.positive);
    CHECK(w.guarded[0].literal.terms == std::vector<Term>{t_var("x2"), t_var("w2")});
    CHECK(w.guarded[1].literal.rel == "N");

    ProjectionForm l = classify_projection(rho1_def().rel_formulas.at("L").formula);
    CHECK(l.alpha0.size() == 3);
    CHECK(l.guarded.empty());

    ProjectionForm t = classify_projection(rho2_def().rel_formulas.at("T").formula);
    CHECK(t.alpha0.empty());
    REQUIRE(t.guarded.size() == 9);
    CHECK(t.guarded[0].literal.terms == std::vector<Term>{t_var("x1"), t_var("w1")});
    for (std::size_t i = 1; i < 9; ++i) {
        CHECK(t.guarded[i].literal.rel == "W");
        CHECK(t.guarded[i].literal.terms == std::vector<Term>{t_var("w1"), t_var("w1")});
    }
}

TEST_CASE("classify_projection rejects non-projective shapes") {
    CHECK_THROWS_AS(classify_projection(parse_formula("P(x,y) & N(x,y)", kSatVocab)),
                    NotProjectiveError);
    CHECK_THROWS_AS(classify_projection(parse_formula("E x . P(x,y)", kSatVocab)),
                    NotProjectiveError);
    CHECK_THROWS_AS(classify_projection(parse_formula("x=0 & !(!P(x,x))", kSatVocab)),
                    NotProjectiveError);
    // negated literals are fine
    ProjectionForm f = classify_projection(parse_formula("x=0 & !P(x,x)", kSatVocab));
    REQUIRE(f.guarded.size() == 1);
    CHECK_FALSE(f.guarded[0].literal.positive);
}

TEST_CASE("accepted projection forms only ever carry numeric guards") {
    fftest::FormulaGen gen(404);
    int accepted = 0;
    for (int i = 0; i < 400; ++i) {
        FormulaPtr f = gen.gen(3);
        ProjectionForm form;
        try {
            form = classify_projection(f);
        } catch (const NotProjectiveError&) {
            continue;
        }
        ++accepted;
        for (const auto& g : form.all_guards()) CHECK(is_numeric(g));
        for (const auto& g : form.guarded) CHECK(is_numeric(g.alpha));
    }
    CHECK(accepted > 0);
}

TEST_CASE("mutual exclusion of the built-in guards") {
    ProjectionForm w = classify_projection(rho1_def().rel_formulas.at("W").formula);
    auto res = check_mutual_exclusion(w, 2);
    CHECK(res.ok());
    CHECK(res.assignments_checked == 256);  // 2^8 assignments
    CHECK(check_mutual_exclusion(w, 3).ok());

    ProjectionForm t = classify_projection(rho2_def().rel_formulas.at("T").formula);
    auto res16 = check_mutual_exclusion(t, 16);
    CHECK(res16.ok());
    CHECK(res16.assignments_checked == 65536);  // 16^4 assignments
}

TEST_CASE("identical guards produce a counterexample") {
    ProjectionForm p;
    p.alpha0 = {parse_formula("x=0", kSatVocab), parse_formula("x=0", kSatVocab)};
    auto res = check_mutual_exclusion(p, 4);
    REQUIRE(res.status == ExclusionResult::Status::Counterexample);
    CHECK(res.assignment.at("x") == 0);
    CHECK(res.guard_i == 0);
    CHECK(res.guard_j == 1);
}

TEST_CASE("exclusion budget produces an explicit undecided result") {
    ProjectionForm t = classify_projection(rho2_def().rel_formulas.at("T").formula);
    auto res = check_mutual_exclusion(t, 16, /*budget=*/1000);
    CHECK(res.status == ExclusionResult::Status::Undecided);
}

TEST_CASE("pruned exclusion walk matches a flat reference scan") {
    std::mt19937_64 rng(5150);
    fftest::FormulaGen gen(777);
    Structure dummy = plain(4);
    for (int trial = 0; trial < 120; ++trial) {
        // random numeric-only guards over free vars {a,b}
        std::vector<FormulaPtr> guards;
        int count = 2 + (int)(rng() % 3);
        for (int g = 0; g < count; ++g) {
            FormulaPtr f;
            do {
                f = gen.gen(2);
            } while (!is_numeric(f));
            guards.push_back(f);
        }
        ProjectionForm p;
        p.alpha0 = guards;
        std::set<std::string> used;
        for (const auto& g : guards)
            for (const auto& v : free_vars(g)) used.insert(v);

        // flat reference: first assignment satisfying two distinct guards
        bool ref_found = false;
        Elem ra = 0, rb = 0;
        for (Elem a = 0; a < 4 && !ref_found; ++a)
            for (Elem b = 0; b < 4 && !ref_found; ++b) {
                if (!used.count("a") && a > 0) break;
                int hits = 0;
                for (const auto& g : guards) {
                    std::map<std::string, Elem> env{{"a", a}, {"b", b}};
                    if (naive_eval(g, dummy, env)) ++hits;
                }
                if (hits >= 2) {
                    ref_found = true;
                    ra = a;
                    rb = b;
                }
            }

        auto res = check_mutual_exclusion(p, 4);
        if (ref_found) {
            REQUIRE(res.status == ExclusionResult::Status::Counterexample);
            if (used.count("a")) CHECK(res.assignment.at("a") == ra);
            if (used.count("b")) CHECK(res.assignment.at("b") == rb);
        } else {
            CHECK(res.ok());
        }
    }
}

TEST_CASE("exclusion result is identical across thread counts") {
    ProjectionForm p;
    p.alpha0 = {parse_formula("x=2 & y=3", kSatVocab), parse_formula("x=2 & 0=0 & y=3", kSatVocab)};
    auto one = check_mutual_exclusion(p, 6, kDefaultExclusionBudget, 1);
    auto four = check_mutual_exclusion(p, 6, kDefaultExclusionBudget, 4);
    REQUIRE(one.status == ExclusionResult::Status::Counterexample);
    CHECK(four.status == one.status);
    CHECK(four.assignment == one.assignment);
    CHECK(four.guard_i == one.guard_i);
    CHECK(four.guard_j == one.guard_j);
}

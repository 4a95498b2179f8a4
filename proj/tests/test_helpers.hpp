#ifndef FOPFORGE_TEST_HELPERS_HPP
#define FOPFORGE_TEST_HELPERS_HPP

#include <map>
#include <random>
#include <string>
#include <vector>

#include "fopforge/fologic.hpp"
#include "fopforge/problems.hpp"
#include "fopforge/structures.hpp"

namespace fftest {

using namespace fopforge;

// ---------------------------------------------------------------------------
// Independent truth-table evaluator: map-based environments, numeric
// predicate semantics re-derived inline. Deliberately shares nothing with
// eval() beyond the AST type.
// ---------------------------------------------------------------------------

inline Elem naive_term(const Term& t, const std::map<std::string, Elem>& env, Elem m) {
    switch (t.kind) {
        case Term::Kind::Zero: return 0;
        case Term::Kind::One: return 1;
        case Term::Kind::Max: return m - 1;
        case Term::Kind::Var: return env.at(t.name);
    }
    return -1;
}

inline bool naive_eval(const FormulaPtr& f, const Structure& s,
                       std::map<std::string, Elem> env) {
    switch (f->kind) {
        case Formula::Kind::True: return true;
        case Formula::Kind::False: return false;
        case Formula::Kind::InputAtom: {
            Tuple t;
            for (const auto& term : f->terms) t.push_back(naive_term(term, env, s.size));
            return s.relation(f->rel).count(t) > 0;
        }
        case Formula::Kind::NumericAtom: {
            std::vector<Elem> a;
            for (const auto& term : f->terms) a.push_back(naive_term(term, env, s.size));
            switch (f->pred) {
                case NumPred::Eq: return a[0] == a[1];
                case NumPred::Le: return a[0] <= a[1];
                case NumPred::Lt: return a[0] < a[1];
                case NumPred::Suc: return a[0] + 1 == a[1];
                case NumPred::Plus: return a[0] + a[1] == a[2];
                case NumPred::Times: return a[0] * a[1] == a[2];
            }
            return false;
        }
        case Formula::Kind::Not: return !naive_eval(f->lhs, s, env);
        case Formula::Kind::And: return naive_eval(f->lhs, s, env) && naive_eval(f->rhs, s, env);
        case Formula::Kind::Or: return naive_eval(f->lhs, s, env) || naive_eval(f->rhs, s, env);
        case Formula::Kind::Exists: {
            for (Elem v = 0; v < s.size; ++v) {
                auto e2 = env;
                e2[f->var] = v;
                if (naive_eval(f->body, s, e2)) return true;
            }
            return false;
        }
        case Formula::Kind::ForAll: {
            for (Elem v = 0; v < s.size; ++v) {
                auto e2 = env;
                e2[f->var] = v;
                if (!naive_eval(f->body, s, e2)) return false;
            }
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Random formula generator over <P^2, N^2> with free variables from {a, b}.
// ---------------------------------------------------------------------------

class FormulaGen {
public:
    explicit FormulaGen(std::uint64_t seed) : rng_(seed) {}

    FormulaPtr gen(int depth) {
        switch (pick(depth > 0 ? 8 : 3)) {
            case 0: return mk_num(NumPred::Eq, {term(), term()});
            case 1: return mk_input(pick(2) ? "P" : "N", {term(), term()});
            case 2:
                return pick(2) ? mk_num(NumPred::Le, {term(), term()})
                               : mk_num(NumPred::Suc, {term(), term()});
            case 3: return mk_not(gen(depth - 1));
            case 4: return mk_and(gen(depth - 1), gen(depth - 1));
            case 5: return mk_or(gen(depth - 1), gen(depth - 1));
            case 6: return mk_num(NumPred::Plus, {term(), term(), term()});
            default: {
                std::string v = "q" + std::to_string(quant_++);
                return pick(2) ? mk_exists(v, gen_with(v, depth - 1))
                               : mk_forall(v, gen_with(v, depth - 1));
            }
        }
    }

private:
    FormulaPtr gen_with(const std::string& v, int depth) {
        scope_.push_back(v);
        FormulaPtr f = gen(depth);
        scope_.pop_back();
        return f;
    }

    Term term() {
        switch (pick(4)) {
            case 0: return t_zero();
            case 1: return t_max();
            case 2:
                if (!scope_.empty()) return t_var(scope_[pick((int)scope_.size())]);
                [[fallthrough]];
            default: return t_var(pick(2) ? "a" : "b");
        }
    }

    int pick(int n) { return (int)(rng_() % (std::uint64_t)n); }

    std::mt19937_64 rng_;
    std::vector<std::string> scope_;
    int quant_ = 0;
};

inline Structure random_pn_structure(std::mt19937_64& rng, Elem m) {
    std::map<std::string, std::set<Tuple>> rels;
    for (const char* name : {"P", "N"})
        for (Elem i = 0; i < m; ++i)
            for (Elem j = 0; j < m; ++j)
                if (rng() % 3 == 0) rels[name].insert(Tuple{i, j});
    return make_structure(Vocabulary{{{"P", 2}, {"N", 2}}, {}}, m, std::move(rels));
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

// I2: clauses c0 = {x0, !x0, x1}, c1 = {x0, x1, !x1} over 2 variables.
inline Cnf3Instance i2_instance() {
    Cnf3Instance c;
    c.n = 2;
    c.clauses = {{{0, false}, {0, true}, {1, false}},
                 {{0, false}, {1, false}, {1, true}}};
    return c;
}

inline const char* i2_dimacs() { return "c I2\np cnf 2 2\n1 -1 2 0\n1 2 -2 0\n"; }

// Target of a rho1 image computed from the tag positions alone.
inline BigNat tag_target(Elem n) {
    const Elem m = n * n * n * n;
    auto bit = [&](Elem col) { return BigNat(1) << (unsigned)(m - 1 - col); };
    BigNat t = 0;
    for (Elem j = 0; j < n; ++j) {
        Elem var_col = j * n * n + n + (n - 1);
        t += bit(var_col);
    }
    for (Elem i = 0; i < n; ++i) {
        Elem clause_col = (n - 1) * n * n * n + i * n * n + n + (n - 1);
        t += bit(clause_col) + bit(clause_col - 1);
    }
    return t;
}

}  // namespace fftest

#endif

#include "fopforge/reductions.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace fopforge {

namespace {

bool vocab_compatible(const Vocabulary& a, const Vocabulary& b) {
    std::map<std::string, int> ra, rb;
    for (const auto& [n, k] : a.relations) ra[n] = k;
    for (const auto& [n, k] : b.relations) rb[n] = k;
    return ra == rb && std::set<std::string>(a.constants.begin(), a.constants.end()) ==
                           std::set<std::string>(b.constants.begin(), b.constants.end());
}

}  // namespace

std::vector<std::string> output_params(int arity_k, int output_arity) {
    std::vector<std::string> out;
    auto block = [&](const char* letter) {
        for (int i = 1; i <= arity_k; ++i) out.push_back(std::string(letter) + std::to_string(i));
    };
    if (output_arity == 1) {
        block("w");
    } else if (output_arity == 2) {
        block("x");
        block("w");
    } else {
        throw DefinitionError("output relations of arity > 2 are not supported");
    }
    return out;
}

ReductionDef make_reduction_def(std::string name, int arity, Vocabulary input_vocab,
                                Vocabulary output_vocab, const std::string& phi0_text,
                                const std::map<std::string, std::string>& rel_texts,
                                const std::map<std::string, std::string>& const_texts,
                                Elem min_input_size) {
    if (arity < 1) throw DefinitionError("reduction arity must be >= 1");
    for (const auto& v : {validate_vocabulary(input_vocab), validate_vocabulary(output_vocab)})
        if (!v.empty()) throw DefinitionError("bad vocabulary: " + v.front());

    ReductionDef def;
    def.name = std::move(name);
    def.arity = arity;
    def.input_vocab = std::move(input_vocab);
    def.output_vocab = std::move(output_vocab);
    def.min_input_size = min_input_size;
    def.phi0 = parse_formula(phi0_text, def.input_vocab);
    if (!is_numeric(def.phi0))
        throw DefinitionError("phi0 must be a numeric formula");

    auto check_params = [&](const FormulaPtr& f, const std::vector<std::string>& params,
                            const std::string& what) {
        std::set<std::string> allowed(params.begin(), params.end());
        for (const auto& v : free_vars(f))
            if (!allowed.count(v))
                throw DefinitionError(what + ": unexpected free variable " + v);
    };
    check_params(def.phi0, output_params(arity, 1), "phi0");

    for (const auto& [rel, a] : def.output_vocab.relations) {
        auto it = rel_texts.find(rel);
        if (it == rel_texts.end())
            throw DefinitionError("missing formula for output relation " + rel);
        OutputFormula of;
        of.params = output_params(arity, a);
        of.formula = parse_formula(it->second, def.input_vocab);
        check_params(of.formula, of.params, "formula for " + rel);
        def.rel_formulas[rel] = std::move(of);
    }
    if (rel_texts.size() != def.rel_formulas.size())
        throw DefinitionError("formula given for a relation not in the output vocabulary");

    for (const auto& c : def.output_vocab.constants) {
        auto it = const_texts.find(c);
        if (it == const_texts.end())
            throw DefinitionError("missing formula for output constant " + c);
        OutputFormula of;
        of.params = output_params(arity, 1);
        of.formula = parse_formula(it->second, def.input_vocab);
        check_params(of.formula, of.params, "formula for constant " + c);
        def.const_formulas[c] = std::move(of);
    }
    if (const_texts.size() != def.const_formulas.size())
        throw DefinitionError("formula given for a constant not in the output vocabulary");
    return def;
}

bool reduction_def_equal(const ReductionDef& a, const ReductionDef& b) {
    if (a.name != b.name || a.arity != b.arity || a.min_input_size != b.min_input_size)
        return false;
    if (!vocab_compatible(a.input_vocab, b.input_vocab) ||
        !vocab_compatible(a.output_vocab, b.output_vocab))
        return false;
    if (!formula_equal(a.phi0, b.phi0)) return false;
    auto same = [](const std::map<std::string, OutputFormula>& x,
                   const std::map<std::string, OutputFormula>& y) {
        if (x.size() != y.size()) return false;
        for (const auto& [k, v] : x) {
            auto it = y.find(k);
            if (it == y.end() || v.params != it->second.params ||
                !formula_equal(v.formula, it->second.formula))
                return false;
        }
        return true;
    };
    return same(a.rel_formulas, b.rel_formulas) && same(a.const_formulas, b.const_formulas);
}

// ---------------------------------------------------------------------------
// Built-in definitions
// ---------------------------------------------------------------------------

namespace {

const char* kBetaLeft =
    "((E t1 . E t2 . SUC(t1,max) & PLUS(t2,t2,t1) & w1<=t2) | "
    "(E t2 . PLUS(t2,t2,max) & w1<t2))";
const char* kBetaRight =
    "((E t1 . E t2 . SUC(t1,max) & PLUS(t2,t2,t1) & t2<w1) | "
    "(E t2 . PLUS(t2,t2,max) & t2<=w1))";

std::string rho1_w_text() {
    return
        "(x1=0 & x3=1 & SUC(x4,max) & w1=0 & w2=x2 & w3=1 & w4=max) | "
        "(x1=0 & x3=1 & x4=max & w1=0 & w2=x2 & w3=1 & w4=max) | "
        "(x1=max & x3=1 & SUC(x4,max) & w1=max & w2=x2 & w3=1 & w4=max) | "
        "(x1=max & x3=1 & x4=max & w1=max & w2=x2 & w3=1 & w4=max) | "
        "(x1=0 & x3=1 & SUC(x4,max) & w1=max & w3=1 & w4=max & P(x2,w2)) | "
        "(x1=0 & x3=1 & x4=max & w1=max & w3=1 & w4=max & N(x2,w2))";
}

std::string rho1_l_text() {
    return
        "(w1=0 & w3=1 & w4=max) | "
        "(w1=max & w3=1 & w4=max) | "
        "(w1=max & w3=1 & SUC(w4,max))";
}

std::string rho2_t_text() {
    std::string bl = kBetaLeft, br = kBetaRight;
    return
        "(x2=0 & w2=4 & W(x1,w1)) | "
        "(x1=0 & x2=1 & w2=4 & " + bl + " & W(w1,w1)) | "
        "(x1=0 & x2=1 & w2=3 & " + bl + " & W(w1,w1)) | "
        "(x1=0 & x2=1 & w2=4 & " + br + " & W(w1,w1)) | "
        "(x1=0 & x2=1 & w2=3 & " + br + " & W(w1,w1)) | "
        "(x1=0 & x2=1 & w2=2 & " + br + " & W(w1,w1)) | "
        "(x1=1 & x2=1 & w2=4 & " + bl + " & W(w1,w1)) | "
        "(x1=1 & x2=1 & w2=3 & " + bl + " & W(w1,w1)) | "
        "(x1=1 & x2=1 & w2=1 & " + br + " & W(w1,w1))";
}

Vocabulary sat_vocab() { return Vocabulary{{{"P", 2}, {"N", 2}}, {}}; }
Vocabulary subsetsum_vocab() { return Vocabulary{{{"W", 2}, {"L", 1}}, {}}; }
Vocabulary partition_vocab() { return Vocabulary{{{"T", 2}}, {}}; }

}  // namespace

std::map<std::string, std::string> builtin_formula_texts(std::string_view name) {
    if (name == "rho1")
        return {{"phi0", "true"}, {"W", rho1_w_text()}, {"L", rho1_l_text()}};
    if (name == "rho2") return {{"phi0", "true"}, {"T", rho2_t_text()}};
    throw DomainError("unknown builtin " + std::string(name));
}

const ReductionDef& rho1_def() {
    static const ReductionDef def = make_reduction_def(
        "rho1", 4, sat_vocab(), subsetsum_vocab(), "true",
        {{"W", rho1_w_text()}, {"L", rho1_l_text()}});
    return def;
}

const ReductionDef& rho2_def() {
    // The numerals 2,3,4 in the formulas need those universe elements to
    // exist; rho1 images always have size >= 2^4.
    static const ReductionDef def = make_reduction_def(
        "rho2", 2, subsetsum_vocab(), partition_vocab(), "true", {{"T", rho2_t_text()}}, {},
        /*min_input_size=*/16);
    return def;
}

std::vector<const ReductionDef*> builtin_defs() { return {&rho1_def(), &rho2_def()}; }

const ReductionDef* find_builtin(std::string_view name) {
    for (const ReductionDef* d : builtin_defs())
        if (d->name == name) return d;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Application
// ---------------------------------------------------------------------------

namespace {

// Depth-first enumeration of the satisfying assignments of a conjunction of
// numeric parts over `params`, with each conjunct checked as soon as the
// last of its parameters is bound. Non-conjunctive pieces (the beta
// disjunctions, quantified sugar) are treated as opaque conjuncts.
class GuardSolver {
public:
    GuardSolver(const FormulaPtr& alpha, const std::vector<std::string>& params,
                const std::map<std::string, Elem>& pre_bound, const Structure& s)
        : s_(s) {
        std::vector<FormulaPtr> conjuncts;
        std::function<void(const FormulaPtr&)> flat = [&](const FormulaPtr& f) {
            if (f->kind == Formula::Kind::And) {
                flat(f->lhs);
                flat(f->rhs);
            } else {
                conjuncts.push_back(f);
            }
        };
        flat(alpha);
        for (const auto& p : params)
            if (!pre_bound.count(p)) unbound_.push_back(p);
        buckets_.resize(unbound_.size() + 1);
        for (const auto& c : conjuncts) {
            int level = -1;
            for (const auto& v : free_vars(c)) {
                auto it = std::find(unbound_.begin(), unbound_.end(), v);
                if (it != unbound_.end())
                    level = std::max(level, (int)(it - unbound_.begin()));
            }
            buckets_[level + 1].push_back(c);
        }
        for (const auto& [name, value] : pre_bound) env_.emplace_back(name, value);
    }

    // Calls fn with a name->value map covering all params each time the
    // conjunction is satisfied.
    void solve(const std::function<void(const Env&)>& fn) {
        for (const auto& c : buckets_[0])
            if (!eval(c, s_, env_)) return;
        dfs(0, fn);
    }

private:
    void dfs(std::size_t depth, const std::function<void(const Env&)>& fn) {
        if (depth == unbound_.size()) {
            fn(env_);
            return;
        }
        for (Elem v = 0; v < s_.size; ++v) {
            env_.emplace_back(unbound_[depth], v);
            bool ok = true;
            for (const auto& c : buckets_[depth + 1])
                if (!eval(c, s_, env_)) {
                    ok = false;
                    break;
                }
            if (ok) dfs(depth + 1, fn);
            env_.pop_back();
        }
    }

    const Structure& s_;
    std::vector<std::string> unbound_;
    std::vector<std::vector<FormulaPtr>> buckets_;
    Env env_;
};

Elem env_lookup(const Env& env, std::string_view name) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == name) return it->second;
    throw ConsistencyError("guard solution missing parameter " + std::string(name));
}

// Resolves an output atom (one rank per k-block) from a full assignment.
Tuple atom_from_env(const Env& env, const std::vector<std::string>& params, int k, Elem m) {
    Tuple out;
    Tuple block((std::size_t)k);
    for (std::size_t p = 0; p + k <= params.size(); p += k) {
        for (int i = 0; i < k; ++i) block[i] = env_lookup(env, params[p + i]);
        out.push_back(tuple_rank(block, m));
    }
    return out;
}

// Binds a literal's terms against a concrete relation tuple; nullopt when a
// constant term or repeated variable disagrees.
std::optional<std::map<std::string, Elem>> bind_literal(const std::vector<Term>& terms,
                                                        const Tuple& tup, Elem m) {
    std::map<std::string, Elem> bound;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const Term& t = terms[i];
        if (t.kind == Term::Kind::Var) {
            auto [it, fresh] = bound.emplace(t.name, tup[i]);
            if (!fresh && it->second != tup[i]) return std::nullopt;
        } else {
            Elem want = t.kind == Term::Kind::Zero ? 0 : t.kind == Term::Kind::One ? 1 : m - 1;
            if (tup[i] != want) return std::nullopt;
        }
    }
    return bound;
}

void for_each_tuple(Elem m, int arity, const std::function<void(const Tuple&)>& fn) {
    Tuple t((std::size_t)arity, 0);
    while (true) {
        fn(t);
        int i = arity - 1;
        while (i >= 0 && ++t[i] == m) t[i--] = 0;
        if (i < 0) break;
    }
}

std::set<Tuple> materialize_naive(const OutputFormula& of, const Structure& s, int k, Elem out_size) {
    std::set<Tuple> result;
    int out_arity = (int)(of.params.size() / k);
    double space = 1;
    for (int i = 0; i < out_arity; ++i) space *= (double)out_size;
    if (space > 5e8) throw BudgetError("naive scan too large for this size");
    Env env;
    for (const auto& p : of.params) env.emplace_back(p, 0);
    Tuple atom((std::size_t)out_arity, 0);
    std::function<void(int)> rec = [&](int pos) {
        if (pos == out_arity) {
            if (eval(of.formula, s, env)) result.insert(atom);
            return;
        }
        for (Elem r = 0; r < out_size; ++r) {
            atom[pos] = r;
            Tuple block = tuple_unrank(r, s.size, k);
            for (int i = 0; i < k; ++i) env[pos * k + i].second = block[i];
            rec(pos + 1);
        }
    };
    rec(0);
    return result;
}

std::set<Tuple> materialize_guarded(const OutputFormula& of, const ProjectionForm& form,
                                    const Structure& s, int k, Elem /*out_size*/) {
    std::set<Tuple> result;
    const Elem m = s.size;
    auto emit = [&](const Env& env) { result.insert(atom_from_env(env, of.params, k, m)); };
    for (const auto& alpha : form.alpha0) {
        GuardSolver solver(alpha, of.params, {}, s);
        solver.solve(emit);
    }
    for (const auto& g : form.guarded) {
        auto drive = [&](const Tuple& tup) {
            auto bound = bind_literal(g.literal.terms, tup, m);
            if (!bound) return;
            GuardSolver solver(g.alpha, of.params, *bound, s);
            solver.solve(emit);
        };
        const auto& rel = s.relation(g.literal.rel);
        if (g.literal.positive) {
            for (const auto& tup : rel) drive(tup);
        } else {
            for_each_tuple(m, (int)g.literal.terms.size(), [&](const Tuple& tup) {
                if (!rel.count(tup)) drive(tup);
            });
        }
    }
    return result;
}

}  // namespace

Structure apply_reduction(const ReductionDef& def, const Structure& s, ApplyStrategy strategy) {
    if (!vocab_compatible(def.input_vocab, s.vocab))
        throw VocabularyError("structure vocabulary does not match reduction " + def.name);
    if (s.size < def.min_input_size)
        throw DomainError("reduction " + def.name + " requires size >= " +
                          std::to_string(def.min_input_size));

    const Elem m = s.size;
    const int k = def.arity;
    const Elem out_size = checked_pow(m, k);

    // phi0 selects the output universe; only the full tuple space keeps the
    // rank flattening valid, so proper subsets are rejected.
    if (def.phi0->kind != Formula::Kind::True) {
        auto params = output_params(k, 1);
        bool all = true;
        Env env;
        for (const auto& p : params) env.emplace_back(p, 0);
        for_each_tuple(m, k, [&](const Tuple& t) {
            for (int i = 0; i < k; ++i) env[i].second = t[i];
            if (!eval(def.phi0, s, env)) all = false;
        });
        if (!all)
            throw DefinitionError("phi0 selects a proper subset of the tuple space; unsupported");
    }

    std::map<std::string, std::set<Tuple>> relations;
    for (const auto& [rel, of] : def.rel_formulas) {
        if (strategy == ApplyStrategy::Naive) {
            relations[rel] = materialize_naive(of, s, k, out_size);
            continue;
        }
        try {
            ProjectionForm form = classify_projection(of.formula);
            relations[rel] = materialize_guarded(of, form, s, k, out_size);
        } catch (const NotProjectiveError&) {
            relations[rel] = materialize_naive(of, s, k, out_size);
        }
    }

    std::map<std::string, Elem> constants;
    for (const auto& [cname, of] : def.const_formulas) {
        std::vector<Elem> hits;
        Env env;
        for (const auto& p : of.params) env.emplace_back(p, 0);
        for_each_tuple(m, k, [&](const Tuple& t) {
            for (int i = 0; i < k; ++i) env[i].second = t[i];
            if (eval(of.formula, s, env)) hits.push_back(tuple_rank(t, m));
        });
        if (hits.size() != 1)
            throw DefinitionError("constant formula for " + cname + " has " +
                                  std::to_string(hits.size()) + " solutions, expected 1");
        constants[cname] = hits[0];
    }

    return make_structure(def.output_vocab, out_size, std::move(relations),
                          std::move(constants), m, k);
}

CompositionResult compose(const std::vector<const ReductionDef*>& defs, const Structure& s) {
    CompositionResult res{s, {s.size}};
    for (const ReductionDef* def : defs) {
        res.result = apply_reduction(*def, res.result);
        res.size_chain.push_back(res.result.size);
    }
    return res;
}

BigNat target_of(const Structure& s) {
    const auto& l = s.relation("L");
    BigNat t = 0;
    for (const auto& tup : l) bit_set(t, (unsigned)(s.size - 1 - tup[0]));
    return t;
}

BigNat row_value(const Structure& s, std::string_view rel, Elem row) {
    BigNat v = 0;
    for (const auto& tup : s.relation(rel))
        if (tup[0] == row) bit_set(v, (unsigned)(s.size - 1 - tup[1]));
    return v;
}

Elem rho1_y_row(Elem n, Elem j) { return tuple_rank(Tuple{0, j, 1, n - 2}, n); }
Elem rho1_z_row(Elem n, Elem j) { return tuple_rank(Tuple{0, j, 1, n - 1}, n); }
Elem rho1_g_row(Elem n, Elem i) { return tuple_rank(Tuple{n - 1, i, 1, n - 2}, n); }
Elem rho1_h_row(Elem n, Elem i) { return tuple_rank(Tuple{n - 1, i, 1, n - 1}, n); }
Elem rho1_var_col(Elem n, Elem j) { return rho1_z_row(n, j); }
Elem rho1_clause_col(Elem n, Elem i) { return rho1_h_row(n, i); }

std::vector<Elem> rho1_nonzero_columns(Elem n) {
    std::vector<Elem> cols;
    for (Elem j = 0; j < n; ++j) cols.push_back(rho1_var_col(n, j));
    for (Elem i = 0; i < n; ++i) cols.push_back(rho1_clause_col(n, i));
    return cols;
}

}  // namespace fopforge

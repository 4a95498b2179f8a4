#include "fopforge/projana.hpp"

#include <algorithm>
#include <future>
#include <random>

#include "fopforge/fologic.hpp"

namespace fopforge {

std::uint64_t RelationTable::count(DepKind k) const {
    if (k == DepKind::Zero) {
        return total_atoms - entries.size();
    }
    std::uint64_t n = 0;
    for (const auto& [atom, dep] : entries)
        if (dep.kind == k) ++n;
    return n;
}

Dep DependencyTable::lookup(const std::string& rel, const Tuple& atom) const {
    auto rit = relations.find(rel);
    if (rit == relations.end()) throw DomainError("no table for relation " + rel);
    auto it = rit->second.entries.find(atom);
    return it == rit->second.entries.end() ? Dep{} : it->second;
}

namespace {

struct ClassifiedOutput {
    const OutputFormula* of = nullptr;
    ProjectionForm form;
};

std::string atom_text(const std::string& rel, const Tuple& atom) {
    std::string s = rel + "(";
    for (std::size_t i = 0; i < atom.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(atom[i]);
    }
    return s + ")";
}

Tuple resolve_literal(const InputLiteral& lit, const Env& env, Elem m) {
    Tuple at(lit.terms.size());
    for (std::size_t i = 0; i < lit.terms.size(); ++i) {
        const Term& t = lit.terms[i];
        switch (t.kind) {
            case Term::Kind::Zero: at[i] = 0; break;
            case Term::Kind::One: at[i] = 1; break;
            case Term::Kind::Max: at[i] = m - 1; break;
            case Term::Kind::Var: {
                bool found = false;
                for (auto it = env.rbegin(); it != env.rend(); ++it)
                    if (it->first == t.name) {
                        at[i] = it->second;
                        found = true;
                        break;
                    }
                if (!found) throw ConsistencyError("literal variable unbound: " + t.name);
                break;
            }
        }
    }
    return at;
}

// Dep of one output atom: evaluate the numeric guards over a relation-free
// structure of the input size.
Dep dep_of_atom(const ClassifiedOutput& c, const Structure& numeric_only, Elem m, int k,
                const Tuple& atom, const std::string& rel) {
    Env env;
    for (std::size_t p = 0; p < atom.size(); ++p) {
        Tuple block = tuple_unrank(atom[p], m, k);
        for (int i = 0; i < k; ++i) env.emplace_back(c.of->params[p * k + i], block[i]);
    }
    Dep dep;
    bool assigned = false;
    auto take = [&](Dep d) {
        if (assigned)
            throw ConsistencyError("two guards fired on output atom " + atom_text(rel, atom));
        dep = std::move(d);
        assigned = true;
    };
    for (const auto& alpha : c.form.alpha0)
        if (eval(alpha, numeric_only, env)) take(Dep{DepKind::One, {}, {}});
    for (const auto& g : c.form.guarded)
        if (eval(g.alpha, numeric_only, env))
            take(Dep{g.literal.positive ? DepKind::Pos : DepKind::Neg, g.literal.rel,
                     resolve_literal(g.literal, env, m)});
    return dep;
}

ClassifiedOutput classify_output(const ReductionDef& def, const std::string& rel) {
    auto it = def.rel_formulas.find(rel);
    if (it == def.rel_formulas.end())
        throw DomainError("reduction has no output relation " + rel);
    return ClassifiedOutput{&it->second, classify_projection(it->second.formula)};
}

Structure numeric_only_structure(Elem m) {
    Structure s;
    s.size = m;
    s.base = m;
    return s;
}

void advance_atom(Tuple& atom, Elem limit) {
    int i = (int)atom.size() - 1;
    while (i >= 0 && ++atom[i] == limit) atom[i--] = 0;
}

}  // namespace

DependencyTable build_table(const ReductionDef& def, Elem m, const TableOptions& opts) {
    DependencyTable table;
    table.def_name = def.name;
    table.input_size = m;
    table.output_size = checked_pow(m, def.arity);

    for (const auto& [rel, of] : def.rel_formulas) {
        ClassifiedOutput c = classify_output(def, rel);
        if (opts.check_exclusion) {
            auto res = check_mutual_exclusion(c.form, m, opts.exclusion_budget, opts.jobs);
            if (res.status == ExclusionResult::Status::Counterexample)
                throw ConsistencyError("guards of " + rel + " overlap at size " +
                                       std::to_string(m));
            if (res.status == ExclusionResult::Status::Undecided)
                throw BudgetError("mutual exclusion undecided at size " + std::to_string(m));
        }

        const int out_arity = (int)(of.params.size() / def.arity);
        RelationTable rt;
        rt.arity = out_arity;
        std::uint64_t total = 1;
        for (int i = 0; i < out_arity; ++i) total *= (std::uint64_t)table.output_size;
        rt.total_atoms = total;
        if (total > opts.max_entries)
            throw BudgetError("table for " + rel + " would have " + std::to_string(total) +
                              " atoms; use dep_query above the cap");

        const Structure numeric_only = numeric_only_structure(m);
        auto scan = [&](std::uint64_t lo, std::uint64_t hi) {
            std::map<Tuple, Dep> local;
            Tuple atom((std::size_t)out_arity, 0);
            std::uint64_t r = lo;
            for (int i = out_arity; i-- > 0;) {
                atom[(std::size_t)i] = (Elem)(r % (std::uint64_t)table.output_size);
                r /= (std::uint64_t)table.output_size;
            }
            for (std::uint64_t idx = lo; idx < hi; ++idx) {
                Dep d = dep_of_atom(c, numeric_only, m, def.arity, atom, rel);
                if (d.kind != DepKind::Zero) local.emplace(atom, std::move(d));
                advance_atom(atom, table.output_size);
            }
            return local;
        };

        int jobs = std::max(1, opts.jobs);
        if (jobs == 1 || total < 4096) {
            rt.entries = scan(0, total);
        } else {
            std::vector<std::future<std::map<Tuple, Dep>>> futs;
            std::uint64_t chunk = (total + jobs - 1) / jobs;
            for (int t = 0; t < jobs; ++t) {
                std::uint64_t lo = (std::uint64_t)t * chunk, hi = std::min(total, lo + chunk);
                if (lo >= hi) break;
                futs.push_back(std::async(std::launch::async, scan, lo, hi));
            }
            for (auto& f : futs) rt.entries.merge(f.get());
        }
        table.relations[rel] = std::move(rt);
    }
    return table;
}

Dep dep_query(const ReductionDef& def, Elem m, const std::string& rel, const Tuple& atom) {
    ClassifiedOutput c = classify_output(def, rel);
    const Elem out_size = checked_pow(m, def.arity);
    if ((int)atom.size() * def.arity != (int)c.of->params.size())
        throw DomainError("output atom arity mismatch");
    for (Elem r : atom)
        if (r < 0 || r >= out_size) throw DomainError("output atom rank out of range");
    return dep_of_atom(c, numeric_only_structure(m), m, def.arity, atom, rel);
}

CheckReport table_consistency(const ReductionDef& def, const DependencyTable& table,
                              const std::vector<Structure>& inputs) {
    CheckReport rep;
    for (std::size_t idx = 0; idx < inputs.size(); ++idx) {
        const Structure& s = inputs[idx];
        if (s.size != table.input_size) {
            rep.ok = false;
            rep.detail = "input " + std::to_string(idx) + " has the wrong size";
            return rep;
        }
        Structure out = apply_reduction(def, s);
        for (const auto& [rel, rt] : table.relations) {
            std::set<Tuple> predicted;
            for (const auto& [atom, dep] : rt.entries) {
                bool bit = false;
                switch (dep.kind) {
                    case DepKind::One: bit = true; break;
                    case DepKind::Pos: bit = s.holds(dep.rel, dep.at); break;
                    case DepKind::Neg: bit = !s.holds(dep.rel, dep.at); break;
                    case DepKind::Zero: break;
                }
                if (bit) predicted.insert(atom);
            }
            if (predicted != out.relation(rel)) {
                std::set<Tuple> diff;
                std::set_symmetric_difference(predicted.begin(), predicted.end(),
                                              out.relation(rel).begin(), out.relation(rel).end(),
                                              std::inserter(diff, diff.begin()));
                rep.ok = false;
                rep.detail = "input " + std::to_string(idx) + ", relation " + rel +
                             ": prediction differs at " + atom_text(rel, *diff.begin());
                return rep;
            }
        }
    }
    return rep;
}

CheckReport mutation_locality(const ReductionDef& def, const Structure& s,
                              const DependencyTable& table) {
    CheckReport rep;
    if (s.size != table.input_size) {
        rep.ok = false;
        rep.detail = "structure size does not match the table";
        return rep;
    }
    // (input atom) -> output atoms whose Dep reads it
    std::map<std::pair<std::string, Tuple>, std::map<std::string, std::set<Tuple>>> reads;
    for (const auto& [rel, rt] : table.relations)
        for (const auto& [atom, dep] : rt.entries)
            if (dep.kind == DepKind::Pos || dep.kind == DepKind::Neg)
                reads[{dep.rel, dep.at}][rel].insert(atom);

    Structure base_out = apply_reduction(def, s);
    for (const auto& [in_rel, arity] : def.input_vocab.relations) {
        Tuple flip((std::size_t)arity, 0);
        std::uint64_t count = 1;
        for (int i = 0; i < arity; ++i) count *= (std::uint64_t)s.size;
        for (std::uint64_t i = 0; i < count; ++i, advance_atom(flip, s.size)) {
            Structure mutated = s;
            auto& relset = mutated.relations[in_rel];
            if (!relset.erase(flip)) relset.insert(flip);
            Structure out = apply_reduction(def, mutated);
            auto expected_it = reads.find({in_rel, flip});
            for (const auto& [rel, rt] : table.relations) {
                std::set<Tuple> diff;
                std::set_symmetric_difference(base_out.relation(rel).begin(),
                                              base_out.relation(rel).end(),
                                              out.relation(rel).begin(),
                                              out.relation(rel).end(),
                                              std::inserter(diff, diff.begin()));
                std::set<Tuple> expected;
                if (expected_it != reads.end()) {
                    auto jt = expected_it->second.find(rel);
                    if (jt != expected_it->second.end()) expected = jt->second;
                }
                if (diff != expected) {
                    rep.ok = false;
                    rep.detail = "flip of " + atom_text(in_rel, flip) + " changed relation " +
                                 rel + " outside its dependency set";
                    return rep;
                }
            }
        }
    }
    return rep;
}

std::vector<Structure> random_structures(const Vocabulary& vocab, Elem m, int count,
                                         std::uint64_t seed) {
    std::vector<Structure> out;
    std::mt19937_64 rng(seed);
    // ~1/10 density via a fixed threshold on the raw 64-bit draw; avoids
    // distribution objects whose output is implementation-defined.
    const std::uint64_t threshold = UINT64_MAX / 10;
    for (int c = 0; c < count; ++c) {
        std::map<std::string, std::set<Tuple>> rels;
        for (const auto& [name, arity] : vocab.relations) {
            Tuple t((std::size_t)arity, 0);
            std::uint64_t total = 1;
            for (int i = 0; i < arity; ++i) total *= (std::uint64_t)m;
            for (std::uint64_t i = 0; i < total; ++i, advance_atom(t, m))
                if (rng() < threshold) rels[name].insert(t);
        }
        out.push_back(make_structure(vocab, m, std::move(rels)));
    }
    return out;
}

}  // namespace fopforge

#include "fopforge/oracles.hpp"

#include <cstdlib>
#include <functional>

#include "fopforge/fologic.hpp"
#include "fopforge/reductions.hpp"

namespace fopforge {

int subset_budget_from_env(int fallback) {
    const char* v = std::getenv("FOPFORGE_BUDGET");
    if (!v || !*v) return fallback;
    char* end = nullptr;
    long parsed = std::strtol(v, &end, 10);
    if (end == v || *end || parsed < 0 || parsed > 62)
        throw DomainError("FOPFORGE_BUDGET must be an integer in [0,62]");
    return (int)parsed;
}

std::vector<std::vector<Literal>> clauses_of(const Structure& s) {
    std::vector<std::vector<Literal>> clauses((std::size_t)s.size);
    for (const auto& tup : s.relation("P"))
        clauses[(std::size_t)tup[1]].push_back({tup[0], false});
    for (const auto& tup : s.relation("N"))
        clauses[(std::size_t)tup[1]].push_back({tup[0], true});
    return clauses;
}

bool assignment_satisfies(const Structure& s, const Assignment& a) {
    if ((Elem)a.bits.size() != s.size) throw DomainError("assignment length != structure size");
    for (const auto& clause : clauses_of(s)) {
        bool sat = false;
        for (const Literal& l : clause)
            if (a.bits[(std::size_t)l.var] != l.neg) {
                sat = true;
                break;
            }
        if (!sat) return false;
    }
    return true;
}

bool cnf_satisfiable_bruteforce(const Structure& s) {
    auto clauses = clauses_of(s);
    const Elem n = s.size;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        bool ok = true;
        for (const auto& clause : clauses) {
            bool sat = false;
            for (const Literal& l : clause)
                if (((mask >> l.var) & 1) != (std::uint64_t)l.neg) {
                    sat = true;
                    break;
                }
            if (!sat) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

namespace {

const FormulaPtr& sat_matrix_formula() {
    static const FormulaPtr f = parse_formula(
        "A x . E y . (S(y) & P(y,x)) | (!S(y) & N(y,x))",
        Vocabulary{{{"P", 2}, {"N", 2}, {"S", 1}}, {}});
    return f;
}

}  // namespace

std::optional<Assignment> solve_3sat(const Structure& s) {
    const Elem n = s.size;
    if (n > 30) throw BudgetError("3SAT oracle limited to 30 variables");
    Structure candidate;
    candidate.vocab = Vocabulary{{{"P", 2}, {"N", 2}, {"S", 1}}, {}};
    candidate.size = n;
    candidate.base = n;
    candidate.relations["P"] = s.relation("P");
    candidate.relations["N"] = s.relation("N");
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        std::set<Tuple>& sset = candidate.relations["S"];
        sset.clear();
        for (Elem j = 0; j < n; ++j)
            if ((mask >> j) & 1) sset.insert(Tuple{j});
        if (eval(sat_matrix_formula(), candidate)) {
            Assignment a;
            a.bits.resize((std::size_t)n);
            for (Elem j = 0; j < n; ++j) a.bits[(std::size_t)j] = ((mask >> j) & 1) != 0;
            if (!assignment_satisfies(s, a))
                throw ConsistencyError("SAT sentence accepted a non-satisfying assignment");
            return a;
        }
    }
    return std::nullopt;
}

namespace {

// First subset (ascending bitmask over `ids`, bit p = ids[p]) of sizes
// summing to target. Exclude-first depth-first search from the highest bit
// enumerates masks in ascending order; branches are cut when the partial
// sum exceeds the target or the remaining total cannot reach it.
std::optional<std::set<Elem>> subset_search(const std::vector<Elem>& ids,
                                            const std::vector<const BigNat*>& sizes,
                                            const BigNat& target) {
    const int z = (int)ids.size();
    // prefix[k] = total of sizes[0..k): the part still undecided once bits
    // z-1 .. k have been fixed.
    std::vector<BigNat> prefix((std::size_t)z + 1, BigNat(0));
    for (int i = 0; i < z; ++i)
        prefix[(std::size_t)i + 1] = prefix[(std::size_t)i] + *sizes[(std::size_t)i];
    if (target > prefix[(std::size_t)z]) return std::nullopt;

    std::vector<bool> chosen((std::size_t)z, false);
    BigNat sum = 0;
    std::optional<std::set<Elem>> found;
    // pos runs from the most significant bit (z-1) down to -1.
    std::function<bool(int)> rec = [&](int pos) -> bool {
        if (sum > target) return false;
        if (sum + prefix[(std::size_t)(pos + 1)] < target) return false;
        if (pos < 0) {
            if (sum == target) {
                std::set<Elem> w;
                for (int i = 0; i < z; ++i)
                    if (chosen[(std::size_t)i]) w.insert(ids[(std::size_t)i]);
                found = std::move(w);
                return true;
            }
            return false;
        }
        if (rec(pos - 1)) return true;
        chosen[(std::size_t)pos] = true;
        sum += *sizes[(std::size_t)pos];
        bool hit = rec(pos - 1);
        sum -= *sizes[(std::size_t)pos];
        chosen[(std::size_t)pos] = false;
        return hit;
    };
    rec(z - 1);
    return found;
}

std::optional<SubsetWitness> subset_sum_over(const std::vector<BigNat>& all_sizes,
                                             const BigNat& target, int budget_bits) {
    std::vector<Elem> ids;
    std::vector<const BigNat*> sizes;
    for (std::size_t i = 0; i < all_sizes.size(); ++i)
        if (all_sizes[i] != 0) {
            ids.push_back((Elem)i);
            sizes.push_back(&all_sizes[i]);
        }
    if ((int)ids.size() > budget_bits)
        throw BudgetError("subset enumeration over " + std::to_string(ids.size()) +
                          " nonzero elements exceeds the budget of " +
                          std::to_string(budget_bits));
    auto found = subset_search(ids, sizes, target);
    if (!found) return std::nullopt;
    return SubsetWitness{std::move(*found)};
}

}  // namespace

std::optional<SubsetWitness> solve_subsetsum(const SubsetSumInstance& inst, int budget_bits) {
    return subset_sum_over(inst.sizes, inst.target, budget_bits);
}

std::optional<SubsetWitness> solve_partition(const PartitionInstance& inst, int budget_bits) {
    BigNat total = inst.total();
    if (total % 2 != 0) return std::nullopt;
    return subset_sum_over(inst.sizes, total / 2, budget_bits);
}

namespace {

Elem rho1_input_size(const Structure& rho1_out) {
    if (rho1_out.dim == 4) return rho1_out.base;
    for (Elem q = 2; q * q * q * q <= rho1_out.size; ++q)
        if (q * q * q * q == rho1_out.size) return q;
    throw DomainError("structure size is not a fourth power");
}

}  // namespace

SubsetWitness transport_3sat_to_subsetsum(const Assignment& a, const Structure& rho1_out) {
    const Elem n = rho1_input_size(rho1_out);
    if ((Elem)a.bits.size() != n)
        throw TransportError("assignment length does not match the instance");
    SubsetWitness w;
    std::vector<Elem> chosen;
    for (Elem j = 0; j < n; ++j) {
        Elem row = a.bits[(std::size_t)j] ? rho1_y_row(n, j) : rho1_z_row(n, j);
        chosen.push_back(row);
        w.ids.insert(row);
    }
    for (Elem i = 0; i < n; ++i) {
        Elem col = rho1_clause_col(n, i);
        int digit = 0;
        for (Elem row : chosen)
            if (rho1_out.holds("W", Tuple{row, col})) ++digit;
        if (digit == 0)
            throw TransportError("assignment does not satisfy clause " + std::to_string(i));
        if (digit > 3)
            throw TransportError("clause column " + std::to_string(i) + " oversubscribed");
        int need = 3 - digit;
        if (need >= 1) w.ids.insert(rho1_g_row(n, i));
        if (need == 2) w.ids.insert(rho1_h_row(n, i));
    }
    auto inst = decode_subsetsum(rho1_out);
    BigNat sum = 0;
    for (Elem id : w.ids) sum += inst.sizes[(std::size_t)id];
    if (sum != inst.target)
        throw ConsistencyError("transported subset misses the target");
    return w;
}

Assignment transport_subsetsum_to_3sat(const SubsetWitness& w, const Structure& sat_in,
                                       const Structure& rho1_out) {
    auto inst = decode_subsetsum(rho1_out);
    BigNat sum = 0;
    for (Elem id : w.ids) {
        if (id < 0 || id >= (Elem)inst.sizes.size())
            throw TransportError("witness id out of range");
        sum += inst.sizes[(std::size_t)id];
    }
    if (sum != inst.target) throw TransportError("witness does not sum to the target");
    const Elem n = rho1_input_size(rho1_out);
    Assignment a;
    a.bits.resize((std::size_t)n);
    for (Elem j = 0; j < n; ++j) a.bits[(std::size_t)j] = w.ids.count(rho1_y_row(n, j)) > 0;
    if (!assignment_satisfies(sat_in, a))
        throw TransportError("decoded assignment does not satisfy the source instance");
    return a;
}

SubsetWitness transport_subsetsum_to_partition(const SubsetWitness& w,
                                               const Structure& rho2_out) {
    if (rho2_out.dim != 2) throw DomainError("expected a 2-ary reduction image");
    const Elem m = rho2_out.base;
    auto inst = decode_partition(rho2_out);
    SubsetWitness out;
    for (Elem id : w.ids) {
        Elem copy_row = m * id;
        if (copy_row < 0 || copy_row >= (Elem)inst.sizes.size())
            throw TransportError("witness id out of range");
        // F is only defined on elements with nonzero sizes; zero-size ids
        // have empty copy rows and are dropped.
        if (inst.sizes[(std::size_t)copy_row] != 0) out.ids.insert(copy_row);
    }
    out.ids.insert(1);  // b1 = row (0,1)
    BigNat side = 0;
    for (Elem id : out.ids) side += inst.sizes[(std::size_t)id];
    if (side * 2 != inst.total())
        throw TransportError("transported side does not balance the partition");
    return out;
}

SubsetWitness transport_partition_to_subsetsum(const SubsetWitness& w,
                                               const Structure& rho2_out,
                                               const Structure& rho1_out) {
    if (rho2_out.dim != 2) throw DomainError("expected a 2-ary reduction image");
    const Elem m = rho2_out.base;
    auto inst = decode_partition(rho2_out);
    BigNat total = inst.total();
    BigNat side_sum = 0;
    for (Elem id : w.ids) {
        if (id < 0 || id >= (Elem)inst.sizes.size())
            throw TransportError("witness id out of range");
        side_sum += inst.sizes[(std::size_t)id];
    }
    if (side_sum * 2 != total) throw TransportError("witness side is not balanced");

    const Elem b1 = 1, b2 = m + 1;
    bool has_b1 = w.ids.count(b1) > 0, has_b2 = w.ids.count(b2) > 0;
    if (has_b1 == has_b2)
        throw TransportError("b1 and b2 lie on the same side of a claimed-balanced partition");

    std::set<Elem> side;
    if (has_b1) {
        side = w.ids;
    } else {
        for (Elem id : inst.nonzero_ids())
            if (!w.ids.count(id)) side.insert(id);
    }

    SubsetWitness out;
    for (Elem id : side) {
        if (id == b1) continue;
        if (inst.sizes[(std::size_t)id] == 0) continue;
        if (id % m != 0)
            throw TransportError("side contains a nonzero row that is not a copy row");
        out.ids.insert(id / m);
    }
    auto ss = decode_subsetsum(rho1_out);
    BigNat sum = 0;
    for (Elem id : out.ids) sum += ss.sizes[(std::size_t)id];
    if (sum != ss.target)
        throw TransportError("pulled-back subset does not hit the SUBSET-SUM target");
    return out;
}

}  // namespace fopforge

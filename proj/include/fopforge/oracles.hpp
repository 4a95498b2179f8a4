#ifndef FOPFORGE_ORACLES_HPP
#define FOPFORGE_ORACLES_HPP

#include <optional>
#include <set>
#include <vector>

#include "fopforge/problems.hpp"
#include "fopforge/structures.hpp"

namespace fopforge {

struct Assignment {
    std::vector<bool> bits;  // value of each variable

    bool operator==(const Assignment&) const = default;
};

struct SubsetWitness {
    std::set<Elem> ids;

    bool operator==(const SubsetWitness&) const = default;
};

// Subset enumeration refuses to run past this many nonzero elements unless
// overridden (FOPFORGE_BUDGET in the CLI).
inline constexpr int kDefaultSubsetBudget = 30;
int subset_budget_from_env(int fallback = kDefaultSubsetBudget);

// Clauses encoded by a <P,N> structure: clause i holds x_j for P(j,i) and
// !x_j for N(j,i).
std::vector<std::vector<Literal>> clauses_of(const Structure& s);

// Direct clause-by-clause check, no formula machinery.
bool assignment_satisfies(const Structure& s, const Assignment& a);

// Independent brute-force satisfiability verdict (used to cross-check
// solve_3sat).
bool cnf_satisfiable_bruteforce(const Structure& s);

// Enumerates candidate assignment sets S in ascending bitmask order (bit j
// = x_j) and checks the first-order matrix of the SAT sentence
// (A x)(E y)((S(y) & P(y,x)) | (!S(y) & N(y,x))) with the generic
// evaluator. The returned assignment is re-verified clause by clause.
std::optional<Assignment> solve_3sat(const Structure& s);

// First subset of the nonzero-size elements (ascending bitmask over their
// id order) summing exactly to the target. Zero-size elements never appear
// in witnesses. Throws BudgetError past `budget_bits` nonzero elements.
std::optional<SubsetWitness> solve_subsetsum(const SubsetSumInstance& inst,
                                             int budget_bits = kDefaultSubsetBudget);

// Negative immediately on odd totals, otherwise a subset-sum search for
// half the total.
std::optional<SubsetWitness> solve_partition(const PartitionInstance& inst,
                                             int budget_bits = kDefaultSubsetBudget);

// Witness transport along the constructive correctness proofs. All four
// verify their output exactly (sum, balance, satisfaction) before
// returning.

// Satisfying assignment -> subset of the rho1 image: pick y_j or z_j per
// variable, then g_i / h_i (g first) to raise each clause column to 3.
SubsetWitness transport_3sat_to_subsetsum(const Assignment& a, const Structure& rho1_out);

// Target-hitting subset -> assignment: x_j is 1 iff y_j is in the subset.
Assignment transport_subsetsum_to_3sat(const SubsetWitness& w, const Structure& sat_in,
                                       const Structure& rho1_out);

// B' -> A' = F(E cap B') u {b1}; F maps nonzero input id i to copy row
// (i,0). b1 is row (0,1), b2 row (1,1).
SubsetWitness transport_subsetsum_to_partition(const SubsetWitness& w,
                                               const Structure& rho2_out);

// Balanced side -> B': take the side containing b1 (complementing first if
// handed the b2 side), drop b1, pull copy rows back through F^{-1}. Errors
// if b1 and b2 sit on the same side.
SubsetWitness transport_partition_to_subsetsum(const SubsetWitness& w,
                                               const Structure& rho2_out,
                                               const Structure& rho1_out);

}  // namespace fopforge

#endif

#ifndef FOPFORGE_PROBLEMS_HPP
#define FOPFORGE_PROBLEMS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fopforge/bignat.hpp"
#include "fopforge/structures.hpp"

namespace fopforge {

struct Literal {
    Elem var = 0;
    bool neg = false;

    auto operator<=>(const Literal&) const = default;
};

// Square 3SAT instance: n variables, n clauses, every clause exactly three
// distinct literals.
struct Cnf3Instance {
    Elem n = 0;
    std::vector<std::vector<Literal>> clauses;  // each sorted, size 3
};

// Empty result = valid.
std::vector<std::string> validate_cnf3(const Cnf3Instance& c);

struct SubsetSumInstance {
    std::vector<BigNat> sizes;  // index = element id; zero entries retained
    BigNat target = 0;

    std::vector<Elem> nonzero_ids() const;
};

struct PartitionInstance {
    std::vector<BigNat> sizes;

    std::vector<Elem> nonzero_ids() const;
    BigNat total() const;
};

// <P,N> structure of size n: P(j,i) iff x_j occurs positively in clause i,
// N(j,i) iff negatively.
Structure encode_3sat(const Cnf3Instance& c);

// SAT encoder without the three-distinct-literals restriction: clauses of
// any size >= 1, padded up to n clauses with the tautology (x_{n-1} v
// !x_{n-1}). Not accepted by the reduction pipeline.
Structure encode_sat_permissive(Elem n, const std::vector<std::vector<Literal>>& clauses);

// Rows of the W matrix as sizes, L as the target; bit j has weight
// 2^(m-1-j).
SubsetSumInstance decode_subsetsum(const Structure& s);
PartitionInstance decode_partition(const Structure& s);

// DIMACS CNF (p cnf V C header, 'c' comments, zero-terminated clauses).
// Clauses must have exactly 3 distinct literals; the result is squared via
// normalize_to_square and validated.
Cnf3Instance parse_dimacs(const std::string& text);

// Makes #clauses == #vars: appends tautology pads {x0,!x0,x1} when clauses
// are short (requires vars >= 2), or fresh unused variables when clauses
// exceed vars. Satisfiability-equivalent to the input.
Cnf3Instance normalize_to_square(Elem vars, std::vector<std::vector<Literal>> clauses);

// Exhaustive enumeration of valid instances for n in {2,3}, deterministic
// order: clause universe = 3-subsets of the 2n literals in lexicographic
// order (literal code 2*var+neg), instances ordered as base-C(2n,3) numbers
// with clause 0 most significant.
std::uint64_t count_3sat(Elem n);
Cnf3Instance instance_3sat(Elem n, std::uint64_t index);
std::vector<Cnf3Instance> enumerate_3sat(Elem n);

struct ImageFormReport {
    bool ok = true;
    std::vector<std::string> reasons;
};

// Structural screen for "looks like a rho1 image": (a) column k nonzero iff
// W(k,k); (b) size is q^4 with q >= 2; (c) L equals the target pattern for
// that q; (d) column sums are 2 at variable columns, 5 at clause columns;
// (e) >= 3 zero columns between consecutive nonzero columns. These are the
// properties the second reduction's correctness argument uses; the check is
// a heuristic for membership in the image, not an exact characterization.
ImageFormReport is_rho1_image_form(const Structure& s);

// Reads one 4-bit digit per anchor column: bit 0 of the digit is the
// anchor's own column, bits 1..3 the columns just above it. Anchors spaced
// >= 4 apart give independent digits.
std::vector<int> digit_profile(const BigNat& value, std::span<const Elem> anchor_cols, Elem m);

}  // namespace fopforge

#endif

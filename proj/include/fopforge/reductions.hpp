#ifndef FOPFORGE_REDUCTIONS_HPP
#define FOPFORGE_REDUCTIONS_HPP

#include <map>
#include <string>
#include <vector>

#include "fopforge/bignat.hpp"
#include "fopforge/fologic.hpp"
#include "fopforge/structures.hpp"

namespace fopforge {

// One output symbol of a reduction: the defining formula and the fixed
// order of its free variables. For a k-ary reduction an output relation of
// arity a takes a*k variables, one k-block per output position; block 1 is
// named x1..xk and block 2 is named w1..wk (arity-1 relations and constant
// formulas use the w-block alone).
struct OutputFormula {
    FormulaPtr formula;
    std::vector<std::string> params;
};

// A k-ary first-order reduction: universe predicate phi0, one formula per
// output relation, one per output constant.
struct ReductionDef {
    std::string name;
    int arity = 1;
    Vocabulary input_vocab;
    Vocabulary output_vocab;
    FormulaPtr phi0;
    std::map<std::string, OutputFormula> rel_formulas;
    std::map<std::string, OutputFormula> const_formulas;
    Elem min_input_size = 2;
};

// Parses and validates a definition from formula text. Throws
// DefinitionError / ParseError on malformed input.
ReductionDef make_reduction_def(std::string name, int arity, Vocabulary input_vocab,
                                Vocabulary output_vocab, const std::string& phi0_text,
                                const std::map<std::string, std::string>& rel_texts,
                                const std::map<std::string, std::string>& const_texts = {},
                                Elem min_input_size = 2);

bool reduction_def_equal(const ReductionDef& a, const ReductionDef& b);

// Parameter name convention described above.
std::vector<std::string> output_params(int arity_k, int output_arity);

// The two fixed definitions. rho1: 4-ary, <P,N> -> <W,L>. rho2: 2-ary,
// <W,L> -> <T>, defined only on structures of size >= 16.
const ReductionDef& rho1_def();
const ReductionDef& rho2_def();
std::vector<const ReductionDef*> builtin_defs();
const ReductionDef* find_builtin(std::string_view name);

// The exact formula texts the built-ins are parsed from (also shipped as
// data/rho1.json and data/rho2.json).
std::map<std::string, std::string> builtin_formula_texts(std::string_view name);

enum class ApplyStrategy {
    // Enumerate only assignments where some guard can fire: numeric-guard
    // solution sets plus input-atom driven bindings. Falls back to the naive
    // scan for non-projective formulas.
    GuardDriven,
    // Evaluate the defining formula on every candidate output atom.
    Naive,
};

// Applies def to s. The output universe is the full k-tuple space of s's
// universe, flattened to lexicographic ranks (size m^k, base m, dim k);
// phi0 must hold on every k-tuple (proper subsets are rejected).
Structure apply_reduction(const ReductionDef& def, const Structure& s,
                          ApplyStrategy strategy = ApplyStrategy::GuardDriven);

struct CompositionResult {
    Structure result;
    std::vector<Elem> size_chain;  // input size followed by each stage's output size
};

// Sequential application; adjacent vocabularies must match. An empty chain
// is the identity.
CompositionResult compose(const std::vector<const ReductionDef*>& defs, const Structure& s);

// Target value of a <W,L> structure: t = sum over j in L of 2^(m-1-j); the
// least significant bit position is m-1.
BigNat target_of(const Structure& s);

// Row value of a binary bit-matrix relation: sum over j with R(row,j) of
// 2^(m-1-j).
BigNat row_value(const Structure& s, std::string_view rel, Elem row);

// Tag arithmetic for rho1 images over input size n (output size n^4).
Elem rho1_y_row(Elem n, Elem j);       // (0,j,1,n-2)
Elem rho1_z_row(Elem n, Elem j);       // (0,j,1,n-1)
Elem rho1_g_row(Elem n, Elem i);       // (n-1,i,1,n-2)
Elem rho1_h_row(Elem n, Elem i);       // (n-1,i,1,n-1)
Elem rho1_var_col(Elem n, Elem j);     // same tag as the z row
Elem rho1_clause_col(Elem n, Elem i);  // same tag as the h row
// Variable columns then clause columns, ascending.
std::vector<Elem> rho1_nonzero_columns(Elem n);

}  // namespace fopforge

#endif

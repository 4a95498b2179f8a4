#ifndef FOPFORGE_PROJANA_HPP
#define FOPFORGE_PROJANA_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fopforge/reductions.hpp"

namespace fopforge {

// Where one output bit comes from: forced constant, or a single input
// literal (possibly negated). This totality is exactly the locality that
// places projection images inside AC0-reducibility.
enum class DepKind { Zero, One, Pos, Neg };

struct Dep {
    DepKind kind = DepKind::Zero;
    std::string rel;  // Pos/Neg
    Tuple at;         // Pos/Neg: the input atom read

    bool operator==(const Dep&) const = default;
};

struct RelationTable {
    int arity = 0;
    std::uint64_t total_atoms = 0;
    // Non-Zero entries only; lookup treats absent atoms as Zero.
    std::map<Tuple, Dep> entries;

    std::uint64_t count(DepKind k) const;
};

struct DependencyTable {
    std::string def_name;
    Elem input_size = 0;
    Elem output_size = 0;
    std::map<std::string, RelationTable> relations;

    Dep lookup(const std::string& rel, const Tuple& atom) const;
};

struct TableOptions {
    // Above this many output atoms per relation the table is not
    // materialized; use dep_query instead.
    std::uint64_t max_entries = 1ull << 26;
    bool check_exclusion = true;
    std::uint64_t exclusion_budget = kDefaultExclusionBudget;
    int jobs = 1;
};

// Evaluates every numeric guard on every output atom (no input needed):
// some alpha0 disjunct true -> One, guard e true -> Pos/Neg of its literal
// instantiated at that atom, none -> Zero. Requires def's formulas to
// classify and the guards to be mutually exclusive at size m.
DependencyTable build_table(const ReductionDef& def, Elem m, const TableOptions& opts = {});

// Single-atom query; same evaluation without materializing a table.
Dep dep_query(const ReductionDef& def, Elem m, const std::string& rel, const Tuple& atom);

struct CheckReport {
    bool ok = true;
    std::string detail;  // first mismatch / violation
};

// Resolves every table entry against each input structure and compares the
// predicted output with apply_reduction, exactly.
CheckReport table_consistency(const ReductionDef& def, const DependencyTable& table,
                              const std::vector<Structure>& inputs);

// Flips every input atom of s one at a time and checks that the output
// changes exactly on the atoms whose Dep references the flipped atom.
CheckReport mutation_locality(const ReductionDef& def, const Structure& s,
                              const DependencyTable& table);

// Seed-fixed random structures over a vocabulary (each tuple present with
// probability ~1/10), for randomized consistency trials.
std::vector<Structure> random_structures(const Vocabulary& vocab, Elem m, int count,
                                         std::uint64_t seed);

}  // namespace fopforge

#endif

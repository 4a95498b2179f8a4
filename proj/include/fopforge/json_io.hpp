#ifndef FOPFORGE_JSON_IO_HPP
#define FOPFORGE_JSON_IO_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fopforge/oracles.hpp"
#include "fopforge/problems.hpp"
#include "fopforge/projana.hpp"
#include "fopforge/reductions.hpp"
#include "fopforge/structures.hpp"

namespace fopforge {

using Json = nlohmann::ordered_json;

// Structure wire format:
//   {"size": m, "dim": k, "base": n, "encoded": true,
//    "vocab": {"relations": {"P": 2}, "constants": []},
//    "relations": {"P": [[0,0],[2,0]]}, "constants": {}}
// With "encoded": true each atom is a flat list of ranks; otherwise atoms
// are explicit tuples (each element spelled as its dim-digit tuple when
// dim > 1). The writer emits ranks for dim > 1 and explicit tuples for
// dim == 1. "vocab" makes empty relations decodable.
Json structure_to_json(const Structure& s);
Structure structure_from_json(const Json& j);

Json vocabulary_to_json(const Vocabulary& v);
Vocabulary vocabulary_from_json(const Json& j);

// {"n": 2, "clauses": [[{"var":0,"neg":false}, ...], ...]}
Json cnf_to_json(const Cnf3Instance& c);
Cnf3Instance cnf_from_json(const Json& j);

// {"sizes": ["4113", ...], "target": "4403"} — decimal strings.
Json subsetsum_to_json(const SubsetSumInstance& inst);
SubsetSumInstance subsetsum_from_json(const Json& j);

// {"sizes": [...]}
Json partition_to_json(const PartitionInstance& inst);
PartitionInstance partition_from_json(const Json& j);

// {"kind": "assignment", "bits": [...]} / {"kind": "subset", "ids": [...]}
Json assignment_to_json(const Assignment& a);
Json subset_witness_to_json(const SubsetWitness& w);

// Reduction definition files:
//   {"name": "...", "arity": k, "input_vocab": {...}, "output_vocab": {...},
//    "phi0": "<DSL>", "relations": {"W": "<DSL>", ...}, "constants": {},
//    "min_size": 16}
Json reduction_def_to_json(const ReductionDef& def);
ReductionDef reduction_def_from_json(const Json& j);

// Dependency table export: one object per output relation,
//   {"relation": "W", "entries": [{"out": [2,11],
//     "dep": {"kind": "pos", "rel": "P", "at": [0,0]}}, ...],
//    "stats": {"total":..., "zero":..., "one":..., "pos":..., "neg":...}}
// Zero entries are implicit (counted in stats only); summary_only drops
// "entries".
Json emit_table(const DependencyTable& table, bool summary_only = false);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace fopforge

#endif

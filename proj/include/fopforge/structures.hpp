#ifndef FOPFORGE_STRUCTURES_HPP
#define FOPFORGE_STRUCTURES_HPP

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fopforge/errors.hpp"

namespace fopforge {

using Elem = std::int64_t;
using Tuple = std::vector<Elem>;

// Relation and constant symbols an instance-structure interprets.
struct Vocabulary {
    std::vector<std::pair<std::string, int>> relations;  // (name, arity)
    std::vector<std::string> constants;

    // -1 if the relation is not declared.
    int arity_of(std::string_view name) const;
    bool has_relation(std::string_view name) const { return arity_of(name) >= 0; }
    bool has_constant(std::string_view name) const;

    bool operator==(const Vocabulary&) const = default;
};

// Names reserved for built-in numeric predicates/constants; vocabularies may
// not redeclare them.
bool is_reserved_symbol(std::string_view name);

// Problems with a vocabulary, all of them (empty means valid).
std::vector<std::string> validate_vocabulary(const Vocabulary& v);

// A finite relational structure over universe {0..size-1}. When the
// structure is the output of a k-ary reduction, `base` and `dim` record the
// tuple universe it was flattened from (size == base^dim); ranks are
// lexicographic. Structures are immutable after construction by convention:
// nothing in the library mutates one once built.
struct Structure {
    Vocabulary vocab;
    Elem size = 0;
    Elem base = 0;  // == size when dim == 1
    int dim = 1;
    std::map<std::string, std::set<Tuple>> relations;
    std::map<std::string, Elem> constants;

    const std::set<Tuple>& relation(std::string_view name) const;
    bool holds(std::string_view rel, const Tuple& t) const;
};

// Validating factory; throws DomainError listing all violations.
Structure make_structure(Vocabulary vocab, Elem size,
                         std::map<std::string, std::set<Tuple>> relations,
                         std::map<std::string, Elem> constants = {},
                         Elem base = 0, int dim = 1);

// Every invariant violation of `s`, not just the first. Empty result = ok.
std::vector<std::string> validate_structure(const Structure& s);

// Lexicographic rank of a k-tuple over {0..base-1}: sum of
// tuple[i]*base^(k-1-i). Inverse of tuple_unrank.
Elem tuple_rank(std::span<const Elem> tuple, Elem base);
Tuple tuple_unrank(Elem rank, Elem base, int dim);

// A position in the k-tuple space over {0..base-1}, identified by its
// lexicographic rank.
struct TupleIndex {
    Elem base = 2;
    int dim = 1;
    Elem rank = 0;

    static TupleIndex of(std::span<const Elem> tuple, Elem base);
    Tuple tuple() const { return tuple_unrank(rank, base, dim); }

    bool operator==(const TupleIndex&) const = default;
};

// base^dim with overflow guard.
Elem checked_pow(Elem base, int dim);

// Built-in numeric predicates. SUC(i,j) iff j = i+1; PLUS(i,j,k) iff i+j = k
// with ordinary (non-wrapping) arithmetic, so it is false when the true sum
// leaves the universe; TIMES likewise; =, <=, < standard.
enum class NumPred { Eq, Le, Lt, Suc, Plus, Times };

int num_pred_arity(NumPred p);
const char* num_pred_name(NumPred p);
bool lookup_num_pred(std::string_view name, NumPred& out);

bool eval_numeric(NumPred pred, std::span<const Elem> args, Elem m);
bool eval_numeric(std::string_view name, std::span<const Elem> args, Elem m);

// Built-in numeric constants: 0 -> 0, 1 -> 1, max -> m-1.
Elem constant_value(std::string_view name, Elem m);

}  // namespace fopforge

#endif

#include "fopforge/structures.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace fopforge {

int Vocabulary::arity_of(std::string_view name) const {
    for (const auto& [n, a] : relations)
        if (n == name) return a;
    return -1;
}

bool Vocabulary::has_constant(std::string_view name) const {
    return std::find(constants.begin(), constants.end(), name) != constants.end();
}

bool is_reserved_symbol(std::string_view name) {
    return name == "SUC" || name == "PLUS" || name == "TIMES" || name == "true" ||
           name == "false" || name == "max" || name == "E" || name == "A";
}

std::vector<std::string> validate_vocabulary(const Vocabulary& v) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& [name, arity] : v.relations) {
        if (arity < 1) out.push_back("relation " + name + ": arity < 1");
        if (is_reserved_symbol(name)) out.push_back("relation " + name + ": reserved symbol");
        if (!seen.insert(name).second) out.push_back("duplicate symbol name " + name);
    }
    for (const auto& name : v.constants) {
        if (is_reserved_symbol(name)) out.push_back("constant " + name + ": reserved symbol");
        if (!seen.insert(name).second) out.push_back("duplicate symbol name " + name);
    }
    return out;
}

const std::set<Tuple>& Structure::relation(std::string_view name) const {
    auto it = relations.find(std::string(name));
    if (it == relations.end())
        throw VocabularyError("structure has no relation " + std::string(name));
    return it->second;
}

bool Structure::holds(std::string_view rel, const Tuple& t) const {
    return relation(rel).count(t) > 0;
}

Structure make_structure(Vocabulary vocab, Elem size,
                         std::map<std::string, std::set<Tuple>> relations,
                         std::map<std::string, Elem> constants, Elem base, int dim) {
    Structure s;
    s.vocab = std::move(vocab);
    s.size = size;
    s.dim = dim;
    s.base = (dim == 1 && base == 0) ? size : base;
    s.relations = std::move(relations);
    s.constants = std::move(constants);
    // Declared-but-missing relations are empty interpretations.
    for (const auto& [name, arity] : s.vocab.relations) {
        (void)arity;
        s.relations.try_emplace(name);
    }
    auto violations = validate_structure(s);
    if (!violations.empty()) {
        std::ostringstream os;
        os << "invalid structure:";
        for (const auto& v : violations) os << " [" << v << "]";
        throw DomainError(os.str());
    }
    return s;
}

std::vector<std::string> validate_structure(const Structure& s) {
    std::vector<std::string> out = validate_vocabulary(s.vocab);
    if (s.size < 2) out.push_back("size < 2");
    if (s.dim < 1) out.push_back("dim < 1");
    if (s.dim > 1) {
        if (s.base < 2) {
            out.push_back("dim > 1 but base < 2");
        } else {
            Elem p = 1;
            bool overflow = false;
            for (int i = 0; i < s.dim; ++i) {
                if (p > std::numeric_limits<Elem>::max() / s.base) {
                    overflow = true;
                    break;
                }
                p *= s.base;
            }
            if (overflow || p != s.size) out.push_back("size != base^dim");
        }
    } else if (s.base != 0 && s.base != s.size) {
        out.push_back("dim == 1 but base != size");
    }
    for (const auto& [name, tuples] : s.relations) {
        int arity = s.vocab.arity_of(name);
        if (arity < 0) {
            out.push_back("relation " + name + " not in vocabulary");
            continue;
        }
        for (const auto& t : tuples) {
            if ((int)t.size() != arity) {
                out.push_back("relation " + name + ": tuple length != declared arity");
                break;
            }
        }
        for (const auto& t : tuples) {
            bool bad = false;
            for (Elem e : t)
                if (e < 0 || e >= s.size) bad = true;
            if (bad) {
                out.push_back("relation " + name + ": element out of universe");
                break;
            }
        }
    }
    for (const auto& [name, value] : s.constants) {
        if (!s.vocab.has_constant(name)) out.push_back("constant " + name + " not in vocabulary");
        if (value < 0 || value >= s.size)
            out.push_back("constant " + name + ": value out of universe");
    }
    for (const auto& name : s.vocab.constants)
        if (!s.constants.count(name)) out.push_back("constant " + name + " uninterpreted");
    return out;
}

Elem checked_pow(Elem base, int dim) {
    if (base < 1 || dim < 0) throw DomainError("checked_pow: bad arguments");
    Elem p = 1;
    for (int i = 0; i < dim; ++i) {
        if (p > std::numeric_limits<Elem>::max() / base)
            throw DomainError("checked_pow: overflow");
        p *= base;
    }
    return p;
}

Elem tuple_rank(std::span<const Elem> tuple, Elem base) {
    if (base < 1) throw DomainError("tuple_rank: base must be positive");
    Elem r = 0;
    for (Elem e : tuple) {
        if (e < 0 || e >= base)
            throw DomainError("tuple_rank: element " + std::to_string(e) +
                              " outside [0," + std::to_string(base) + ")");
        r = r * base + e;
    }
    return r;
}

TupleIndex TupleIndex::of(std::span<const Elem> tuple, Elem base) {
    return TupleIndex{base, (int)tuple.size(), tuple_rank(tuple, base)};
}

Tuple tuple_unrank(Elem rank, Elem base, int dim) {
    if (base < 1 || dim < 1) throw DomainError("tuple_unrank: bad base/dim");
    Elem space = checked_pow(base, dim);
    if (rank < 0 || rank >= space)
        throw DomainError("tuple_unrank: rank " + std::to_string(rank) + " outside [0," +
                          std::to_string(space) + ")");
    Tuple t(dim);
    for (int i = dim - 1; i >= 0; --i) {
        t[i] = rank % base;
        rank /= base;
    }
    return t;
}

int num_pred_arity(NumPred p) {
    switch (p) {
        case NumPred::Eq:
        case NumPred::Le:
        case NumPred::Lt:
        case NumPred::Suc:
            return 2;
        case NumPred::Plus:
        case NumPred::Times:
            return 3;
    }
    return 0;
}

const char* num_pred_name(NumPred p) {
    switch (p) {
        case NumPred::Eq: return "=";
        case NumPred::Le: return "<=";
        case NumPred::Lt: return "<";
        case NumPred::Suc: return "SUC";
        case NumPred::Plus: return "PLUS";
        case NumPred::Times: return "TIMES";
    }
    return "?";
}

bool lookup_num_pred(std::string_view name, NumPred& out) {
    if (name == "=") out = NumPred::Eq;
    else if (name == "<=") out = NumPred::Le;
    else if (name == "<") out = NumPred::Lt;
    else if (name == "SUC") out = NumPred::Suc;
    else if (name == "PLUS") out = NumPred::Plus;
    else if (name == "TIMES") out = NumPred::Times;
    else return false;
    return true;
}

bool eval_numeric(NumPred pred, std::span<const Elem> args, Elem m) {
    if ((int)args.size() != num_pred_arity(pred))
        throw DomainError(std::string("eval_numeric: wrong arity for ") + num_pred_name(pred));
    for (Elem a : args)
        if (a < 0 || a >= m)
            throw DomainError("eval_numeric: argument outside universe");
    switch (pred) {
        case NumPred::Eq: return args[0] == args[1];
        case NumPred::Le: return args[0] <= args[1];
        case NumPred::Lt: return args[0] < args[1];
        case NumPred::Suc: return args[1] == args[0] + 1;
        // Non-wrapping: false when the true sum/product leaves the universe.
        case NumPred::Plus: return args[0] + args[1] == args[2];
        case NumPred::Times: return args[0] * args[1] == args[2];
    }
    return false;
}

bool eval_numeric(std::string_view name, std::span<const Elem> args, Elem m) {
    NumPred p;
    if (!lookup_num_pred(name, p))
        throw DomainError("unknown numeric predicate " + std::string(name));
    return eval_numeric(p, args, m);
}

Elem constant_value(std::string_view name, Elem m) {
    if (name == "0") return 0;
    if (name == "1") return 1;
    if (name == "max") return m - 1;
    throw DomainError("unknown numeric constant " + std::string(name));
}

}  // namespace fopforge

#include "fopforge/json_io.hpp"

#include <fstream>
#include <sstream>

namespace fopforge {

namespace {

Json tuple_to_json(const Tuple& t) {
    Json arr = Json::array();
    for (Elem e : t) arr.push_back(e);
    return arr;
}

Tuple tuple_from_json(const Json& j) {
    if (!j.is_array()) throw DomainError("expected a tuple array");
    Tuple t;
    for (const auto& e : j) t.push_back(e.get<Elem>());
    return t;
}

}  // namespace

Json vocabulary_to_json(const Vocabulary& v) {
    Json rels = Json::object();
    for (const auto& [name, arity] : v.relations) rels[name] = arity;
    Json consts = Json::array();
    for (const auto& c : v.constants) consts.push_back(c);
    return Json{{"relations", rels}, {"constants", consts}};
}

Vocabulary vocabulary_from_json(const Json& j) {
    Vocabulary v;
    for (const auto& [name, arity] : j.at("relations").items())
        v.relations.emplace_back(name, arity.get<int>());
    if (j.contains("constants"))
        for (const auto& c : j.at("constants")) v.constants.push_back(c.get<std::string>());
    return v;
}

Json structure_to_json(const Structure& s) {
    Json j;
    j["size"] = s.size;
    j["dim"] = s.dim;
    j["base"] = s.base;
    if (s.dim > 1) j["encoded"] = true;
    j["vocab"] = vocabulary_to_json(s.vocab);
    Json rels = Json::object();
    for (const auto& [name, tuples] : s.relations) {
        Json arr = Json::array();
        for (const auto& t : tuples) arr.push_back(tuple_to_json(t));
        rels[name] = arr;
    }
    j["relations"] = rels;
    Json consts = Json::object();
    for (const auto& [name, value] : s.constants) consts[name] = value;
    j["constants"] = consts;
    return j;
}

Structure structure_from_json(const Json& j) {
    Elem size = j.at("size").get<Elem>();
    int dim = j.value("dim", 1);
    Elem base = j.value("base", dim == 1 ? size : 0);
    bool encoded = j.value("encoded", false);

    Vocabulary vocab;
    bool have_vocab = j.contains("vocab");
    if (have_vocab) vocab = vocabulary_from_json(j.at("vocab"));

    std::map<std::string, std::set<Tuple>> relations;
    if (j.contains("relations")) {
        for (const auto& [name, atoms] : j.at("relations").items()) {
            std::set<Tuple>& out = relations[name];
            for (const auto& atom : atoms) {
                if (!atom.is_array()) throw DomainError("relation atom must be an array");
                Tuple t;
                for (const auto& elem : atom) {
                    if (elem.is_array()) {
                        // explicit dim-digit element
                        if (encoded) throw DomainError("nested tuples in encoded structure");
                        t.push_back(tuple_rank(tuple_from_json(elem), base));
                    } else {
                        t.push_back(elem.get<Elem>());
                    }
                }
                out.insert(std::move(t));
            }
            if (!have_vocab) {
                if (out.empty())
                    throw DomainError("cannot infer arity of empty relation " + name +
                                      " without a vocab section");
                vocab.relations.emplace_back(name, (int)out.begin()->size());
            }
        }
    }
    std::map<std::string, Elem> constants;
    if (j.contains("constants"))
        for (const auto& [name, value] : j.at("constants").items()) {
            constants[name] = value.get<Elem>();
            if (!have_vocab) vocab.constants.push_back(name);
        }
    return make_structure(std::move(vocab), size, std::move(relations), std::move(constants),
                          base, dim);
}

Json cnf_to_json(const Cnf3Instance& c) {
    Json clauses = Json::array();
    for (const auto& clause : c.clauses) {
        Json cl = Json::array();
        for (const Literal& l : clause) cl.push_back(Json{{"var", l.var}, {"neg", l.neg}});
        clauses.push_back(cl);
    }
    return Json{{"n", c.n}, {"clauses", clauses}};
}

Cnf3Instance cnf_from_json(const Json& j) {
    Cnf3Instance c;
    c.n = j.at("n").get<Elem>();
    for (const auto& cl : j.at("clauses")) {
        std::vector<Literal> clause;
        for (const auto& l : cl)
            clause.push_back({l.at("var").get<Elem>(), l.at("neg").get<bool>()});
        std::sort(clause.begin(), clause.end());
        c.clauses.push_back(std::move(clause));
    }
    auto violations = validate_cnf3(c);
    if (!violations.empty()) throw DomainError("invalid 3SAT instance: " + violations.front());
    return c;
}

Json subsetsum_to_json(const SubsetSumInstance& inst) {
    Json sizes = Json::array();
    for (const auto& s : inst.sizes) sizes.push_back(to_decimal(s));
    return Json{{"sizes", sizes}, {"target", to_decimal(inst.target)}};
}

SubsetSumInstance subsetsum_from_json(const Json& j) {
    SubsetSumInstance inst;
    for (const auto& s : j.at("sizes")) inst.sizes.push_back(from_decimal(s.get<std::string>()));
    inst.target = from_decimal(j.at("target").get<std::string>());
    return inst;
}

Json partition_to_json(const PartitionInstance& inst) {
    Json sizes = Json::array();
    for (const auto& s : inst.sizes) sizes.push_back(to_decimal(s));
    return Json{{"sizes", sizes}};
}

PartitionInstance partition_from_json(const Json& j) {
    PartitionInstance inst;
    for (const auto& s : j.at("sizes")) inst.sizes.push_back(from_decimal(s.get<std::string>()));
    return inst;
}

Json assignment_to_json(const Assignment& a) {
    Json bits = Json::array();
    for (bool b : a.bits) bits.push_back(b);
    return Json{{"kind", "assignment"}, {"bits", bits}};
}

Json subset_witness_to_json(const SubsetWitness& w) {
    Json ids = Json::array();
    for (Elem id : w.ids) ids.push_back(id);
    return Json{{"kind", "subset"}, {"ids", ids}};
}

Json reduction_def_to_json(const ReductionDef& def) {
    Json rels = Json::object();
    for (const auto& [name, of] : def.rel_formulas) rels[name] = print_formula(of.formula);
    Json consts = Json::object();
    for (const auto& [name, of] : def.const_formulas) consts[name] = print_formula(of.formula);
    Json j;
    j["name"] = def.name;
    j["arity"] = def.arity;
    j["input_vocab"] = vocabulary_to_json(def.input_vocab);
    j["output_vocab"] = vocabulary_to_json(def.output_vocab);
    j["phi0"] = print_formula(def.phi0);
    j["relations"] = rels;
    j["constants"] = consts;
    if (def.min_input_size != 2) j["min_size"] = def.min_input_size;
    return j;
}

ReductionDef reduction_def_from_json(const Json& j) {
    std::map<std::string, std::string> rel_texts, const_texts;
    if (j.contains("relations"))
        for (const auto& [name, text] : j.at("relations").items())
            rel_texts[name] = text.get<std::string>();
    if (j.contains("constants"))
        for (const auto& [name, text] : j.at("constants").items())
            const_texts[name] = text.get<std::string>();
    return make_reduction_def(j.at("name").get<std::string>(), j.at("arity").get<int>(),
                              vocabulary_from_json(j.at("input_vocab")),
                              vocabulary_from_json(j.at("output_vocab")),
                              j.at("phi0").get<std::string>(), rel_texts, const_texts,
                              j.value("min_size", (Elem)2));
}

Json emit_table(const DependencyTable& table, bool summary_only) {
    Json out = Json::array();
    for (const auto& [rel, rt] : table.relations) {
        Json obj;
        obj["relation"] = rel;
        if (!summary_only) {
            Json entries = Json::array();
            for (const auto& [atom, dep] : rt.entries) {
                Json d;
                switch (dep.kind) {
                    case DepKind::One: d = Json{{"kind", "one"}}; break;
                    case DepKind::Pos:
                        d = Json{{"kind", "pos"}, {"rel", dep.rel}, {"at", tuple_to_json(dep.at)}};
                        break;
                    case DepKind::Neg:
                        d = Json{{"kind", "neg"}, {"rel", dep.rel}, {"at", tuple_to_json(dep.at)}};
                        break;
                    case DepKind::Zero: continue;
                }
                entries.push_back(Json{{"out", tuple_to_json(atom)}, {"dep", d}});
            }
            obj["entries"] = entries;
        }
        obj["stats"] = Json{{"total", rt.total_atoms},
                            {"zero", rt.count(DepKind::Zero)},
                            {"one", rt.count(DepKind::One)},
                            {"pos", rt.count(DepKind::Pos)},
                            {"neg", rt.count(DepKind::Neg)}};
        out.push_back(obj);
    }
    return out;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path.string());
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("bad JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace fopforge

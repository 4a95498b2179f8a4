#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "fopforge/json_io.hpp"
#include "fopforge/verify.hpp"

namespace ff = fopforge;

namespace {

// 0 success, 1 verification failure / counterexample, 2 input error,
// 3 budget exceeded.
constexpr int kOk = 0, kVerifyFail = 1, kInputError = 2, kBudget = 3;

ff::ReductionDef load_def(const std::string& spec) {
    if (const ff::ReductionDef* d = ff::find_builtin(spec)) return *d;
    return ff::reduction_def_from_json(ff::read_json_file(spec));
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(s.substr(pos));
            break;
        }
        out.push_back(s.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

void emit(const ff::Json& j, const std::string& out_path) {
    if (out_path.empty() || out_path == "-")
        std::cout << j.dump(2) << "\n";
    else
        ff::write_json_file(out_path, j);
}

int cmd_encode(const std::string& in, const std::string& out) {
    ff::Cnf3Instance cnf = ff::parse_dimacs(ff::read_text_file(in));
    emit(ff::structure_to_json(ff::encode_3sat(cnf)), out);
    return kOk;
}

int cmd_reduce(const std::string& def_spec, bool chain, const std::string& in,
               const std::string& out) {
    std::vector<std::string> names = split_csv(def_spec);
    if (names.size() > 1 && !chain)
        throw ff::DomainError("multiple definitions require --chain");
    std::vector<ff::ReductionDef> defs;
    for (const auto& n : names) defs.push_back(load_def(n));

    ff::Structure s = ff::structure_from_json(ff::read_json_file(in));
    std::vector<ff::Elem> sizes{s.size};
    for (const auto& def : defs) {
        if (def.name == "rho2") {
            auto screen = ff::is_rho1_image_form(s);
            if (!screen.ok)
                std::cerr << "WARNING: input is not in rho1 image form ("
                          << screen.reasons.front() << "); applying mechanically\n";
        }
        s = ff::apply_reduction(def, s);
        sizes.push_back(s.size);
    }
    std::cout << "size chain:";
    for (ff::Elem m : sizes) std::cout << " " << m;
    std::cout << "\n";
    emit(ff::structure_to_json(s), out);
    return kOk;
}

int cmd_decode(const std::string& as, const std::string& in, const std::string& out) {
    ff::Structure s = ff::structure_from_json(ff::read_json_file(in));
    if (as == "subsetsum") {
        emit(ff::subsetsum_to_json(ff::decode_subsetsum(s)), out);
    } else if (as == "partition") {
        emit(ff::partition_to_json(ff::decode_partition(s)), out);
    } else if (as == "3sat") {
        ff::Cnf3Instance c;
        c.n = s.size;
        c.clauses = ff::clauses_of(s);
        for (auto& cl : c.clauses) std::sort(cl.begin(), cl.end());
        auto violations = ff::validate_cnf3(c);
        if (!violations.empty())
            throw ff::DomainError("structure does not encode a square 3SAT instance: " +
                                  violations.front());
        emit(ff::cnf_to_json(c), out);
    } else {
        throw ff::DomainError("unknown problem " + as);
    }
    return kOk;
}

int cmd_solve(const std::string& problem, const std::string& in) {
    ff::Json input = ff::read_json_file(in);
    bool is_structure = input.contains("size") && input.contains("relations");
    int budget = ff::subset_budget_from_env();

    ff::Json result;
    if (problem == "3sat") {
        ff::Structure s = is_structure ? ff::structure_from_json(input)
                                       : ff::encode_3sat(ff::cnf_from_json(input));
        auto a = ff::solve_3sat(s);
        result["verdict"] = a ? "satisfiable" : "unsatisfiable";
        if (a) result["witness"] = ff::assignment_to_json(*a);
    } else if (problem == "subsetsum") {
        ff::SubsetSumInstance inst = is_structure
                                         ? ff::decode_subsetsum(ff::structure_from_json(input))
                                         : ff::subsetsum_from_json(input);
        auto w = ff::solve_subsetsum(inst, budget);
        result["verdict"] = w ? "positive" : "negative";
        if (w) result["witness"] = ff::subset_witness_to_json(*w);
    } else if (problem == "partition") {
        ff::PartitionInstance inst = is_structure
                                         ? ff::decode_partition(ff::structure_from_json(input))
                                         : ff::partition_from_json(input);
        auto w = ff::solve_partition(inst, budget);
        result["verdict"] = w ? "positive" : "negative";
        if (w) result["witness"] = ff::subset_witness_to_json(*w);
    } else {
        throw ff::DomainError("unknown problem " + problem);
    }
    std::cout << result.dump(2) << "\n";
    return kOk;
}

int cmd_verify(ff::VerifyOptions opts, const std::string& report_path) {
    opts.subset_budget = ff::subset_budget_from_env();
    ff::RunReport report = ff::run_verification(opts);
    ff::write_json_file(report_path, ff::report_to_json(report));
    std::cout << "verified " << report.agg.instances << " instances: "
              << report.agg.satisfiable << " satisfiable, " << report.agg.failing_instances
              << " failing; target " << report.common_target << "\n";
    std::cout << "report written to " << report_path << "\n";
    if (!report.agg.clean()) {
        if (!report.counterexamples.empty())
            std::cerr << "first counterexample:\n"
                      << report.counterexamples.front().dump(2) << "\n";
        return kVerifyFail;
    }
    return kOk;
}

int cmd_check_projection(const std::string& def_spec, ff::Elem size, int jobs) {
    ff::ReductionDef def = load_def(def_spec);
    if (!ff::is_numeric(def.phi0)) {
        std::cout << "phi0: not numeric\n";
        return kVerifyFail;
    }
    std::cout << "phi0: numeric\n";
    for (const auto& [rel, of] : def.rel_formulas) {
        ff::ProjectionForm form;
        try {
            form = ff::classify_projection(of.formula);
        } catch (const ff::NotProjectiveError& e) {
            std::cout << rel << ": not projective: " << e.what() << "\n";
            return kVerifyFail;
        }
        auto res = ff::check_mutual_exclusion(form, size, ff::kDefaultExclusionBudget, jobs);
        if (res.status == ff::ExclusionResult::Status::Counterexample) {
            std::cout << rel << ": guards " << res.guard_i << " and " << res.guard_j
                      << " overlap at";
            for (const auto& [var, val] : res.assignment)
                std::cout << " " << var << "=" << val;
            std::cout << "\n";
            return kVerifyFail;
        }
        if (res.status == ff::ExclusionResult::Status::Undecided) {
            std::cout << rel << ": undecided at this size (budget exceeded)\n";
            return kBudget;
        }
        std::cout << rel << ": projective; " << form.alpha0.size() << " numeric disjuncts, "
                  << form.guarded.size() << " guarded literals; exclusion ok over "
                  << res.assignments_checked << " assignments\n";
    }
    return kOk;
}

int cmd_deps(const std::string& def_spec, ff::Elem size, const std::string& out,
             bool summary_only, int jobs) {
    ff::ReductionDef def = load_def(def_spec);
    ff::TableOptions opts;
    opts.jobs = jobs;
    ff::DependencyTable table = ff::build_table(def, size, opts);
    emit(ff::emit_table(table, summary_only), out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-order projection engine: 3SAT -> SUBSET-SUM -> PARTITION"};
    app.require_subcommand(1);

    std::string in, out, def_spec, problem, as, report_path = "verify-report.json";
    bool chain = false, summary_only = false, exhaustive = false;
    int samples = 0, jobs = 1;
    ff::Elem n = 2, size = 2;
    std::uint64_t seed = 42;
    std::string stage = "auto";

    auto* enc = app.add_subcommand("encode3sat", "DIMACS CNF -> <P,N> structure JSON");
    enc->add_option("input", in, "DIMACS file")->required();
    enc->add_option("output", out, "structure JSON path (- for stdout)")->required();

    auto* red = app.add_subcommand("reduce", "apply a reduction (or chain) to a structure");
    red->add_option("--def", def_spec, "rho1, rho2, a definition file, or a comma list")
        ->required();
    red->add_flag("--chain", chain, "allow a comma-separated chain of definitions");
    red->add_option("input", in, "input structure JSON")->required();
    red->add_option("output", out, "output structure JSON (- for stdout)")->required();

    auto* dec = app.add_subcommand("decode", "structure JSON -> problem instance JSON");
    dec->add_option("--as", as, "3sat | subsetsum | partition")->required();
    dec->add_option("input", in, "structure JSON")->required();
    dec->add_option("output", out, "instance JSON (- or omitted for stdout)");

    auto* sol = app.add_subcommand("solve", "brute-force oracle verdict + witness");
    sol->add_option("--problem", problem, "3sat | subsetsum | partition")->required();
    sol->add_option("input", in, "instance or structure JSON")->required();

    auto* ver = app.add_subcommand("verify", "oracle-chain equivalence and transport suite");
    ver->add_option("--n", n, "instance size (2 or 3)")->required();
    ver->add_flag("--exhaustive", exhaustive, "run every instance of this size");
    ver->add_option("--samples", samples, "run a seed-fixed sample of this many instances");
    ver->add_option("--seed", seed, "sampling seed (default 42)");
    ver->add_option("--jobs", jobs, "worker threads");
    ver->add_option("--stage", stage, "auto | rho1 | full (default auto)");
    ver->add_option("--report", report_path, "report path (default verify-report.json)");

    auto* chk = app.add_subcommand("check-projection", "classify formulas + exclusion check");
    chk->add_option("--def", def_spec, "rho1, rho2 or a definition file")->required();
    chk->add_option("--size", size, "universe size to enumerate")->required();
    chk->add_option("--jobs", jobs, "worker threads");

    auto* dep = app.add_subcommand("deps", "emit the output-bit dependency table");
    dep->add_option("--def", def_spec, "rho1, rho2 or a definition file")->required();
    dep->add_option("--size", size, "input universe size")->required();
    dep->add_option("--out", out, "output path (- for stdout)")->required();
    dep->add_flag("--summary-only", summary_only, "emit stats without entries");
    dep->add_option("--jobs", jobs, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (enc->parsed()) return cmd_encode(in, out);
        if (red->parsed()) return cmd_reduce(def_spec, chain, in, out);
        if (dec->parsed()) return cmd_decode(as, in, out);
        if (sol->parsed()) return cmd_solve(problem, in);
        if (ver->parsed()) {
            ff::VerifyOptions opts;
            opts.n = n;
            opts.samples = samples;
            opts.exhaustive = exhaustive || samples == 0;
            opts.seed = seed;
            opts.jobs = jobs;
            if (stage == "rho1")
                opts.stage = ff::VerifyStage::Rho1Only;
            else if (stage == "full")
                opts.stage = ff::VerifyStage::FullChain;
            else if (stage != "auto")
                throw ff::DomainError("unknown stage " + stage);
            return cmd_verify(opts, report_path);
        }
        if (chk->parsed()) return cmd_check_projection(def_spec, size, jobs);
        if (dep->parsed()) return cmd_deps(def_spec, size, out, summary_only, jobs);
    } catch (const ff::BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBudget;
    } catch (const ff::NotProjectiveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kVerifyFail;
    } catch (const ff::ConsistencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kVerifyFail;
    } catch (const ff::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

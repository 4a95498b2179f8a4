#ifndef FOPFORGE_VERIFY_HPP
#define FOPFORGE_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fopforge/json_io.hpp"
#include "fopforge/oracles.hpp"

namespace fopforge {

// Which part of the chain a verification run exercises. Auto follows the
// command contract: n=2 and sampled runs take the full chain through both
// reductions; exhaustive n=3 stops after the first reduction.
enum class VerifyStage { Auto, Rho1Only, FullChain };

struct VerifyOptions {
    Elem n = 2;
    bool exhaustive = true;
    int samples = 0;
    std::uint64_t seed = 42;
    int jobs = 1;
    VerifyStage stage = VerifyStage::Auto;
    int subset_budget = kDefaultSubsetBudget;

    bool full_chain() const {
        if (stage == VerifyStage::Auto) return n == 2 || !exhaustive;
        return stage == VerifyStage::FullChain;
    }
};

struct InstanceRecord {
    std::uint64_t index = 0;
    bool satisfiable = false;
    bool ok = true;
    std::vector<std::string> failures;
};

struct VerifyAggregates {
    std::uint64_t instances = 0;
    std::uint64_t satisfiable = 0;
    std::uint64_t verdict_disagreements = 0;
    std::uint64_t oracle_crosscheck_failures = 0;
    std::uint64_t digit_failures = 0;
    std::uint64_t identity_failures = 0;  // b1 = 2*Sigma - t, b2 = Sigma + t
    std::uint64_t transport_failures = 0;
    std::uint64_t image_form_failures = 0;
    std::uint64_t separation_failures = 0;
    std::uint64_t target_mismatches = 0;
    std::uint64_t failing_instances = 0;

    bool clean() const {
        return verdict_disagreements == 0 && oracle_crosscheck_failures == 0 &&
               digit_failures == 0 && identity_failures == 0 && transport_failures == 0 &&
               image_form_failures == 0 && separation_failures == 0 && target_mismatches == 0;
    }
};

struct RunReport {
    std::string command = "verify";
    VerifyOptions options;
    VerifyAggregates agg;
    std::vector<InstanceRecord> instances;  // sorted by index
    std::vector<Json> counterexamples;      // failing instances, serialized
    std::string common_target;              // decimal; identical across a run
    double elapsed_seconds = 0;             // excluded from determinism
};

// Runs the oracle-chain equivalence, digit-pattern, image-form and
// witness-transport checks over the chosen instance set.
RunReport run_verification(const VerifyOptions& opts);

// Timing lives in a separate "timing" object so reports can be compared
// net of it.
Json report_to_json(const RunReport& report);

}  // namespace fopforge

#endif

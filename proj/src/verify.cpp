#include "fopforge/verify.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <numeric>
#include <random>

namespace fopforge {

namespace {

std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
    // Rejection sampling keeps the draw unbiased and portable (no
    // implementation-defined distribution objects).
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

std::vector<std::uint64_t> pick_indices(const VerifyOptions& opts) {
    std::uint64_t total = count_3sat(opts.n);
    std::vector<std::uint64_t> indices;
    if (opts.exhaustive || (std::uint64_t)opts.samples >= total) {
        indices.resize((std::size_t)total);
        std::iota(indices.begin(), indices.end(), 0);
        return indices;
    }
    std::vector<std::uint64_t> pool((std::size_t)total);
    std::iota(pool.begin(), pool.end(), 0);
    std::mt19937_64 rng(opts.seed);
    for (int i = 0; i < opts.samples; ++i) {
        std::uint64_t j = (std::uint64_t)i + bounded_draw(rng, total - (std::uint64_t)i);
        std::swap(pool[(std::size_t)i], pool[(std::size_t)j]);
    }
    indices.assign(pool.begin(), pool.begin() + opts.samples);
    std::sort(indices.begin(), indices.end());
    return indices;
}

struct InstanceOutcome {
    InstanceRecord record;
    VerifyAggregates delta;
    std::optional<Json> counterexample;
    BigNat target;
};

std::vector<int> expected_digits(Elem n, int var_digit, int clause_digit) {
    std::vector<int> d;
    for (Elem j = 0; j < n; ++j) d.push_back(var_digit);
    for (Elem i = 0; i < n; ++i) d.push_back(clause_digit);
    return d;
}

InstanceOutcome check_instance(const VerifyOptions& opts, std::uint64_t index) {
    InstanceOutcome out;
    out.record.index = index;
    auto fail = [&](std::uint64_t VerifyAggregates::*counter, std::string what) {
        out.delta.*counter += 1;
        out.record.ok = false;
        out.record.failures.push_back(std::move(what));
    };

    const Elem n = opts.n;
    Cnf3Instance cnf = instance_3sat(n, index);
    Structure sat_in = encode_3sat(cnf);

    auto sat_witness = solve_3sat(sat_in);
    bool satisfiable = sat_witness.has_value();
    out.record.satisfiable = satisfiable;
    if (satisfiable) out.delta.satisfiable += 1;
    if (cnf_satisfiable_bruteforce(sat_in) != satisfiable)
        fail(&VerifyAggregates::oracle_crosscheck_failures,
             "solve_3sat disagrees with the clause-by-clause evaluator");

    Structure out1 = apply_reduction(rho1_def(), sat_in);
    auto image = is_rho1_image_form(out1);
    if (!image.ok)
        fail(&VerifyAggregates::image_form_failures,
             "rho1 output fails the image-form screen: " + image.reasons.front());

    SubsetSumInstance ss = decode_subsetsum(out1);
    out.target = ss.target;

    auto ss_witness = solve_subsetsum(ss, opts.subset_budget);
    if (ss_witness.has_value() != satisfiable)
        fail(&VerifyAggregates::verdict_disagreements,
             "SUBSET-SUM verdict differs from the 3SAT verdict");

    // Digit patterns over the nonzero columns: target 1..13..3, summed
    // rows 2..25..5.
    const Elem m = out1.size;
    auto anchors = rho1_nonzero_columns(n);
    if (digit_profile(ss.target, anchors, m) != expected_digits(n, 1, 3))
        fail(&VerifyAggregates::digit_failures, "target digit pattern is not 1..13..3");
    BigNat sum_rows = std::accumulate(ss.sizes.begin(), ss.sizes.end(), BigNat(0));
    if (digit_profile(sum_rows, anchors, m) != expected_digits(n, 2, 5))
        fail(&VerifyAggregates::digit_failures, "summed rows pattern is not 2..25..5");

    if (satisfiable) {
        try {
            SubsetWitness wss = transport_3sat_to_subsetsum(*sat_witness, out1);
            Assignment back = transport_subsetsum_to_3sat(wss, sat_in, out1);
            (void)back;
        } catch (const Error& e) {
            fail(&VerifyAggregates::transport_failures,
                 std::string("3SAT<->SUBSET-SUM transport failed: ") + e.what());
        }
    }

    if (opts.full_chain()) {
        Structure out2 = apply_reduction(rho2_def(), out1);
        PartitionInstance pi = decode_partition(out2);
        const Elem big = out2.size;

        auto part_witness = solve_partition(pi, opts.subset_budget);
        if (part_witness.has_value() != satisfiable)
            fail(&VerifyAggregates::verdict_disagreements,
                 "PARTITION verdict differs from the 3SAT verdict");

        // copy-stage columns keep >= 4 zero columns between them
        std::set<Elem> copy_cols;
        for (const auto& atom : out2.relation("T"))
            if (atom[0] % m == 0) copy_cols.insert(atom[1]);
        Elem prev_col = -1;
        for (Elem col : copy_cols) {
            if (prev_col >= 0 && col - prev_col < 5)
                fail(&VerifyAggregates::image_form_failures,
                     "copy-stage columns are closer than 5 apart");
            prev_col = col;
        }

        // b1 = 2*Sigma - t and b2 = Sigma + t, with Sigma the sum of the
        // copied rows and t the target rewritten at the copy anchors.
        BigNat sigma = 0;
        for (Elem id : pi.nonzero_ids())
            if (id % m == 0) sigma += pi.sizes[(std::size_t)id];
        BigNat t_out = 0;
        std::vector<Elem> out_anchors;
        auto t_digits = digit_profile(ss.target, anchors, m);
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            Elem anchor = m * anchors[i] + 4;
            out_anchors.push_back(anchor);
            t_out += BigNat(t_digits[i]) << (unsigned)(big - 1 - anchor);
        }
        const BigNat& b1 = pi.sizes[1];
        const BigNat& b2 = pi.sizes[(std::size_t)(m + 1)];
        if (b1 != 2 * sigma - t_out)
            fail(&VerifyAggregates::identity_failures, "b1 row is not 2*Sigma - t");
        if (b2 != sigma + t_out)
            fail(&VerifyAggregates::identity_failures, "b2 row is not Sigma + t");
        if (digit_profile(b1, out_anchors, big) != expected_digits(n, 3, 7))
            fail(&VerifyAggregates::digit_failures, "b1 digit pattern is not 3..37..7");
        if (digit_profile(b2, out_anchors, big) != expected_digits(n, 3, 8))
            fail(&VerifyAggregates::digit_failures, "b2 digit pattern is not 3..38..8");

        if (part_witness) {
            bool has_b1 = part_witness->ids.count(1) > 0;
            bool has_b2 = part_witness->ids.count(m + 1) > 0;
            if (has_b1 == has_b2)
                fail(&VerifyAggregates::separation_failures,
                     "b1 and b2 landed on the same side of a balanced partition");
        }

        if (satisfiable) {
            try {
                SubsetWitness wss = transport_3sat_to_subsetsum(*sat_witness, out1);
                SubsetWitness wp = transport_subsetsum_to_partition(wss, out2);
                SubsetWitness back = transport_partition_to_subsetsum(wp, out2, out1);
                (void)back;
            } catch (const Error& e) {
                fail(&VerifyAggregates::transport_failures,
                     std::string("SUBSET-SUM<->PARTITION transport failed: ") + e.what());
            }
        }
    }

    out.delta.instances += 1;
    if (!out.record.ok) {
        out.delta.failing_instances += 1;
        Json ce;
        ce["index"] = index;
        ce["instance"] = cnf_to_json(cnf);
        ce["failures"] = out.record.failures;
        out.counterexample = std::move(ce);
    }
    return out;
}

void accumulate(VerifyAggregates& agg, const VerifyAggregates& d) {
    agg.instances += d.instances;
    agg.satisfiable += d.satisfiable;
    agg.verdict_disagreements += d.verdict_disagreements;
    agg.oracle_crosscheck_failures += d.oracle_crosscheck_failures;
    agg.digit_failures += d.digit_failures;
    agg.identity_failures += d.identity_failures;
    agg.transport_failures += d.transport_failures;
    agg.image_form_failures += d.image_form_failures;
    agg.separation_failures += d.separation_failures;
    agg.target_mismatches += d.target_mismatches;
    agg.failing_instances += d.failing_instances;
}

}  // namespace

RunReport run_verification(const VerifyOptions& opts) {
    auto started = std::chrono::steady_clock::now();
    RunReport report;
    report.options = opts;

    std::vector<std::uint64_t> indices = pick_indices(opts);
    std::vector<InstanceOutcome> outcomes((std::size_t)indices.size());

    int jobs = std::max(1, opts.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < indices.size(); ++i)
            outcomes[i] = check_instance(opts, indices[i]);
    } else {
        std::vector<std::future<void>> futs;
        std::size_t chunk = (indices.size() + jobs - 1) / jobs;
        for (int t = 0; t < jobs; ++t) {
            std::size_t lo = (std::size_t)t * chunk;
            std::size_t hi = std::min(indices.size(), lo + chunk);
            if (lo >= hi) break;
            futs.push_back(std::async(std::launch::async, [&, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i)
                    outcomes[i] = check_instance(opts, indices[i]);
            }));
        }
        for (auto& f : futs) f.get();
    }

    BigNat common_target;
    bool have_target = false;
    for (auto& o : outcomes) {
        // Targets of a fixed n must coincide: the target formula is numeric.
        if (!have_target) {
            common_target = o.target;
            have_target = true;
        } else if (o.target != common_target) {
            o.delta.target_mismatches += 1;
            if (o.record.ok) {
                o.record.ok = false;
                o.delta.failing_instances += 1;
            }
            o.record.failures.push_back("target differs from the run's common target");
            if (!o.counterexample) {
                Json ce;
                ce["index"] = o.record.index;
                ce["instance"] = cnf_to_json(instance_3sat(opts.n, o.record.index));
                ce["failures"] = o.record.failures;
                o.counterexample = std::move(ce);
            }
        }
        accumulate(report.agg, o.delta);
        report.instances.push_back(std::move(o.record));
        if (o.counterexample) report.counterexamples.push_back(std::move(*o.counterexample));
    }
    report.common_target = have_target ? to_decimal(common_target) : "";

    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

Json report_to_json(const RunReport& report) {
    const VerifyOptions& o = report.options;
    Json params;
    params["n"] = o.n;
    params["mode"] = o.exhaustive ? "exhaustive" : "samples";
    if (!o.exhaustive) params["samples"] = o.samples;
    params["seed"] = o.seed;
    params["jobs"] = o.jobs;
    params["stage"] = o.full_chain() ? "full" : "rho1";
    params["subset_budget"] = o.subset_budget;

    Json agg;
    agg["instances"] = report.agg.instances;
    agg["satisfiable"] = report.agg.satisfiable;
    agg["verdict_disagreements"] = report.agg.verdict_disagreements;
    agg["oracle_crosscheck_failures"] = report.agg.oracle_crosscheck_failures;
    agg["digit_failures"] = report.agg.digit_failures;
    agg["identity_failures"] = report.agg.identity_failures;
    agg["transport_failures"] = report.agg.transport_failures;
    agg["image_form_failures"] = report.agg.image_form_failures;
    agg["separation_failures"] = report.agg.separation_failures;
    agg["target_mismatches"] = report.agg.target_mismatches;
    agg["failing_instances"] = report.agg.failing_instances;

    Json instances = Json::array();
    for (const auto& r : report.instances) {
        Json e;
        e["i"] = r.index;
        e["sat"] = r.satisfiable;
        e["ok"] = r.ok;
        if (!r.failures.empty()) e["failures"] = r.failures;
        instances.push_back(e);
    }

    Json j;
    j["command"] = report.command;
    j["params"] = params;
    j["target"] = report.common_target;
    j["aggregates"] = agg;
    j["instances"] = instances;
    j["counterexamples"] = report.counterexamples;
    j["timing"] = Json{{"seconds", report.elapsed_seconds}};
    return j;
}

}  // namespace fopforge

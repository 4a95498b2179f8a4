#include <doctest.h>

#include "fopforge/json_io.hpp"
#include "fopforge/verify.hpp"
#include "test_helpers.hpp"

using namespace fopforge;

TEST_CASE("structure JSON round trip") {
    Structure s = encode_3sat(fftest::i2_instance());
    Json j = structure_to_json(s);
    CHECK(j["size"] == 2);
    CHECK(j["dim"] == 1);
    CHECK(j["base"] == 2);
    CHECK(!j.contains("encoded"));
    Structure back = structure_from_json(j);
    CHECK(back.size == s.size);
    CHECK(back.relations == s.relations);
    CHECK(back.vocab.arity_of("P") == 2);
}

TEST_CASE("reduced structures serialize as rank lists") {
    Structure out = apply_reduction(rho1_def(), encode_3sat(fftest::i2_instance()));
    Json j = structure_to_json(out);
    CHECK(j["encoded"] == true);
    CHECK(j["dim"] == 4);
    CHECK(j["base"] == 2);
    Structure back = structure_from_json(j);
    CHECK(back.relations == out.relations);
    CHECK(back.dim == 4);
}

TEST_CASE("explicit tuple spelling decodes through unranking") {
    Json j;
    j["size"] = 16;
    j["dim"] = 4;
    j["base"] = 2;
    j["vocab"] = Json{{"relations", Json{{"W", 2}, {"L", 1}}}, {"constants", Json::array()}};
    // W atom ((0,0,1,0),(0,0,1,1)) = (2,3)
    j["relations"] = Json{{"W", Json::array({Json::array(
                              {Json::array({0, 0, 1, 0}), Json::array({0, 0, 1, 1})})})},
                          {"L", Json::array()}};
    j["constants"] = Json::object();
    Structure s = structure_from_json(j);
    CHECK(s.relation("W") == std::set<Tuple>{{2, 3}});
}

TEST_CASE("empty relations need the vocab section") {
    Json j;
    j["size"] = 4;
    j["relations"] = Json{{"W", Json::array()}};
    CHECK_THROWS_AS(structure_from_json(j), DomainError);
    j["vocab"] = Json{{"relations", Json{{"W", 2}}}, {"constants", Json::array()}};
    CHECK(structure_from_json(j).relation("W").empty());
}

TEST_CASE("instance JSON shapes") {
    Cnf3Instance c = fftest::i2_instance();
    Json j = cnf_to_json(c);
    CHECK(j["n"] == 2);
    CHECK(j["clauses"][0][0] == Json{{"var", 0}, {"neg", false}});
    Cnf3Instance back = cnf_from_json(j);
    CHECK(back.clauses == c.clauses);

    SubsetSumInstance ss;
    ss.sizes = {pow2(203), 0};
    ss.target = 4403;
    Json js = subsetsum_to_json(ss);
    CHECK(js["target"] == "4403");
    SubsetSumInstance ss2 = subsetsum_from_json(js);
    CHECK(ss2.sizes[0] == pow2(203));
    CHECK(ss2.target == 4403);

    PartitionInstance p;
    p.sizes = {1, 2, 3};
    CHECK(partition_from_json(partition_to_json(p)).sizes == p.sizes);

    CHECK_THROWS_AS(subsetsum_from_json(Json{{"sizes", Json::array({"x"})}, {"target", "0"}}),
                    DomainError);
}

TEST_CASE("witness JSON shapes") {
    Json a = assignment_to_json(Assignment{{true, false}});
    CHECK(a["kind"] == "assignment");
    CHECK(a["bits"] == Json::array({true, false}));
    Json w = subset_witness_to_json(SubsetWitness{{2, 6}});
    CHECK(w["kind"] == "subset");
    CHECK(w["ids"] == Json::array({2, 6}));
}

TEST_CASE("reduction definition files round trip through the printer") {
    for (const auto* def : builtin_defs()) {
        Json j = reduction_def_to_json(*def);
        ReductionDef back = reduction_def_from_json(j);
        CHECK(reduction_def_equal(back, *def));
    }
}

TEST_CASE("dependency table export") {
    DependencyTable t = build_table(rho1_def(), 2);
    Json j = emit_table(t);
    REQUIRE(j.is_array());
    // relations are keyed alphabetically: L first, then W
    CHECK(j[0]["relation"] == "L");
    CHECK(j[1]["relation"] == "W");
    CHECK(j[1]["stats"] == Json{{"total", 256}, {"zero", 240}, {"one", 8}, {"pos", 8}, {"neg", 0}});
    bool found = false;
    for (const auto& e : j[1]["entries"])
        if (e["out"] == Json::array({2, 11})) {
            CHECK(e["dep"] == Json{{"kind", "pos"}, {"rel", "P"}, {"at", Json::array({0, 0})}});
            found = true;
        }
    CHECK(found);

    Json summary = emit_table(t, /*summary_only=*/true);
    CHECK(!summary[0].contains("entries"));
    CHECK(summary[1]["stats"]["one"] == 8);

    // byte-determinism of the export
    CHECK(emit_table(t).dump() == emit_table(build_table(rho1_def(), 2)).dump());
}

TEST_CASE("file helpers") {
    CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), DomainError);
    CHECK_THROWS_AS(read_text_file("/nonexistent/file.txt"), DomainError);
    auto tmp = std::filesystem::temp_directory_path() / "fopforge_io_test.json";
    write_json_file(tmp, Json{{"a", 1}});
    CHECK(read_json_file(tmp)["a"] == 1);
    std::filesystem::remove(tmp);
}

TEST_CASE("verify reports are deterministic net of timing") {
    VerifyOptions opts;
    opts.n = 2;
    opts.exhaustive = true;
    Json a = report_to_json(run_verification(opts));
    Json b = report_to_json(run_verification(opts));
    VerifyOptions par = opts;
    par.jobs = 2;
    Json c = report_to_json(run_verification(par));
    a.erase("timing");
    b.erase("timing");
    c.erase("timing");
    CHECK(a.dump() == b.dump());
    // jobs affect the params block but not the verdicts
    c["params"]["jobs"] = 1;
    CHECK(a.dump() == c.dump());
}

TEST_CASE("verification catches seeded sampling") {
    VerifyOptions opts;
    opts.n = 3;
    opts.exhaustive = false;
    opts.samples = 5;
    opts.seed = 7;
    RunReport r = run_verification(opts);
    CHECK(r.agg.instances == 5);
    CHECK(r.agg.clean());
    CHECK(r.instances.size() == 5);
    // same seed, same instances
    RunReport r2 = run_verification(opts);
    for (std::size_t i = 0; i < 5; ++i) CHECK(r.instances[i].index == r2.instances[i].index);
    opts.seed = 8;
    RunReport r3 = run_verification(opts);
    bool same = true;
    for (std::size_t i = 0; i < 5; ++i)
        if (r.instances[i].index != r3.instances[i].index) same = false;
    CHECK_FALSE(same);
}

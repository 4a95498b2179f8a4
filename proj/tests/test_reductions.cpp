#include <doctest.h>

#include <numeric>

#include "fopforge/json_io.hpp"
#include "fopforge/oracles.hpp"
#include "fopforge/problems.hpp"
#include "fopforge/reductions.hpp"
#include "test_helpers.hpp"

using namespace fopforge;

namespace {

const std::set<Tuple> kI2W = {{2, 3},  {3, 3},  {6, 7},   {7, 7},   {10, 11}, {11, 11}, {14, 15},
                              {15, 15}, {2, 11}, {6, 11},  {2, 15},  {6, 15},  {3, 11},  {7, 15}};
const std::set<Tuple> kI2L = {{3}, {7}, {10}, {11}, {14}, {15}};

Structure i2_sat() { return encode_3sat(fftest::i2_instance()); }

}  // namespace

TEST_CASE("built-in definitions have the shapes the constructions fix") {
    CHECK(rho1_def().arity == 4);
    CHECK(rho2_def().arity == 2);
    CHECK(rho1_def().phi0->kind == Formula::Kind::True);
    CHECK(rho2_def().phi0->kind == Formula::Kind::True);
    CHECK(rho1_def().const_formulas.empty());
    CHECK(rho2_def().const_formulas.empty());
    CHECK(rho2_def().min_input_size == 16);
    CHECK(builtin_defs().size() == 2);
    CHECK(find_builtin("rho1") == &rho1_def());
    CHECK(find_builtin("nope") == nullptr);
}

TEST_CASE("shipped definition files reproduce the built-ins exactly") {
    auto rho1 = reduction_def_from_json(
        read_json_file(std::string(FOPFORGE_DATA_DIR) + "/rho1.json"));
    auto rho2 = reduction_def_from_json(
        read_json_file(std::string(FOPFORGE_DATA_DIR) + "/rho2.json"));
    CHECK(reduction_def_equal(rho1, rho1_def()));
    CHECK(reduction_def_equal(rho2, rho2_def()));
}

TEST_CASE("rho1 on I2 produces the worked W and L") {
    Structure out = apply_reduction(rho1_def(), i2_sat());
    CHECK(out.size == 16);
    CHECK(out.base == 2);
    CHECK(out.dim == 4);
    CHECK(out.relation("W") == kI2W);
    CHECK(out.relation("L") == kI2L);
}

TEST_CASE("rho1 with empty P and N keeps only the tag-forced atoms") {
    Structure s = make_structure(Vocabulary{{{"P", 2}, {"N", 2}}, {}}, 2, {});
    Structure out = apply_reduction(rho1_def(), s);
    std::set<Tuple> tags = {{2, 3}, {3, 3}, {6, 7}, {7, 7}, {10, 11}, {11, 11}, {14, 15}, {15, 15}};
    CHECK(out.relation("W") == tags);
    CHECK(out.relation("L") == kI2L);
}

TEST_CASE("rho2 copies W bits to the (i,0)/(j,4) grid") {
    Structure s = make_structure(Vocabulary{{{"W", 2}, {"L", 1}}, {}}, 16,
                                 {{"W", {{2, 3}}}, {"L", {}}});
    Structure out = apply_reduction(rho2_def(), s);
    CHECK(out.size == 256);
    CHECK(out.holds("T", Tuple{32, 52}));
    // no diagonal atoms, so no b1/b2 bits
    for (const auto& tup : out.relation("T")) CHECK(tup == Tuple{32, 52});
}

TEST_CASE("rho2 rejects undersized inputs") {
    Structure s = make_structure(Vocabulary{{{"W", 2}, {"L", 1}}, {}}, 4, {});
    CHECK_THROWS_AS(apply_reduction(rho2_def(), s), DomainError);
}

TEST_CASE("composition chains sizes and vocabularies") {
    auto chain = compose({&rho1_def(), &rho2_def()}, i2_sat());
    CHECK(chain.result.size == 256);
    CHECK(chain.result.vocab.has_relation("T"));
    CHECK(chain.size_chain == std::vector<Elem>{2, 16, 256});

    auto empty = compose({}, i2_sat());
    CHECK(empty.result.size == 2);
    CHECK(empty.size_chain == std::vector<Elem>{2});

    CHECK_THROWS_AS(compose({&rho2_def()}, i2_sat()), VocabularyError);
}

TEST_CASE("target_of") {
    Structure out = apply_reduction(rho1_def(), i2_sat());
    CHECK(target_of(out) == 4403);
    CHECK(target_of(out) == fftest::tag_target(2));

    Structure empty = make_structure(Vocabulary{{{"W", 2}, {"L", 1}}, {}}, 16, {});
    CHECK(target_of(empty) == 0);
    Structure lsb = make_structure(Vocabulary{{{"W", 2}, {"L", 1}}, {}}, 16,
                                   {{"L", {{15}}}});
    CHECK(target_of(lsb) == 1);
}

TEST_CASE("guard-driven application agrees with the naive scan") {
    for (const auto& cnf : enumerate_3sat(2)) {
        Structure s = encode_3sat(cnf);
        Structure fast = apply_reduction(rho1_def(), s, ApplyStrategy::GuardDriven);
        Structure slow = apply_reduction(rho1_def(), s, ApplyStrategy::Naive);
        REQUIRE(fast.relations == slow.relations);
    }
    // one n=3 instance through rho1, and its image through rho2
    Structure s3 = encode_3sat(instance_3sat(3, 4242));
    Structure f3 = apply_reduction(rho1_def(), s3, ApplyStrategy::GuardDriven);
    CHECK(f3.relations == apply_reduction(rho1_def(), s3, ApplyStrategy::Naive).relations);

    Structure img = apply_reduction(rho1_def(), i2_sat());
    CHECK(apply_reduction(rho2_def(), img, ApplyStrategy::GuardDriven).relations ==
          apply_reduction(rho2_def(), img, ApplyStrategy::Naive).relations);
}

TEST_CASE("negative literals drive the complement of the relation") {
    ReductionDef def = make_reduction_def(
        "inv", 1, Vocabulary{{{"U", 1}}, {}}, Vocabulary{{{"V", 1}}, {}}, "true",
        {{"V", "0=0 & !U(w1)"}});
    Structure s = make_structure(Vocabulary{{{"U", 1}}, {}}, 4, {{"U", {{1}, {3}}}});
    Structure out_fast = apply_reduction(def, s, ApplyStrategy::GuardDriven);
    Structure out_slow = apply_reduction(def, s, ApplyStrategy::Naive);
    CHECK(out_fast.relation("V") == std::set<Tuple>{{0}, {2}});
    CHECK(out_fast.relations == out_slow.relations);
}

TEST_CASE("literals with constant terms bind only matching tuples") {
    ReductionDef def = make_reduction_def(
        "rowzero", 1, Vocabulary{{{"U", 2}}, {}}, Vocabulary{{{"V", 1}}, {}}, "true",
        {{"V", "U(0,w1)"}});
    Structure s = make_structure(Vocabulary{{{"U", 2}}, {}}, 4,
                                 {{"U", {{0, 1}, {0, 3}, {2, 2}}}});
    Structure fast = apply_reduction(def, s, ApplyStrategy::GuardDriven);
    CHECK(fast.relation("V") == std::set<Tuple>{{1}, {3}});
    CHECK(fast.relations == apply_reduction(def, s, ApplyStrategy::Naive).relations);
}

TEST_CASE("output constants must be uniquely defined") {
    Vocabulary in{{{"U", 1}}, {}};
    Vocabulary out{{{"V", 1}}, {"c"}};
    ReductionDef good = make_reduction_def("pick", 1, in, out, "true", {{"V", "w1=0"}},
                                           {{"c", "w1=max"}});
    Structure s = make_structure(in, 5, {});
    Structure img = apply_reduction(good, s);
    CHECK(img.constants.at("c") == 4);

    ReductionDef many = make_reduction_def("many", 1, in, out, "true", {{"V", "w1=0"}},
                                           {{"c", "true"}});
    CHECK_THROWS_AS(apply_reduction(many, s), DefinitionError);
    ReductionDef none = make_reduction_def("none", 1, in, out, "true", {{"V", "w1=0"}},
                                           {{"c", "false"}});
    CHECK_THROWS_AS(apply_reduction(none, s), DefinitionError);
}

TEST_CASE("phi0 must keep the full tuple space") {
    ReductionDef def = make_reduction_def("half", 1, Vocabulary{{{"U", 1}}, {}},
                                          Vocabulary{{{"V", 1}}, {}}, "w1=0", {{"V", "false"}});
    Structure s = make_structure(Vocabulary{{{"U", 1}}, {}}, 4, {});
    CHECK_THROWS_AS(apply_reduction(def, s), DefinitionError);
}

TEST_CASE("definition validation rejects malformed input") {
    Vocabulary in{{{"U", 1}}, {}};
    Vocabulary out{{{"V", 1}}, {}};
    CHECK_THROWS_AS(make_reduction_def("x", 1, in, out, "U(w1)", {{"V", "true"}}),
                    DefinitionError);  // phi0 not numeric
    CHECK_THROWS_AS(make_reduction_def("x", 1, in, out, "true", {{"V", "q=0"}}),
                    DefinitionError);  // stray free variable
    CHECK_THROWS_AS(make_reduction_def("x", 1, in, out, "true", {}), DefinitionError);
    CHECK_THROWS_AS(make_reduction_def("x", 1, in, Vocabulary{{{"V", 3}}, {}}, "true",
                                       {{"V", "true"}}),
                    DefinitionError);  // arity-3 outputs unsupported
}

TEST_CASE("target is independent of the input relations") {
    // every choice of P,N over n=2, exhaustively
    std::vector<Tuple> cells = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    BigNat expected = fftest::tag_target(2);
    for (int pmask = 0; pmask < 16; ++pmask)
        for (int nmask = 0; nmask < 16; ++nmask) {
            std::set<Tuple> p, n;
            for (int b = 0; b < 4; ++b) {
                if (pmask >> b & 1) p.insert(cells[(std::size_t)b]);
                if (nmask >> b & 1) n.insert(cells[(std::size_t)b]);
            }
            Structure s = make_structure(Vocabulary{{{"P", 2}, {"N", 2}}, {}}, 2,
                                         {{"P", p}, {"N", n}});
            REQUIRE(target_of(apply_reduction(rho1_def(), s)) == expected);
        }
    // sampled at n=3
    std::mt19937_64 rng(4242);
    BigNat expected3 = fftest::tag_target(3);
    for (int trial = 0; trial < 25; ++trial) {
        Structure s = fftest::random_pn_structure(rng, 3);
        REQUIRE(target_of(apply_reduction(rho1_def(), s)) == expected3);
    }
}

TEST_CASE("structural facts of rho1 images") {
    for (Elem n : {2, 3}) {
        std::mt19937_64 rng(7 + (std::uint64_t)n);
        for (int trial = 0; trial < 8; ++trial) {
            std::uint64_t idx = rng() % count_3sat(n);
            Structure out = apply_reduction(rho1_def(), encode_3sat(instance_3sat(n, idx)));

            std::set<Elem> nonzero, diag;
            std::map<Elem, int> col_sum;
            for (const auto& t : out.relation("W")) {
                nonzero.insert(t[1]);
                ++col_sum[t[1]];
                if (t[0] == t[1]) diag.insert(t[1]);
            }
            // column k nonzero iff W(k,k)
            CHECK(nonzero == diag);
            // at least three zero columns between nonzero columns
            std::vector<Elem> cols(nonzero.begin(), nonzero.end());
            for (std::size_t i = 1; i < cols.size(); ++i) CHECK(cols[i] - cols[i - 1] >= 4);
            // summed column digits: 2 at variable columns, 5 at clause columns
            for (Elem j = 0; j < n; ++j) CHECK(col_sum[rho1_var_col(n, j)] == 2);
            for (Elem i = 0; i < n; ++i) CHECK(col_sum[rho1_clause_col(n, i)] == 5);
        }
    }
}

TEST_CASE("row_value reads the bit matrix") {
    Structure out = apply_reduction(rho1_def(), i2_sat());
    CHECK(row_value(out, "W", 2) == 4113);
    CHECK(row_value(out, "W", 3) == 4112);
    CHECK(row_value(out, "W", 0) == 0);
}

TEST_CASE("tag helpers match the worked example") {
    CHECK(rho1_y_row(2, 0) == 2);
    CHECK(rho1_z_row(2, 0) == 3);
    CHECK(rho1_y_row(2, 1) == 6);
    CHECK(rho1_g_row(2, 0) == 10);
    CHECK(rho1_h_row(2, 1) == 15);
    CHECK(rho1_var_col(2, 1) == 7);
    CHECK(rho1_clause_col(2, 0) == 11);
    CHECK(rho1_nonzero_columns(2) == std::vector<Elem>{3, 7, 11, 15});
}

#include <string>
#include <vector>

#include "doctest.h"
#include "jcas/channel.hpp"
#include "jcas/types.hpp"

#include "../support/oracles.hpp"

using namespace jcas;

namespace {

std::string bsc_family_json() {
    return R"({
      "x_size": 2, "y_size": 2, "z_size": 2,
      "states": ["s0", "s1"],
      "w_y": [[[0.9, 0.1], [0.1, 0.9]], [[0.6, 0.4], [0.4, 0.6]]]
    })";
}

}  // namespace

TEST_CASE("channel spec parses and aliases a missing w_z") {
    ChannelFamily fam = parse_channel_spec(bsc_family_json());
    CHECK(fam.x_size == 2);
    CHECK(fam.y_size == 2);
    CHECK(fam.z_size == 2);
    CHECK(fam.num_states() == 2);
    CHECK(fam.w_z_aliases_w_y);
    REQUIRE(fam.w_z.size() == 2);
    for (int s = 0; s < 2; ++s) {
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                CHECK(fam.w_z[s].rows[x][y] == fam.w_y[s].rows[x][y]);
            }
        }
    }
}

TEST_CASE("explicit w_z is kept distinct from w_y") {
    ChannelFamily fam = load_channel_file(jcas_test::data_file("corollary3.json"));
    CHECK_FALSE(fam.w_z_aliases_w_y);
    CHECK(fam.w_y[0].rows[0][0] == doctest::Approx(0.9));
    CHECK(fam.w_z[0].rows[0][0] == doctest::Approx(0.7));
    CHECK(fam.w_z[1].rows[1][1] == doctest::Approx(0.7));
}

TEST_CASE("serialize then parse reproduces the family bit-exactly") {
    ChannelFamily fam = load_channel_file(jcas_test::data_file("table1.json"));
    ChannelFamily again = parse_channel_spec(serialize_channel_spec(fam));
    CHECK(again.states == fam.states);
    REQUIRE(again.w_y.size() == fam.w_y.size());
    for (std::size_t s = 0; s < fam.w_y.size(); ++s) {
        CHECK(again.w_y[s].rows == fam.w_y[s].rows);
        CHECK(again.w_z[s].rows == fam.w_z[s].rows);
    }
    CHECK(again.w_z_aliases_w_y == fam.w_z_aliases_w_y);
    CHECK(channel_content_hash(again) == channel_content_hash(fam));
}

TEST_CASE("content hashes are stable for the checked-in channels") {
    CHECK(channel_content_hash(load_channel_file(jcas_test::data_file("table1.json"))) ==
          "fnv1a:4304c9cd89544f9e");
    CHECK(channel_content_hash(load_channel_file(jcas_test::data_file("table2.json"))) ==
          "fnv1a:6660d838b04c69c3");
    CHECK(channel_content_hash(load_channel_file(jcas_test::data_file("table3.json"))) ==
          "fnv1a:d2e582386dfc99c6");
    CHECK(channel_content_hash(load_channel_file(jcas_test::data_file("corollary3.json"))) ==
          "fnv1a:ba15e8f49b83f03c");
}

TEST_CASE("rows that are not stochastic are rejected, naming the row") {
    std::string bad = R"({
      "x_size": 2, "y_size": 2, "z_size": 2,
      "states": ["s0"],
      "w_y": [[[0.9, 0.2], [0.1, 0.9]]]
    })";
    CHECK_THROWS_WITH_AS(parse_channel_spec(bad),
                         doctest::Contains("row 0"), ValidationError);

    std::string negative = R"({
      "x_size": 2, "y_size": 2, "z_size": 2,
      "states": ["s0"],
      "w_y": [[[1.1, -0.1], [0.1, 0.9]]]
    })";
    CHECK_THROWS_AS(parse_channel_spec(negative), ValidationError);
}

TEST_CASE("structural errors are rejected") {
    CHECK_THROWS_AS(parse_channel_spec("not json at all"), ValidationError);
    CHECK_THROWS_AS(parse_channel_spec("[1,2,3]"), ValidationError);

    // Wrong number of state matrices.
    std::string short_wy = R"({
      "x_size": 2, "y_size": 2, "z_size": 2,
      "states": ["s0", "s1"],
      "w_y": [[[0.9, 0.1], [0.1, 0.9]]]
    })";
    CHECK_THROWS_AS(parse_channel_spec(short_wy), ValidationError);

    // Ragged matrix.
    std::string ragged = R"({
      "x_size": 2, "y_size": 2, "z_size": 2,
      "states": ["s0"],
      "w_y": [[[0.9, 0.1], [1.0]]]
    })";
    CHECK_THROWS_AS(parse_channel_spec(ragged), ValidationError);

    // Missing w_z cannot alias when the alphabets differ.
    std::string mismatched = R"({
      "x_size": 2, "y_size": 2, "z_size": 3,
      "states": ["s0"],
      "w_y": [[[0.9, 0.1], [0.1, 0.9]]]
    })";
    CHECK_THROWS_AS(parse_channel_spec(mismatched), ValidationError);

    CHECK_THROWS_AS(load_channel_file("/nonexistent/nowhere.json"), ValidationError);
}

TEST_CASE("distinguishability scan lists exactly the coinciding sensing pairs") {
    ChannelFamily fam = load_channel_file(jcas_test::data_file("table3.json"));
    CHECK(validate_distinguishability(fam).empty());

    ChannelFamily twin = jcas_test::make_aliased_family(
        {{{0.8, 0.2}, {0.2, 0.8}}, {{0.8, 0.2}, {0.2, 0.8}}});
    auto pairs = validate_distinguishability(twin);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].first == 0);
    CHECK(pairs[0].second == 1);
}

TEST_CASE("output symmetry holds for the BSC family and fails for the asymmetric tables") {
    SymmetryReport bsc = check_output_symmetry(load_channel_file(jcas_test::data_file("table2.json")));
    CHECK(bsc.symmetric);
    REQUIRE(bsc.base_input.has_value());

    // The witness permutations must align each input's sensing rows with the
    // base input's rows across every state simultaneously.
    ChannelFamily fam = load_channel_file(jcas_test::data_file("table2.json"));
    const int x0 = *bsc.base_input;
    for (int x = 0; x < fam.x_size; ++x) {
        REQUIRE(bsc.witness[x].size() == static_cast<std::size_t>(fam.z_size));
        for (int s = 0; s < fam.num_states(); ++s) {
            for (int z = 0; z < fam.z_size; ++z) {
                CHECK(fam.w_z[s].rows[x][z] ==
                      doctest::Approx(fam.w_z[s].rows[x0][bsc.witness[x][z]]).epsilon(1e-9));
            }
        }
    }

    CHECK_FALSE(check_output_symmetry(load_channel_file(jcas_test::data_file("table1.json"))).symmetric);
    CHECK_FALSE(check_output_symmetry(load_channel_file(jcas_test::data_file("corollary3.json"))).symmetric);
}

TEST_CASE("distribution validation enforces the simplex") {
    Distribution ok({0.25, 0.75});
    CHECK_NOTHROW(ok.validate());
    CHECK_THROWS_AS(Distribution({0.5, 0.6}).validate(), ValidationError);
    CHECK_THROWS_AS(Distribution({1.2, -0.2}).validate(), ValidationError);
    CHECK_THROWS_AS(Distribution(std::vector<double>{}).validate(), ValidationError);

    Distribution u = uniform_distribution(4);
    REQUIRE(u.size() == 4);
    CHECK(u[0] == doctest::Approx(0.25));

    Distribution marg = output_marginal(Distribution({0.5, 0.5}),
                                        ConditionalDistribution({{0.9, 0.1}, {0.1, 0.9}}));
    CHECK(marg[0] == doctest::Approx(0.5));
}

TEST_CASE("format_double renders deterministically and round-trips") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.0) == "0");
    const double v = 0.0477116289139;
    CHECK(std::stod(format_double(v)) == doctest::Approx(v).epsilon(1e-12));
    CHECK(format_double(v) == format_double(v));
}

#include <cmath>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "jcas/bistatic.hpp"
#include "jcas/info_measures.hpp"
#include "jcas/region_solver.hpp"
#include "jcas/types.hpp"

#include "../support/oracles.hpp"

using namespace jcas;

namespace {

constexpr double kTable3Compound = 0.0201355135507;

ExponentQuery query(const ChannelFamily& fam, const Distribution& px, double rate,
                    int grid = 60, double refine_tol = 1e-9) {
    ExponentQuery q;
    q.p_x = px;
    q.rate = rate;
    q.family = fam;
    q.grid = grid;
    q.refine_tol = refine_tol;
    return q;
}

double staircase_rate(const RegionCurve& c, double e) {
    double best = 0.0;
    for (const auto& p : c.points) {
        if (p.e >= e - 1e-9) best = std::max(best, p.r);
    }
    return best;
}

}  // namespace

TEST_CASE("rho_succ vanishes once the rate reaches the compound mutual information") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    Distribution u({0.5, 0.5});
    CHECK(rho_succ(query(table3, u, kTable3Compound)) < 1e-6);
    CHECK(rho_succ(query(table3, u, 0.05)) < 1e-6);
    CHECK(rho_succ(query(table3, u, 0.0)) > 1e-3);
}

TEST_CASE("rho_succ on a single-state family follows the divergence-plus-rate tradeoff") {
    ChannelFamily constant = jcas_test::make_aliased_family({{{0.6, 0.4}, {0.6, 0.4}}});
    Distribution u({0.5, 0.5});
    CHECK(rho_succ(query(constant, u, 0.0)) == doctest::Approx(0.0).epsilon(1e-9));

    ChannelFamily bsc = jcas_test::make_aliased_family({{{0.8, 0.2}, {0.2, 0.8}}});
    CHECK(rho_succ(query(bsc, u, 0.0)) > 1e-3);
}

TEST_CASE("exponents are non-increasing in the rate") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    Distribution u({0.5, 0.5});
    double prev_succ = kInf;
    double prev_joint = kInf;
    for (int k = 0; k <= 5; ++k) {
        double r = kTable3Compound * k / 5.0;
        double s = rho_succ(query(table3, u, r, 40));
        double j = rho_joint(query(table3, u, r, 40)).rho;
        CHECK(s <= prev_succ + 1e-7);
        CHECK(j <= prev_joint + 1e-7);
        prev_succ = s;
        prev_joint = j;
    }
}

TEST_CASE("queries are validated") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    Distribution u({0.5, 0.5});
    CHECK_THROWS_AS(rho_succ(query(table3, u, -0.01)), ValidationError);
    CHECK_THROWS_AS(rho_succ(query(table3, u, 2.0)), ValidationError);
    CHECK_THROWS_AS(rho_succ(query(table3, Distribution({1.0}), 0.0)), ValidationError);
    CHECK_THROWS_AS(rho_succ(query(table3, u, 0.0, 1)), ValidationError);

    // A ternary family blows past the combo cap at the default row grid.
    ChannelFamily ternary = jcas_test::make_aliased_family(
        {{{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}},
         {{0.6, 0.2, 0.2}, {0.2, 0.6, 0.2}, {0.2, 0.2, 0.6}}});
    Distribution u3({1.0 / 3, 1.0 / 3, 1.0 / 3});
    CHECK_THROWS_AS(rho_succ(query(ternary, u3, 0.0, 60)), UnsupportedError);
    CHECK_NOTHROW(rho_succ(query(ternary, u3, 0.0, 8)));

    ChannelFamily quaternary = jcas_test::make_aliased_family(
        {{{0.7, 0.1, 0.1, 0.1}, {0.1, 0.7, 0.1, 0.1}, {0.1, 0.1, 0.7, 0.1}, {0.1, 0.1, 0.1, 0.7}},
         {{0.4, 0.2, 0.2, 0.2}, {0.2, 0.4, 0.2, 0.2}, {0.2, 0.2, 0.4, 0.2}, {0.2, 0.2, 0.2, 0.4}}});
    Distribution u4({0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS_AS(rho_succ(query(quaternary, u4, 0.0, 8)), UnsupportedError);
}

TEST_CASE("beta is infinite at zero rate and bounded by the product kernel") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    Distribution u({0.5, 0.5});
    ConditionalDistribution mid({{0.5, 0.5}, {0.5, 0.5}});

    CHECK(beta(mid, query(table3, u, 0.0), 0) == kInf);

    // The zero-information product kernel is always feasible at R > 0, so
    // beta cannot exceed its cross-entropy against the true state.
    ExponentQuery q = query(table3, u, 0.01);
    Distribution marg = output_marginal(u, mid);
    ConditionalDistribution product({marg.probs, marg.probs});
    double ceiling = jcas_test::cross_entropy_oracle(product, table3.w_y[0], u);
    double b = beta(mid, q, 0);
    CHECK(std::isfinite(b));
    CHECK(b <= ceiling + 1e-9);

    double b_larger = beta(mid, query(table3, u, 0.015), 0);
    CHECK(b_larger <= b + 1e-9);
}

TEST_CASE("inner confusion exponent honors feasibility witnesses and emptiness") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    Distribution u({0.5, 0.5});

    // With P_hat equal to the other state's channel, that channel itself is a
    // feasible confusion candidate, so the value is at most its information.
    ConditionalDistribution w1_rows(table3.w_y[1].rows);
    double v = inner_confusion_exponent(w1_rows, query(table3, u, 0.02), 1);
    CHECK(std::isfinite(v));
    CHECK(v <= mutual_information(u, table3.w_y[0]) + 1e-6);

    // Far-apart constant-output states leave the constraint set empty.
    ChannelFamily far = jcas_test::make_aliased_family(
        {{{0.99, 0.01}, {0.99, 0.01}}, {{0.01, 0.99}, {0.01, 0.99}}});
    ConditionalDistribution w0_rows(far.w_y[0].rows);
    CHECK(inner_confusion_exponent(w0_rows, query(far, u, 1e-4), 0) == kInf);

    ChannelFamily lonely = jcas_test::make_aliased_family({{{0.8, 0.2}, {0.2, 0.8}}});
    CHECK_THROWS_AS(inner_confusion_exponent(w0_rows, query(lonely, u, 0.01), 0),
                    ValidationError);
}

TEST_CASE("rho_joint stays positive at compound capacity and dominates rho_succ") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    Distribution u({0.5, 0.5});
    ExponentQuery q = query(table3, u, kTable3Compound);

    JointExponentBreakdown b = rho_joint(q);
    CHECK(b.rho == doctest::Approx(0.0122982887413).epsilon(1e-4));
    CHECK(b.rho > 1e-3);
    CHECK(rho_succ(q) < 1e-4);
    CHECK(b.rho >= rho_succ(q));
}

TEST_CASE("joint breakdown reconstructs its own minimum") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    Distribution u({0.5, 0.5});
    ExponentQuery q = query(table3, u, 0.01);
    JointExponentBreakdown b = rho_joint(q);

    REQUIRE(b.per_state_terms.size() == 2);
    double reconstructed = kInf;
    int winner = 0;
    for (std::size_t s = 0; s < b.per_state_terms.size(); ++s) {
        double total = b.per_state_terms[s].d_term + b.per_state_terms[s].clipped_inner;
        if (total < reconstructed) {
            reconstructed = total;
            winner = static_cast<int>(s);
        }
    }
    CHECK(b.rho == doctest::Approx(reconstructed).epsilon(1e-7));

    // The winning per-state entry is internally consistent with the public
    // evaluators at its reported minimizer.
    const auto& best = b.per_state_terms[winner];
    CHECK(best.d_term ==
          doctest::Approx(conditional_kl(best.p_hat, table3.w_y[winner], u)).epsilon(1e-7));
    double inner = inner_confusion_exponent(best.p_hat, q, winner);
    double clipped = std::isfinite(inner) ? std::max(0.0, inner - q.rate) : kInf;
    CHECK(best.clipped_inner == doctest::Approx(clipped).epsilon(1e-5));

    // The overall minimizer is the winning state's minimizer.
    for (std::size_t x = 0; x < best.p_hat.rows.size(); ++x) {
        for (std::size_t y = 0; y < best.p_hat.rows[x].size(); ++y) {
            CHECK(b.minimizing_p_hat.rows[x][y] == doctest::Approx(best.p_hat.rows[x][y]));
        }
    }

    // Marginal consistency between the reported minimizer and the beta slice.
    Distribution m1 = output_marginal(u, b.minimizing_p_hat);
    Distribution m2 = output_marginal(u, best.p_hat);
    for (std::size_t y = 0; y < m1.size(); ++y) {
        CHECK(std::abs(m1[y] - m2[y]) < 1e-6);
    }
}

TEST_CASE("identical states give zero exponents once the rate covers the information") {
    ChannelFamily twin = jcas_test::make_aliased_family(
        {{{0.8, 0.2}, {0.2, 0.8}}, {{0.8, 0.2}, {0.2, 0.8}}});
    Distribution u({0.5, 0.5});
    double info = mutual_information(u, twin.w_y[0]);
    ExponentQuery q = query(twin, u, info + 0.01, 40);
    CHECK(rho_succ(q) < 1e-6);
    CHECK(rho_joint(q).rho < 1e-6);
    CHECK(rho_joint_lower_bound(q) < 1e-6);
}

TEST_CASE("corollary-8 bound sits between the successive and joint exponents") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    Distribution u({0.5, 0.5});
    for (int k = 0; k <= 4; ++k) {
        double r = kTable3Compound * k / 4.0;
        ExponentQuery q = query(table3, u, r, 40, 1e-6);
        double s = rho_succ(q);
        double bound = rho_joint_lower_bound(q);
        double j = rho_joint(q).rho;
        CHECK(s <= bound + 1e-6);
        CHECK(bound <= j + 1e-6);
    }
}

TEST_CASE("breakdown serializes to parseable JSON") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    Distribution u({0.5, 0.5});
    ExponentQuery q = query(table3, u, 0.01, 30);
    JointExponentBreakdown b = rho_joint(q);
    nlohmann::json j = nlohmann::json::parse(breakdown_to_json(b, q));
    CHECK(j.contains("rho_joint"));
    CHECK(j.contains("minimizing_p_hat"));
    CHECK(j.contains("beta"));
    REQUIRE(j.contains("per_state"));
    CHECK(j["per_state"].size() == 2);
    CHECK(j["per_state"][0].contains("divergence_term"));
    CHECK(j["per_state"][0].contains("clipped_confusion_term"));
    CHECK(j["rate_nats"].get<double>() == doctest::Approx(0.01));
}

TEST_CASE("type-enumeration oracle agrees with the continuous rho_succ") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    ChannelFamily table1 = load_channel_file(jcas_test::data_file("table1.json"));
    Distribution u({0.5, 0.5});
    Distribution skew({0.25, 0.75});

    struct Probe {
        const ChannelFamily* fam;
        Distribution px;
        double rate;
    };
    std::vector<Probe> probes = {
        {&table3, u, 0.0},
        {&table3, u, 0.01},
        {&table3, skew, 0.005},
        {&table1, u, 0.01},
    };
    for (const auto& p : probes) {
        double cont = rho_succ(query(*p.fam, p.px, p.rate));
        double brute = jcas_test::rho_succ_oracle(p.px, p.rate, *p.fam, 60);
        CHECK(std::abs(cont - brute) <= 0.02);
    }
}

TEST_CASE("type-enumeration oracle agrees with beta and the inner exponent") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    Distribution u({0.5, 0.5});
    ConditionalDistribution mid({{0.5, 0.5}, {0.5, 0.5}});
    ConditionalDistribution midpoint({{0.55, 0.45}, {0.45, 0.55}});

    double beta_cont = beta(mid, query(table3, u, 0.01), 0);
    double beta_brute = jcas_test::beta_oracle(mid, u, 0.01, table3, 0, 60);
    CHECK(std::abs(beta_cont - beta_brute) <= 0.02);

    ConditionalDistribution w0(table3.w_y[0].rows);
    double beta_cont2 = beta(w0, query(table3, u, 0.02), 1);
    double beta_brute2 = jcas_test::beta_oracle(w0, u, 0.02, table3, 1, 60);
    CHECK(std::abs(beta_cont2 - beta_brute2) <= 0.02);

    for (int s = 0; s < 2; ++s) {
        double inner_cont = inner_confusion_exponent(midpoint, query(table3, u, 0.01), s);
        double inner_brute = jcas_test::inner_confusion_oracle(midpoint, u, 0.01, table3, s, 60);
        if (std::isfinite(inner_cont) || std::isfinite(inner_brute)) {
            CHECK(std::abs(inner_cont - inner_brute) <= 0.02);
        }
    }
}

TEST_CASE("type-enumeration oracle brackets rho_joint") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    Distribution u({0.5, 0.5});
    double cont = rho_joint(query(table3, u, 0.01, 40)).rho;
    double brute = jcas_test::rho_joint_oracle(u, 0.01, table3, 40);
    CHECK(std::abs(cont - brute) <= 0.03);
}

TEST_CASE("bi-static region pair is ordered and reaches the compound rate") {
    ChannelFamily table3 = load_channel_file(jcas_test::data_file("table3.json"));
    auto [succ, joint] = bistatic_regions(table3, 8, 5, 24, 1e-7, 2);
    REQUIRE_FALSE(succ.points.empty());
    REQUIRE_FALSE(joint.points.empty());
    CHECK(succ.kind == "bi_succ");
    CHECK(joint.kind == "bi_joint");

    CHECK(succ.points.front().r == doctest::Approx(kTable3Compound).epsilon(1e-4));
    CHECK(joint.points.front().r == doctest::Approx(kTable3Compound).epsilon(1e-4));

    // D_joint contains D_succ: at every successive-scheme vertex the joint
    // staircase offers at least that rate.
    for (const auto& p : succ.points) {
        CHECK(staircase_rate(joint, p.e) >= p.r - 1e-9);
    }
    CHECK(joint.points.back().e >= succ.points.back().e - 1e-9);

    ChannelFamily twin = jcas_test::make_aliased_family(
        {{{0.8, 0.2}, {0.2, 0.8}}, {{0.8, 0.2}, {0.2, 0.8}}});
    CHECK_THROWS_AS(bistatic_regions(twin, 8, 5, 24), ValidationError);
}

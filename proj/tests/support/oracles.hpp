#ifndef TESTS_SUPPORT_ORACLES_HPP
#define TESTS_SUPPORT_ORACLES_HPP

// Brute-force reference implementations of the bi-static exponent
// minimizations, enumerating binary conditional types with a fixed row
// denominator. Deliberately written as plain nested loops over the discrete
// type grid so they stay independent of the production optimizers.

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "jcas/channel.hpp"
#include "jcas/info_measures.hpp"
#include "jcas/types.hpp"

namespace jcas_test {

inline constexpr double kOracleInf = std::numeric_limits<double>::infinity();
inline constexpr double kMarginalTol = 1e-9;
inline constexpr double kStrictRateSlack = 1e-9;  // matches the solver's I <= R - 1e-9 convention

// All binary row-stochastic matrices whose rows sit on the denominator grid.
inline std::vector<jcas::ConditionalDistribution> binary_type_grid(int denom) {
    std::vector<jcas::ConditionalDistribution> out;
    out.reserve(static_cast<std::size_t>(denom + 1) * (denom + 1));
    for (int i = 0; i <= denom; ++i) {
        for (int j = 0; j <= denom; ++j) {
            const double a = static_cast<double>(i) / denom;
            const double b = static_cast<double>(j) / denom;
            out.push_back(jcas::ConditionalDistribution({{a, 1.0 - a}, {b, 1.0 - b}}));
        }
    }
    return out;
}

// Conditional cross-entropy -sum_x p_x(x) sum_y P(y|x) ln W(y|x), which equals
// D(P || W | P_X) + H(P | P_X). Infinite when P puts conditional mass where W
// has none (and P_X(x) > 0).
inline double cross_entropy_oracle(const jcas::ConditionalDistribution& p,
                                   const jcas::ConditionalDistribution& w,
                                   const jcas::Distribution& p_x) {
    double total = 0.0;
    for (std::size_t x = 0; x < p.input_size(); ++x) {
        if (p_x[x] <= 0.0) continue;
        for (std::size_t y = 0; y < p.output_size(); ++y) {
            const double mass = p.rows[x][y];
            if (mass <= 0.0) continue;
            if (w.rows[x][y] <= 0.0) return kOracleInf;
            total += p_x[x] * mass * (-std::log(w.rows[x][y]));
        }
    }
    return total;
}

inline bool marginals_match(const jcas::Distribution& a, const jcas::Distribution& b) {
    for (std::size_t y = 0; y < a.size(); ++y) {
        if (std::abs(a[y] - b[y]) > kMarginalTol) return false;
    }
    return true;
}

// min over states s and grid P_hat of D(P_hat || W_s | P_X) + |I(P_X, P_hat) - R|+.
inline double rho_succ_oracle(const jcas::Distribution& p_x, double rate,
                              const jcas::ChannelFamily& family, int denom) {
    const auto grid = binary_type_grid(denom);
    double best = kOracleInf;
    for (const auto& p_hat : grid) {
        const double info = jcas::mutual_information(p_x, p_hat);
        for (int s = 0; s < family.num_states(); ++s) {
            const double d = jcas::conditional_kl(p_hat, family.w_y[s], p_x);
            if (!std::isfinite(d)) continue;
            const double v = d + std::max(0.0, info - rate);
            if (v < best) best = v;
        }
    }
    return best;
}

// min over grid P'' with I(P_X, P'') <= R - 1e-9 and output marginal matching
// P_X o P_hat of D(P'' || W_s | P_X) + H(P'' | P_X).
inline double beta_oracle(const jcas::ConditionalDistribution& p_hat,
                          const jcas::Distribution& p_x, double rate,
                          const jcas::ChannelFamily& family, int s, int denom) {
    const jcas::Distribution target = jcas::output_marginal(p_x, p_hat);
    const auto grid = binary_type_grid(denom);
    double best = kOracleInf;
    for (const auto& p2 : grid) {
        if (!marginals_match(jcas::output_marginal(p_x, p2), target)) continue;
        if (jcas::mutual_information(p_x, p2) > rate - kStrictRateSlack) continue;
        const double v = cross_entropy_oracle(p2, family.w_y[s], p_x);
        if (v < best) best = v;
    }
    return best;
}

// min over s' != s and grid P' in P_{s,s'}(P_hat, P_X, R) of I(P_X, P').
inline double inner_confusion_oracle(const jcas::ConditionalDistribution& p_hat,
                                     const jcas::Distribution& p_x, double rate,
                                     const jcas::ChannelFamily& family, int s, int denom) {
    const double cap = std::min(beta_oracle(p_hat, p_x, rate, family, s, denom),
                                cross_entropy_oracle(p_hat, family.w_y[s], p_x));
    const jcas::Distribution target = jcas::output_marginal(p_x, p_hat);
    const auto grid = binary_type_grid(denom);
    double best = kOracleInf;
    for (int sp = 0; sp < family.num_states(); ++sp) {
        if (sp == s) continue;
        for (const auto& p2 : grid) {
            if (!marginals_match(jcas::output_marginal(p_x, p2), target)) continue;
            if (cross_entropy_oracle(p2, family.w_y[sp], p_x) > cap + 1e-12) continue;
            const double v = jcas::mutual_information(p_x, p2);
            if (v < best) best = v;
        }
    }
    return best;
}

// min over s and grid P_hat of D + |inner - R|+, everything enumerated.
inline double rho_joint_oracle(const jcas::Distribution& p_x, double rate,
                               const jcas::ChannelFamily& family, int denom) {
    const auto grid = binary_type_grid(denom);
    double best = kOracleInf;
    for (const auto& p_hat : grid) {
        for (int s = 0; s < family.num_states(); ++s) {
            const double d = jcas::conditional_kl(p_hat, family.w_y[s], p_x);
            if (!std::isfinite(d) || d >= best) continue;
            const double inner = inner_confusion_oracle(p_hat, p_x, rate, family, s, denom);
            if (!std::isfinite(inner)) continue;
            const double v = d + std::max(0.0, inner - rate);
            if (v < best) best = v;
        }
    }
    return best;
}

// Builds a channel family in code (w_z explicit). Rows are per-state matrices.
inline jcas::ChannelFamily make_family(const std::vector<std::vector<std::vector<double>>>& wy,
                                       const std::vector<std::vector<std::vector<double>>>& wz) {
    jcas::ChannelFamily fam;
    fam.x_size = static_cast<int>(wy[0].size());
    fam.y_size = static_cast<int>(wy[0][0].size());
    fam.z_size = static_cast<int>(wz[0][0].size());
    for (std::size_t s = 0; s < wy.size(); ++s) {
        fam.states.push_back("s" + std::to_string(s));
        fam.w_y.push_back(jcas::ConditionalDistribution(wy[s]));
        fam.w_z.push_back(jcas::ConditionalDistribution(wz[s]));
    }
    fam.w_z_aliases_w_y = false;
    return fam;
}

// Same sensing and communication channel (the bi-static situation).
inline jcas::ChannelFamily make_aliased_family(
    const std::vector<std::vector<std::vector<double>>>& wy) {
    jcas::ChannelFamily fam = make_family(wy, wy);
    fam.w_z_aliases_w_y = true;
    return fam;
}

// Path to a checked-in channel spec; the build exports JCAS_DATA.
inline std::string data_file(const std::string& name) {
    const char* root = std::getenv("JCAS_DATA");
    return root ? std::string(root) + "/" + name : "tests/data/" + name;
}

}  // namespace jcas_test

#endif

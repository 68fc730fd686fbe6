#ifndef JCAS_BISTATIC_HPP
#define JCAS_BISTATIC_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jcas/channel.hpp"
#include "jcas/region_solver.hpp"
#include "jcas/types.hpp"

namespace jcas {

// One (P_X, R) evaluation request for the bi-static exponents. `grid` is the
// per-row discretization of the conditional-distribution search space and
// refine_tol the local-refinement stopping tolerance.
struct ExponentQuery {
    Distribution p_x;
    double rate = 0.0;
    ChannelFamily family;
    int grid = 60;
    double refine_tol = 1e-9;
};

struct JointExponentBreakdown {
    double rho = 0.0;
    ConditionalDistribution minimizing_p_hat;
    struct StateTerm {
        double d_term = 0.0;         // D(P_hat_s || W_s | P_X) at that state's best P_hat
        double clipped_inner = 0.0;  // |inner confusion exponent - R|^+ there
        ConditionalDistribution p_hat;
    };
    std::vector<StateTerm> per_state_terms;                // indexed by state
    std::map<std::pair<int, int>, double> beta_values;     // (per-state p_hat index, s) -> beta
};

// Successive-decoding exponent: min over s and P_hat of
// D(P_hat || W_s | P_X) + |I(P_X, P_hat) - R|^+. The objective is convex in
// P_hat, so the grid minimum is polished by exact per-coordinate searches.
double rho_succ(const ExponentQuery& q);

// beta: min of D(P'' || W_s | P_X) + H(P''|P_X) over
// {I(P_X, P'') < R, P_X o P'' = P_X o P_hat}; +infinity when infeasible.
// The strict inequality is implemented as I <= R - 1e-9 to keep the feasible
// set closed for the optimizer.
double beta(const ConditionalDistribution& p_hat, const ExponentQuery& q, int s);

// Inner confusion term of the joint exponent: min over s' != s and
// P' in P_{s,s'}(P_hat, P_X, R) of I(P_X, P'); +infinity when every
// P_{s,s'} is empty.
double inner_confusion_exponent(const ConditionalDistribution& p_hat, const ExponentQuery& q,
                                int s);

// Joint-decoding exponent with the per-state terms and beta table retained
// for reconstruction and debugging.
JointExponentBreakdown rho_joint(const ExponentQuery& q);

// Sandwich lower bound on rho_joint: partition the P_hat candidates into
// P' / P'' by comparing max_{s''} beta against D(P_hat || W_s | P_X) +
// H(P_hat | P_X), evaluate gamma_1 on P' and gamma_2 on P'', min over states.
double rho_joint_lower_bound(const ExponentQuery& q);

// Serializes a breakdown (minimizers included) for the CLI's JSON report.
std::string breakdown_to_json(const JointExponentBreakdown& b, const ExponentQuery& q);

// Bi-static frontiers: for each grid P_X and each of rate_samples rates in
// [0, min_s I(P_X, W_s)], E = min(rho, phi(P_X)); Pareto envelopes over all
// (P_X, R) pairs, successive and joint.
std::pair<RegionCurve, RegionCurve> bistatic_regions(const ChannelFamily& family,
                                                     int resolution = 0, int rate_samples = 20,
                                                     int grid = 60, double refine_tol = 1e-9,
                                                     int threads = 1);

}  // namespace jcas

#endif

#ifndef JCAS_INFO_MEASURES_HPP
#define JCAS_INFO_MEASURES_HPP

#include <functional>
#include <utility>

#include "jcas/channel.hpp"
#include "jcas/types.hpp"

namespace jcas {

// Every quantity below is in nats. Conventions: 0*log 0 = 0 and
// x*log(x/0) = +infinity for x > 0; infinities propagate through the
// minimizations instead of being clamped.

double entropy(const Distribution& p);
double binary_entropy(double p);

// KL divergence D(p||q); +infinity when p puts mass where q does not.
double kl_divergence(const Distribution& p, const Distribution& q);
double binary_kl(double p, double q);

// I(P_X, W) = H(P_X o W) - sum_x P_X(x) H(W(.|x)).
double mutual_information(const Distribution& p_x, const ConditionalDistribution& w);

// D(P_hat || W | P_X) = sum_x P_X(x) D(P_hat(.|x) || W(.|x)); zero-mass rows ignored.
double conditional_kl(const ConditionalDistribution& p_hat, const ConditionalDistribution& w,
                      const Distribution& p_x);

struct ChernoffResult {
    double value = 0.0;   // nats, >= 0 (may be +infinity for disjoint supports)
    double ell_star = 0.5;
};

// f(l) = -sum_x p_x(x) log sum_z W_s(z|x)^l W_s'(z|x)^(1-l), maximized over
// l in [0,1] by golden-section search; f is concave because each inner sum is
// log-convex in l, and f(0) = f(1) = 0.
ChernoffResult chernoff_pairwise(const Distribution& p_x, const ChannelFamily& family,
                                 int s, int s_prime, double tol = 1e-9);

// Guaranteed-correct fallback for oracle testing: dense grid over l.
ChernoffResult chernoff_pairwise_grid(const Distribution& p_x, const ChannelFamily& family,
                                      int s, int s_prime, double step = 1e-5);

// psi_s(P_X) = min_{s' != s} Chernoff(P_X, s, s').
double psi_s(const Distribution& p_x, const ChannelFamily& family, int s, double tol = 1e-9);

// phi(P_X) = min_s psi_s(P_X), the worst-pair Chernoff information of eq. (phi).
double phi(const Distribution& p_x, const ChannelFamily& family, double tol = 1e-9);

// Corollary 3 closed forms for the binary example: with alpha in [0.5, 1],
// R = h(alpha*p) - h(p) (binary convolution alpha*p) and
// E = alpha * D(Ber(1/2) || Ber(q)).
std::pair<double, double> binary_closed_forms(double alpha, double p, double q);

// Maximizes a unimodal (concave) f over [lo, hi] to interval width tol.
// Shared by the Chernoff search and the simplex refinement passes.
double golden_section_max(double lo, double hi, double tol, const std::function<double(double)>& f);

}  // namespace jcas

#endif

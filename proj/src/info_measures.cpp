#include "jcas/info_measures.hpp"

#include <cmath>

namespace jcas {

double entropy(const Distribution& p) {
    double h = 0.0;
    for (double v : p.probs)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

double binary_entropy(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
    return h;
}

double kl_divergence(const Distribution& p, const Distribution& q) {
    if (p.size() != q.size()) throw ValidationError("kl_divergence: dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return kInf;
        d += p[i] * std::log(p[i] / q[i]);
    }
    return d < 0.0 ? 0.0 : d;  // clip float negatives at p ~= q
}

double binary_kl(double p, double q) {
    return kl_divergence(Distribution({p, 1.0 - p}), Distribution({q, 1.0 - q}));
}

double mutual_information(const Distribution& p_x, const ConditionalDistribution& w) {
    if (p_x.size() != w.input_size())
        throw ValidationError("mutual_information: dimension mismatch");
    const Distribution out = output_marginal(p_x, w);
    double mi = entropy(out);
    for (std::size_t x = 0; x < w.input_size(); ++x)
        if (p_x[x] > 0.0) mi -= p_x[x] * entropy(Distribution(w.rows[x]));
    return mi < 0.0 ? 0.0 : mi;
}

double conditional_kl(const ConditionalDistribution& p_hat, const ConditionalDistribution& w,
                      const Distribution& p_x) {
    if (p_hat.input_size() != w.input_size() || p_hat.output_size() != w.output_size() ||
        p_x.size() != w.input_size())
        throw ValidationError("conditional_kl: dimension mismatch");
    double d = 0.0;
    for (std::size_t x = 0; x < p_x.size(); ++x) {
        if (p_x[x] == 0.0) continue;
        const double row = kl_divergence(Distribution(p_hat.rows[x]), Distribution(w.rows[x]));
        if (row == kInf) return kInf;
        d += p_x[x] * row;
    }
    return d;
}

double golden_section_max(double lo, double hi, double tol,
                          const std::function<double(double)>& f) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

namespace {

// f(l) for one (s, s') pair; +infinity when some positive-mass input has
// disjoint row supports (then the inner sum vanishes for every interior l).
double chernoff_objective(const Distribution& p_x, const ChannelFamily& family, int s,
                          int s_prime, double ell) {
    double total = 0.0;
    for (int x = 0; x < family.x_size; ++x) {
        if (p_x[x] == 0.0) continue;
        const auto& p = family.w_z[s].rows[x];
        const auto& q = family.w_z[s_prime].rows[x];
        double inner = 0.0;
        for (int z = 0; z < family.z_size; ++z) {
            if (ell == 0.0) {
                inner += q[z];
            } else if (ell == 1.0) {
                inner += p[z];
            } else if (p[z] > 0.0 && q[z] > 0.0) {
                inner += std::exp(ell * std::log(p[z]) + (1.0 - ell) * std::log(q[z]));
            }
        }
        if (inner <= 0.0) return kInf;
        total -= p_x[x] * std::log(inner);
    }
    return total;
}

void check_pair(const Distribution& p_x, const ChannelFamily& family, int s, int s_prime) {
    if (s == s_prime) throw ValidationError("chernoff_pairwise: s == s'");
    if (s < 0 || s_prime < 0 || s >= family.num_states() || s_prime >= family.num_states())
        throw ValidationError("chernoff_pairwise: state index out of range");
    if (static_cast<int>(p_x.size()) != family.x_size)
        throw ValidationError("chernoff_pairwise: input distribution size mismatch");
}

}  // namespace

ChernoffResult chernoff_pairwise(const Distribution& p_x, const ChannelFamily& family, int s,
                                 int s_prime, double tol) {
    check_pair(p_x, family, s, s_prime);
    auto f = [&](double ell) { return chernoff_objective(p_x, family, s, s_prime, ell); };
    if (f(0.5) == kInf) return {kInf, 0.5};
    const double ell = golden_section_max(0.0, 1.0, tol, f);
    double value = f(ell);
    if (value < 0.0) value = 0.0;
    return {value, ell};
}

ChernoffResult chernoff_pairwise_grid(const Distribution& p_x, const ChannelFamily& family,
                                      int s, int s_prime, double step) {
    check_pair(p_x, family, s, s_prime);
    ChernoffResult best{0.0, 0.0};
    const long count = std::lround(1.0 / step);
    for (long i = 0; i <= count; ++i) {
        const double ell = static_cast<double>(i) / static_cast<double>(count);
        const double v = chernoff_objective(p_x, family, s, s_prime, ell);
        if (v > best.value) best = {v, ell};
    }
    return best;
}

double psi_s(const Distribution& p_x, const ChannelFamily& family, int s, double tol) {
    if (family.num_states() < 2) throw ValidationError("psi_s: need at least two states");
    double best = kInf;
    for (int t = 0; t < family.num_states(); ++t) {
        if (t == s) continue;
        best = std::min(best, chernoff_pairwise(p_x, family, s, t, tol).value);
    }
    return best;
}

double phi(const Distribution& p_x, const ChannelFamily& family, double tol) {
    if (family.num_states() < 2) throw ValidationError("phi: need at least two states");
    double best = kInf;
    for (int s = 0; s < family.num_states(); ++s)
        for (int t = s + 1; t < family.num_states(); ++t)
            best = std::min(best, chernoff_pairwise(p_x, family, s, t, tol).value);
    return best;
}

std::pair<double, double> binary_closed_forms(double alpha, double p, double q) {
    if (!(alpha >= 0.5 && alpha <= 1.0))
        throw ValidationError("binary_closed_forms: alpha must lie in [0.5, 1]");
    if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0))
        throw ValidationError("binary_closed_forms: p and q must lie in (0, 1)");
    if (q == 0.5) throw ValidationError("binary_closed_forms: q = 0.5 carries no information");
    const double conv = alpha * (1.0 - p) + (1.0 - alpha) * p;  // alpha * p convolution
    const double rate = binary_entropy(conv) - binary_entropy(p);
    const double expo = alpha * binary_kl(0.5, q);
    return {rate < 0.0 ? 0.0 : rate, expo};
}

}  // namespace jcas

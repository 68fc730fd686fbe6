#include "jcas/region_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "jcas/info_measures.hpp"
#include "jcas/parallel.hpp"

namespace jcas {

namespace {

void require_tradeoff_family(const ChannelFamily& family) {
    if (family.num_states() < 2)
        throw ValidationError("tradeoff computation needs at least two states");
    const auto identical = validate_distinguishability(family);
    if (!identical.empty())
        throw ValidationError("indistinguishable family: states " +
                              family.states[identical[0].first] + " and " +
                              family.states[identical[0].second] + " have equal sensing channels");
}

double min_state_mi(const Distribution& p, const ChannelFamily& family) {
    double best = kInf;
    for (int s = 0; s < family.num_states(); ++s)
        best = std::min(best, mutual_information(p, family.w_y[s]));
    return best;
}

}  // namespace

int default_grid_resolution(int x_size) {
    switch (x_size) {
        case 1: return 1;
        case 2: return 200;
        case 3: return 60;
        case 4: return 24;
        default:
            throw UnsupportedError("input alphabets larger than 4 are not supported for "
                                   "frontier computation (|X| = " + std::to_string(x_size) + ")");
    }
}

std::vector<Distribution> simplex_grid(int dim, int resolution) {
    if (dim < 1) throw ValidationError("simplex_grid: dim must be >= 1");
    if (resolution < 1) throw ValidationError("simplex_grid: resolution must be >= 1");
    std::vector<Distribution> out;
    std::vector<int> counts(dim, 0);
    // enumerate compositions of `resolution` into dim parts, lexicographically
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == dim - 1) {
            counts[pos] = remaining;
            Distribution d;
            d.probs.resize(dim);
            for (int i = 0; i < dim; ++i)
                d.probs[i] = static_cast<double>(counts[i]) / static_cast<double>(resolution);
            out.push_back(std::move(d));
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            counts[pos] = k;
            rec(pos + 1, remaining - k);
        }
    };
    rec(0, resolution);
    return out;
}

CapacityResult per_state_capacity(const ChannelFamily& family, int s, double tol) {
    if (s < 0 || s >= family.num_states())
        throw ValidationError("per_state_capacity: state index out of range");
    const ConditionalDistribution& w = family.w_y[s];
    const int X = family.x_size;
    std::vector<double> p(X, 1.0 / X);
    std::vector<double> d(X, 0.0);
    const long cap = 100000;
    for (long it = 0; it < cap; ++it) {
        const Distribution out = output_marginal(Distribution(p), w);
        double mi = 0.0, dmax = 0.0;
        for (int x = 0; x < X; ++x) {
            double dx = 0.0;
            for (std::size_t y = 0; y < w.output_size(); ++y) {
                const double wy = w.rows[x][y];
                if (wy > 0.0) dx += wy * std::log(wy / out[y]);
            }
            d[x] = dx;
            mi += p[x] * dx;
            dmax = std::max(dmax, dx);
        }
        if (dmax - mi < tol) {
            CapacityResult res;
            res.value = mi < 0.0 ? 0.0 : mi;
            res.argmax_input = Distribution(p);
            res.per_state_values = {res.value};
            return res;
        }
        double norm = 0.0;
        for (int x = 0; x < X; ++x) {
            p[x] *= std::exp(d[x] - mi);  // shift by mi to keep the scale bounded
            norm += p[x];
        }
        for (int x = 0; x < X; ++x) p[x] /= norm;
    }
    throw ValidationError("Blahut-Arimoto did not converge within the iteration cap");
}

CapacityResult compound_capacity(const ChannelFamily& family, int resolution, double refine_tol) {
    if (family.num_states() < 1) throw ValidationError("compound_capacity: empty state set");
    if (resolution <= 0) resolution = default_grid_resolution(family.x_size);

    auto g = [&](const std::vector<double>& p) {
        return min_state_mi(Distribution(p), family);
    };

    std::vector<double> best;
    double best_val = -1.0;
    for (const Distribution& p : simplex_grid(family.x_size, resolution)) {
        const double v = g(p.probs);
        if (v > best_val) {
            best_val = v;
            best = p.probs;
        }
    }

    // pairwise mass-transfer refinement; g is concave so each 1-D slice is unimodal
    const int X = family.x_size;
    for (int pass = 0; pass < 100; ++pass) {
        const double before = best_val;
        for (int i = 0; i < X; ++i) {
            for (int j = i + 1; j < X; ++j) {
                const double m = best[i] + best[j];
                if (m <= 0.0) continue;
                std::vector<double> trial = best;
                auto slice = [&](double t) {
                    trial[i] = t;
                    trial[j] = m - t;
                    return g(trial);
                };
                const double t = golden_section_max(0.0, m, refine_tol, slice);
                const double v = slice(t);
                if (v > best_val) {
                    best_val = v;
                    best[i] = t;
                    best[j] = m - t;
                }
            }
        }
        if (best_val - before < refine_tol) break;
    }

    CapacityResult res;
    res.value = best_val < 0.0 ? 0.0 : best_val;
    res.argmax_input = Distribution(best);
    for (int s = 0; s < family.num_states(); ++s)
        res.per_state_values.push_back(mutual_information(res.argmax_input, family.w_y[s]));
    return res;
}

CapacityResult worst_case_capacity(const ChannelFamily& family, double tol) {
    if (family.num_states() < 1) throw ValidationError("worst_case_capacity: empty state set");
    CapacityResult res;
    res.value = kInf;
    int arg = 0;
    for (int s = 0; s < family.num_states(); ++s) {
        const CapacityResult one = per_state_capacity(family, s, tol);
        res.per_state_values.push_back(one.value);
        if (one.value < res.value) {
            res.value = one.value;
            arg = s;
            res.argmax_input = one.argmax_input;
        }
    }
    (void)arg;
    return res;
}

std::vector<RegionPoint> pareto_envelope(std::vector<RegionPoint> pts, double tol_tie) {
    if (pts.empty()) return pts;
    std::sort(pts.begin(), pts.end(), [](const RegionPoint& a, const RegionPoint& b) {
        if (a.e != b.e) return a.e < b.e;
        return a.r > b.r;
    });

    // merge E-ties within tol_tie, keeping the best rate (then the larger E)
    std::vector<RegionPoint> merged;
    std::size_t i = 0;
    while (i < pts.size()) {
        RegionPoint best = pts[i];
        const double anchor = pts[i].e;
        std::size_t j = i;
        while (j < pts.size() && pts[j].e - anchor <= tol_tie) {
            if (pts[j].r > best.r || (pts[j].r == best.r && pts[j].e > best.e)) best = pts[j];
            ++j;
        }
        merged.push_back(best);
        i = j;
    }

    // sweep from the largest E down; drop points whose rate is not materially
    // better than one already achievable at a larger exponent
    std::vector<RegionPoint> kept;
    double best_r = -kInf;
    for (auto it = merged.rbegin(); it != merged.rend(); ++it) {
        if (it->r > best_r + tol_tie) {
            kept.push_back(*it);
            best_r = it->r;
        }
    }
    std::reverse(kept.begin(), kept.end());
    return kept;
}

double RegionCurve::rate_at(double e) const {
    if (points.empty()) return 0.0;
    if (e <= points.front().e) return points.front().r;
    if (e >= points.back().e)
        return (e - points.back().e <= 1e-9) ? points.back().r : 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (e <= points[i].e) {
            const RegionPoint& a = points[i - 1];
            const RegionPoint& b = points[i];
            const double t = (e - a.e) / (b.e - a.e);
            return a.r + t * (b.r - a.r);
        }
    }
    return points.back().r;
}

RegionCurve mono_open_region(const ChannelFamily& family, int resolution, double tol,
                             int threads) {
    require_tradeoff_family(family);
    if (resolution <= 0) resolution = default_grid_resolution(family.x_size);

    const std::vector<Distribution> grid = simplex_grid(family.x_size, resolution);
    std::vector<RegionPoint> pts(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        pts[i].e = phi(grid[i], family, tol);
        pts[i].r = min_state_mi(grid[i], family);
    });

    RegionCurve curve;
    curve.points = pareto_envelope(std::move(pts));
    curve.kind = "mono_open";
    curve.grid_resolution = resolution;
    return curve;
}

RegionCurve mono_closed_inner_region(const ChannelFamily& family, int resolution, double tol,
                                     int e_samples, int threads) {
    require_tradeoff_family(family);
    if (resolution <= 0) resolution = default_grid_resolution(family.x_size);
    if (e_samples < 2) throw ValidationError("mono_closed_inner_region: need >= 2 E samples");

    const std::vector<Distribution> grid = simplex_grid(family.x_size, resolution);
    const int S = family.num_states();
    std::vector<double> phis(grid.size());
    std::vector<std::vector<double>> mis(grid.size(), std::vector<double>(S));
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        phis[i] = phi(grid[i], family, tol);
        for (int s = 0; s < S; ++s) mis[i][s] = mutual_information(grid[i], family.w_y[s]);
    });

    const double e_max = *std::max_element(phis.begin(), phis.end());
    RegionCurve curve;
    curve.kind = "mono_closed_inner";
    curve.grid_resolution = resolution;
    curve.metadata["e_samples"] = std::to_string(e_samples);
    for (int k = 0; k < e_samples; ++k) {
        const double e = e_max * static_cast<double>(k) / static_cast<double>(e_samples - 1);
        // R(E) = min_s max { I(P, W_s) : phi(P) >= E }; the per-state tuple
        // union lets each state pick its own input type independently
        double r = kInf;
        for (int s = 0; s < S; ++s) {
            double best = -1.0;
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (phis[i] >= e - 1e-12) best = std::max(best, mis[i][s]);
            r = std::min(r, best);
        }
        if (r < 0.0) continue;  // empty constraint set (cannot happen for sampled e <= e_max)
        curve.points.push_back({e, r});
    }
    return curve;
}

RegionCurve corollary3_region(double p, double q, int num_alpha) {
    if (num_alpha < 2) throw ValidationError("corollary3_region: need >= 2 alpha samples");
    std::vector<RegionPoint> pts;
    pts.reserve(num_alpha);
    for (int j = 0; j < num_alpha; ++j) {
        const double alpha = 0.5 + 0.5 * static_cast<double>(j) / static_cast<double>(num_alpha - 1);
        const auto [rate, expo] = binary_closed_forms(alpha, p, q);
        pts.push_back({expo, rate});
    }
    RegionCurve curve;
    curve.points = pareto_envelope(std::move(pts));
    curve.kind = "corollary3";
    curve.grid_resolution = num_alpha;
    curve.metadata["p"] = format_double(p);
    curve.metadata["q"] = format_double(q);
    return curve;
}

void write_region_csv(const RegionCurve& curve, std::ostream& os) {
    os << "# kind: " << curve.kind << "\n";
    os << "# resolution: " << curve.grid_resolution << "\n";
    auto hash_it = curve.metadata.find("channel_hash");
    os << "# channel_hash: " << (hash_it != curve.metadata.end() ? hash_it->second : "n/a")
       << "\n";
    for (const auto& [key, value] : curve.metadata) {
        if (key == "channel_hash") continue;
        os << "# " << key << ": " << value << "\n";
    }
    os << "E_nats,R_nats\n";
    for (const RegionPoint& pt : curve.points)
        os << format_double(pt.e) << "," << format_double(pt.r) << "\n";
}

std::string region_csv_string(const RegionCurve& curve) {
    std::ostringstream ss;
    write_region_csv(curve, ss);
    return ss.str();
}

}  // namespace jcas

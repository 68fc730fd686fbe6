#include "jcas/bistatic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "jcas/info_measures.hpp"
#include "jcas/parallel.hpp"
#include "json.hpp"

namespace jcas {
namespace {

using Mat = std::vector<std::vector<double>>;

constexpr double kStrictRateSlack = 1e-9;   // "I < R" is enforced as I <= R - this
constexpr double kCapSlack = 1e-12;         // slack on cross-entropy cap comparisons
constexpr double kMaxGridCombos = 2e7;

double clip_pos(double v) { return v > 0.0 ? v : 0.0; }

double xlog(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

void validate_family_shape(const ChannelFamily& family) {
    if (family.num_states() < 1) throw ValidationError("channel family has no states");
    if (static_cast<int>(family.w_y.size()) != family.num_states())
        throw ValidationError("w_y state count does not match the state list");
    for (int s = 0; s < family.num_states(); ++s) {
        if (static_cast<int>(family.w_y[s].input_size()) != family.x_size ||
            static_cast<int>(family.w_y[s].output_size()) != family.y_size)
            throw ValidationError("w_y matrix shape mismatch for state " + family.states[s]);
        family.w_y[s].validate("w_y state " + family.states[s]);
    }
}

// Per-query precomputed context: free input rows, log-kernels, row weights.
struct Ctx {
    const ChannelFamily* fam = nullptr;
    std::vector<double> p_x;
    std::vector<int> free_rows;  // inputs with positive mass
    int y = 0;
    double rate = 0.0;
    double refine_tol = 1e-9;
    int grid = 60;
    // logw[s][x][y]; -inf where the kernel is zero
    std::vector<std::vector<std::vector<double>>> logw;

    int num_states() const { return fam->num_states(); }

    std::vector<double> marginal(const Mat& m) const {
        std::vector<double> t(y, 0.0);
        for (int x : free_rows)
            for (int j = 0; j < y; ++j) t[j] += p_x[x] * m[x][j];
        return t;
    }

    double cond_entropy(const Mat& m) const {
        double h = 0.0;
        for (int x : free_rows) {
            double hx = 0.0;
            for (int j = 0; j < y; ++j) hx -= xlog(m[x][j]);
            h += p_x[x] * hx;
        }
        return h;
    }

    double mutual_info(const Mat& m) const {
        std::vector<double> t = marginal(m);
        double h = 0.0;
        for (int j = 0; j < y; ++j) h -= xlog(t[j]);
        return clip_pos(h - cond_entropy(m));
    }

    // Cross-entropy -sum_x p(x) sum_y m(y|x) ln w_s(y|x) = D(m||W_s|P_X) + H(m|P_X),
    // +inf when m puts mass where the kernel vanishes. Linear in m, which the
    // slice solvers rely on.
    double xent(const Mat& m, int s) const {
        double v = 0.0;
        for (int x : free_rows)
            for (int j = 0; j < y; ++j) {
                double mm = m[x][j];
                if (mm <= 0.0) continue;
                double lw = logw[s][x][j];
                if (lw == -kInf) return kInf;
                v -= p_x[x] * mm * lw;
            }
        return v;
    }

    double dterm(const Mat& m, int s) const {
        double v = 0.0;
        for (int x : free_rows)
            for (int j = 0; j < y; ++j) {
                double mm = m[x][j];
                if (mm <= 0.0) continue;
                double lw = logw[s][x][j];
                if (lw == -kInf) return kInf;
                v += p_x[x] * mm * (std::log(mm) - lw);
            }
        return clip_pos(v);
    }
};

Ctx make_ctx(const ExponentQuery& q) {
    validate_family_shape(q.family);
    if (q.family.x_size > 3 || q.family.y_size > 3)
        throw UnsupportedError("exponent solver supports |X| <= 3 and |Y| <= 3");
    if (static_cast<int>(q.p_x.probs.size()) != q.family.x_size)
        throw ValidationError("input distribution size does not match |X|");
    q.p_x.validate("query input distribution");
    if (!(q.rate >= 0.0)) throw ValidationError("rate must be non-negative");
    if (q.rate > std::log(static_cast<double>(q.family.y_size)) + 1e-9)
        throw ValidationError("rate exceeds log|Y|");
    if (q.grid < 2) throw ValidationError("row grid must be >= 2");

    Ctx c;
    c.fam = &q.family;
    c.p_x = q.p_x.probs;
    c.y = q.family.y_size;
    c.rate = q.rate;
    c.refine_tol = q.refine_tol > 0 ? q.refine_tol : 1e-9;
    c.grid = q.grid;
    for (int x = 0; x < q.family.x_size; ++x)
        if (c.p_x[x] > 0.0) c.free_rows.push_back(x);
    c.logw.resize(q.family.num_states());
    for (int s = 0; s < q.family.num_states(); ++s) {
        c.logw[s].assign(q.family.x_size, std::vector<double>(c.y, -kInf));
        for (int x = 0; x < q.family.x_size; ++x)
            for (int j = 0; j < c.y; ++j) {
                double w = q.family.w_y[s].rows[x][j];
                if (w > 0.0) c.logw[s][x][j] = std::log(w);
            }
    }
    return c;
}

std::vector<std::vector<double>> row_candidates(int y, int grid) {
    std::vector<std::vector<double>> rows;
    for (const Distribution& d : simplex_grid(y, grid)) rows.push_back(d.probs);
    return rows;
}

// Iterate every assignment of candidate rows to the free inputs.
void for_each_combo(const Ctx& c, const std::vector<std::vector<double>>& rows,
                    const std::function<void(const Mat&)>& fn) {
    const std::size_t f = c.free_rows.size();
    double total = std::pow(static_cast<double>(rows.size()), static_cast<double>(f));
    if (total > kMaxGridCombos)
        throw UnsupportedError("row-grid search space too large; lower the grid resolution");
    Mat m(c.p_x.size(), std::vector<double>(c.y, 0.0));
    std::vector<std::size_t> idx(f, 0);
    for (;;) {
        for (std::size_t i = 0; i < f; ++i) m[c.free_rows[i]] = rows[idx[i]];
        fn(m);
        std::size_t k = 0;
        while (k < f && ++idx[k] == rows.size()) idx[k++] = 0;
        if (k == f) break;
    }
}

// Scan a 1-D slot coarsely, then polish the best bracket by golden section.
// Robust for the piecewise objectives refined here.
double line_min(double lo, double hi, double tol, int scan,
                const std::function<double(double)>& f, double* best_arg) {
    if (hi - lo <= tol) {
        double mid = 0.5 * (lo + hi);
        if (best_arg) *best_arg = mid;
        return f(mid);
    }
    double best_t = lo, best_v = kInf;
    for (int i = 0; i <= scan; ++i) {
        double t = lo + (hi - lo) * i / scan;
        double v = f(t);
        if (v < best_v) {
            best_v = v;
            best_t = t;
        }
    }
    double span = (hi - lo) / scan;
    double a = std::max(lo, best_t - span), b = std::min(hi, best_t + span);
    double gm = golden_section_max(a, b, tol, [&](double t) { return -f(t); });
    double gv = f(gm);
    if (gv < best_v) {
        best_v = gv;
        best_t = gm;
    }
    if (best_arg) *best_arg = best_t;
    return best_v;
}

// ---------------------------------------------------------------------------
// Binary slice: two free rows, |Y| = 2. With the output marginal pinned the
// candidate kernel has one degree of freedom a = P(y0 | x_a); everything
// below is exact 1-D work.
// ---------------------------------------------------------------------------

struct BinSlice {
    int xa = 0, xb = 0;
    double pa = 0.0, pb = 0.0, t0 = 0.0;
    double a_lo = 0.0, a_hi = 1.0;
    double h_marg = 0.0;

    double b_of(double a) const {
        double b = (t0 - pa * a) / pb;
        return std::min(1.0, std::max(0.0, b));
    }
    double mi(double a) const {
        double b = b_of(a);
        return clip_pos(h_marg - pa * binary_entropy(a) - pb * binary_entropy(b));
    }
};

BinSlice make_bin_slice(const Ctx& c, const std::vector<double>& t) {
    BinSlice s;
    s.xa = c.free_rows[0];
    s.xb = c.free_rows[1];
    s.pa = c.p_x[s.xa];
    s.pb = c.p_x[s.xb];
    s.t0 = t[0];
    s.a_lo = std::max(0.0, (s.t0 - s.pb) / s.pa);
    s.a_hi = std::min(1.0, s.t0 / s.pa);
    if (s.a_lo > s.a_hi) s.a_lo = s.a_hi;  // float guard; the box is never empty
    s.h_marg = binary_entropy(s.t0);
    return s;
}

double bin_xent(const Ctx& c, const BinSlice& sl, double a, int s) {
    double b = sl.b_of(a);
    double v = 0.0;
    const double ma[2] = {a, 1.0 - a};
    const double mb[2] = {b, 1.0 - b};
    for (int j = 0; j < 2; ++j) {
        if (ma[j] > 0.0) {
            double lw = c.logw[s][sl.xa][j];
            if (lw == -kInf) return kInf;
            v -= sl.pa * ma[j] * lw;
        }
        if (mb[j] > 0.0) {
            double lw = c.logw[s][sl.xb][j];
            if (lw == -kInf) return kInf;
            v -= sl.pb * mb[j] * lw;
        }
    }
    return v;
}

// Largest interval [aL, aR] around the product point where I <= rate_cap;
// I is convex on the slice and zero at the product point.
void bin_rate_interval(const BinSlice& sl, double rate_cap, double* aL, double* aR) {
    double astar = std::min(sl.a_hi, std::max(sl.a_lo, sl.t0));
    auto solve_side = [&](double outer) {
        if (sl.mi(outer) <= rate_cap) return outer;
        double in = astar, out = outer;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (in + out);
            if (sl.mi(mid) <= rate_cap) in = mid; else out = mid;
        }
        return in;
    };
    *aL = solve_side(sl.a_lo);
    *aR = solve_side(sl.a_hi);
}

// min xent_s over {I <= rate - slack} on the slice: a linear objective over an
// interval, so the optimum sits at an interval end or at a kernel-support
// boundary (where xent jumps to +inf).
double bin_beta(const Ctx& c, const BinSlice& sl, int s, double rate) {
    double rate_cap = rate - kStrictRateSlack;
    if (rate_cap < 0.0) return kInf;
    double aL, aR;
    bin_rate_interval(sl, rate_cap, &aL, &aR);
    std::vector<double> cand = {aL, aR};
    for (double extra : {0.0, 1.0, sl.t0 / sl.pa, (sl.t0 - sl.pb) / sl.pa})
        if (extra >= aL - 1e-15 && extra <= aR + 1e-15)
            cand.push_back(std::min(aR, std::max(aL, extra)));
    double best = kInf;
    for (double a : cand) best = std::min(best, bin_xent(c, sl, a, s));
    return best;
}

// min I over {xent_sp <= cap} on the slice; +inf when the set is empty.
double bin_inner_pair(const Ctx& c, const BinSlice& sl, int sp, double cap, double tol) {
    if (cap == kInf) return 0.0;  // vacuous constraint; the product kernel has I = 0
    double lo = sl.a_lo, hi = sl.a_hi;
    // Zero kernel entries pin the corresponding conditional mass to zero.
    auto pin = [&](double point) {
        if (point < lo - 1e-12 || point > hi + 1e-12) {
            lo = 1.0;
            hi = 0.0;
            return;
        }
        lo = hi = std::min(hi, std::max(lo, point));
    };
    if (c.logw[sp][sl.xa][0] == -kInf) pin(0.0);
    if (lo <= hi && c.logw[sp][sl.xa][1] == -kInf) pin(1.0);
    if (lo <= hi && c.logw[sp][sl.xb][0] == -kInf) pin(sl.t0 / sl.pa);          // b = 0
    if (lo <= hi && c.logw[sp][sl.xb][1] == -kInf) pin((sl.t0 - sl.pb) / sl.pa);  // b = 1
    if (lo > hi) return kInf;
    double budget = cap + kCapSlack;
    if (hi - lo < 1e-14)
        return bin_xent(c, sl, lo, sp) <= budget ? sl.mi(lo) : kInf;
    // xent is affine and finite on [lo, hi] after pinning.
    double u = bin_xent(c, sl, lo, sp);
    double w = bin_xent(c, sl, hi, sp);
    double v = (w - u) / (hi - lo);
    double c1 = lo, c2 = hi;
    if (std::abs(v) < 1e-13) {
        if (std::min(u, w) > budget) return kInf;
    } else if (v > 0.0) {
        if (u > budget) return kInf;
        c2 = std::min(hi, lo + (budget - u) / v);
    } else {
        if (w > budget) return kInf;
        c1 = std::max(lo, lo + (budget - u) / v);
    }
    if (c1 > c2) return kInf;
    double arg = 0.0;
    double best = line_min(c1, c2, tol, 24, [&](double a) { return sl.mi(a); }, &arg);
    return std::min({best, sl.mi(c1), sl.mi(c2)});
}

// ---------------------------------------------------------------------------
// General slice machinery (three outputs or three free rows): coordinate
// descent over mass-transfer moves that preserve both the row sums and the
// output marginal.
// ---------------------------------------------------------------------------

struct Move {
    int xi, xj, y1, y2;
};

std::vector<Move> slice_moves(const Ctx& c) {
    std::vector<Move> moves;
    for (std::size_t i = 0; i < c.free_rows.size(); ++i)
        for (std::size_t j = i + 1; j < c.free_rows.size(); ++j)
            for (int y1 = 0; y1 < c.y; ++y1)
                for (int y2 = y1 + 1; y2 < c.y; ++y2)
                    moves.push_back({c.free_rows[i], c.free_rows[j], y1, y2});
    return moves;
}

// delta moves joint mass: row xi shifts delta from output y2 to y1, row xj the
// reverse, leaving the marginal untouched.
void apply_move(Mat& m, const Ctx& c, const Move& mv, double delta) {
    m[mv.xi][mv.y1] += delta / c.p_x[mv.xi];
    m[mv.xi][mv.y2] -= delta / c.p_x[mv.xi];
    m[mv.xj][mv.y1] -= delta / c.p_x[mv.xj];
    m[mv.xj][mv.y2] += delta / c.p_x[mv.xj];
    for (int x : {mv.xi, mv.xj})
        for (int j : {mv.y1, mv.y2}) m[x][j] = std::min(1.0, std::max(0.0, m[x][j]));
}

void move_box(const Mat& m, const Ctx& c, const Move& mv, double* dlo, double* dhi) {
    double pi = c.p_x[mv.xi], pj = c.p_x[mv.xj];
    *dhi = std::min(m[mv.xi][mv.y2] * pi, m[mv.xj][mv.y1] * pj);
    *dlo = -std::min(m[mv.xi][mv.y1] * pi, m[mv.xj][mv.y2] * pj);
}

Mat product_kernel(const Ctx& c, const std::vector<double>& t) {
    Mat m(c.p_x.size(), std::vector<double>(c.y, 0.0));
    for (int x : c.free_rows) m[x] = t;
    return m;
}

// Project the state-sp kernel onto the fixed-marginal slice by iterative
// proportional fitting; returns false when the scheme stalls.
bool project_to_slice(const Ctx& c, int sp, const std::vector<double>& t, Mat* out) {
    Mat m = product_kernel(c, t);
    for (int x : c.free_rows)
        for (int j = 0; j < c.y; ++j)
            m[x][j] = 0.99 * c.fam->w_y[sp].rows[x][j] + 0.01 * m[x][j];
    for (int x : c.free_rows) {
        double rs = 0.0;
        for (int j = 0; j < c.y; ++j) {
            if (t[j] <= 0.0) m[x][j] = 0.0;
            rs += m[x][j];
        }
        if (rs <= 0.0) return false;
        for (int j = 0; j < c.y; ++j) m[x][j] /= rs;
    }
    for (int it = 0; it < 400; ++it) {
        std::vector<double> mt = c.marginal(m);
        double worst = 0.0;
        for (int j = 0; j < c.y; ++j) worst = std::max(worst, std::abs(mt[j] - t[j]));
        if (worst < 1e-13) {
            *out = m;
            return true;
        }
        for (int x : c.free_rows) {
            double rs = 0.0;
            for (int j = 0; j < c.y; ++j) {
                if (mt[j] > 0.0) m[x][j] *= t[j] / mt[j];
                rs += m[x][j];
            }
            if (rs <= 0.0) return false;
            for (int j = 0; j < c.y; ++j) m[x][j] /= rs;
        }
    }
    return false;
}

// Coordinate descent minimizing the linear functional xent_s over the slice.
double cd_linear(const Ctx& c, const std::vector<Move>& moves, Mat& m, int s) {
    double cur = c.xent(m, s);
    for (int pass = 0; pass < 200; ++pass) {
        double improved = 0.0;
        for (const Move& mv : moves) {
            double dlo, dhi;
            move_box(m, c, mv, &dlo, &dhi);
            if (dhi - dlo < 1e-15) continue;
            double best_d = 0.0, best_v = cur;
            for (double d : {dlo, dhi}) {
                Mat probe = m;
                apply_move(probe, c, mv, d);
                double v = c.xent(probe, s);
                if (v < best_v - 1e-15) {
                    best_v = v;
                    best_d = d;
                }
            }
            if (best_d != 0.0) {
                apply_move(m, c, mv, best_d);
                improved += cur - best_v;
                cur = best_v;
            }
        }
        if (improved < c.refine_tol * 1e-3) break;
    }
    return cur;
}

// Coordinate descent minimizing xent_s subject to I <= rate_cap. Mutual
// information is convex along each move, so the feasible delta range is an
// interval found by bisection from the feasible current point.
double cd_beta(const Ctx& c, const std::vector<Move>& moves, Mat& m, int s,
               double rate_cap) {
    double cur = c.xent(m, s);
    for (int pass = 0; pass < 200; ++pass) {
        double improved = 0.0;
        for (const Move& mv : moves) {
            double dlo, dhi;
            move_box(m, c, mv, &dlo, &dhi);
            if (dhi - dlo < 1e-15) continue;
            auto mi_at = [&](double d) {
                Mat probe = m;
                apply_move(probe, c, mv, d);
                return c.mutual_info(probe);
            };
            auto solve_side = [&](double outer) {
                if (mi_at(outer) <= rate_cap) return outer;
                double in = 0.0, out = outer;
                for (int it = 0; it < 70; ++it) {
                    double mid = 0.5 * (in + out);
                    if (mi_at(mid) <= rate_cap) in = mid; else out = mid;
                }
                return in;
            };
            double dL = solve_side(dlo), dR = solve_side(dhi);
            double best_d = 0.0, best_v = cur;
            for (double d : {dL, dR}) {
                Mat probe = m;
                apply_move(probe, c, mv, d);
                double v = c.xent(probe, s);
                if (v < best_v - 1e-15) {
                    best_v = v;
                    best_d = d;
                }
            }
            if (best_d != 0.0) {
                apply_move(m, c, mv, best_d);
                improved += cur - best_v;
                cur = best_v;
            }
        }
        if (improved < c.refine_tol * 1e-3) break;
    }
    return cur;
}

// Coordinate descent minimizing I subject to xent_sp <= cap (affine in the
// move parameter, so the feasible range is again an interval).
double cd_inner(const Ctx& c, const std::vector<Move>& moves, Mat& m, int sp,
                double cap, double tol) {
    double cur = c.mutual_info(m);
    double budget = cap + kCapSlack;
    for (int pass = 0; pass < 200; ++pass) {
        double improved = 0.0;
        for (const Move& mv : moves) {
            double dlo, dhi;
            move_box(m, c, mv, &dlo, &dhi);
            if (dhi - dlo < 1e-15) continue;
            auto xe_at = [&](double d) {
                Mat probe = m;
                apply_move(probe, c, mv, d);
                return c.xent(probe, sp);
            };
            auto solve_side = [&](double outer) {
                if (xe_at(outer) <= budget) return outer;
                double in = 0.0, out = outer;
                for (int it = 0; it < 70; ++it) {
                    double mid = 0.5 * (in + out);
                    if (xe_at(mid) <= budget) in = mid; else out = mid;
                }
                return in;
            };
            double dL = solve_side(dlo), dR = solve_side(dhi);
            if (dR - dL < 1e-15) continue;
            double best_d = 0.0;
            double best_v = line_min(dL, dR, tol, 24,
                                     [&](double d) {
                                         Mat probe = m;
                                         apply_move(probe, c, mv, d);
                                         return c.mutual_info(probe);
                                     },
                                     &best_d);
            if (best_v < cur - 1e-15 && best_d != 0.0) {
                apply_move(m, c, mv, best_d);
                improved += cur - best_v;
                cur = best_v;
            }
        }
        if (improved < tol * 1e-3) break;
    }
    return cur;
}

double beta_general(const Ctx& c, const std::vector<double>& t, int s, double rate) {
    double rate_cap = rate - kStrictRateSlack;
    if (rate_cap < 0.0) return kInf;
    std::vector<Move> moves = slice_moves(c);
    std::vector<Mat> seeds;
    seeds.push_back(product_kernel(c, t));
    for (int sp = 0; sp < c.num_states(); ++sp) {
        Mat proj;
        if (!project_to_slice(c, sp, t, &proj)) continue;
        if (c.mutual_info(proj) > rate_cap) {
            // Pull toward the product kernel until the rate constraint holds.
            double lam = 0.0, hi = 1.0;  // weight on proj
            Mat base = product_kernel(c, t);
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lam + hi);
                Mat mix = base;
                for (int x : c.free_rows)
                    for (int j = 0; j < c.y; ++j)
                        mix[x][j] = (1.0 - mid) * base[x][j] + mid * proj[x][j];
                if (c.mutual_info(mix) <= rate_cap) lam = mid; else hi = mid;
            }
            for (int x : c.free_rows)
                for (int j = 0; j < c.y; ++j)
                    proj[x][j] = (1.0 - lam) * t[j] + lam * proj[x][j];
        }
        seeds.push_back(std::move(proj));
    }
    double best = kInf;
    for (Mat& seed : seeds) best = std::min(best, cd_beta(c, moves, seed, s, rate_cap));
    return best;
}

double inner_pair_general(const Ctx& c, const std::vector<double>& t, int sp,
                          double cap, double tol) {
    if (cap == kInf) return 0.0;
    std::vector<Move> moves = slice_moves(c);
    // First find how small xent_sp can get on the slice.
    std::vector<Mat> xseeds;
    xseeds.push_back(product_kernel(c, t));
    {
        Mat proj;
        if (project_to_slice(c, sp, t, &proj)) xseeds.push_back(std::move(proj));
    }
    double xmin = kInf;
    Mat xarg = xseeds.front();
    for (Mat& seed : xseeds) {
        Mat work = seed;
        double v = cd_linear(c, moves, work, sp);
        if (v < xmin) {
            xmin = v;
            xarg = std::move(work);
        }
    }
    if (xmin > cap + kCapSlack) return kInf;
    std::vector<Mat> seeds;
    seeds.push_back(std::move(xarg));
    Mat prod = product_kernel(c, t);
    if (c.xent(prod, sp) <= cap + kCapSlack) seeds.push_back(std::move(prod));
    double best = kInf;
    for (Mat& seed : seeds) best = std::min(best, cd_inner(c, moves, seed, sp, cap, tol));
    return best;
}

// ---------------------------------------------------------------------------
// Dispatchers: exact binary slice when possible, coordinate descent otherwise.
// ---------------------------------------------------------------------------

bool binary_slice_applies(const Ctx& c) {
    return c.y == 2 && c.free_rows.size() == 2;
}

double beta_impl(const Ctx& c, const Mat& p_hat, int s) {
    if (c.rate - kStrictRateSlack < 0.0) return kInf;
    std::vector<double> t = c.marginal(p_hat);
    if (c.free_rows.size() == 1) {
        // The slice holds a single kernel (the product one) and it carries
        // zero rate, so it is always feasible.
        Mat prod = product_kernel(c, t);
        return c.xent(prod, s);
    }
    if (binary_slice_applies(c)) return bin_beta(c, make_bin_slice(c, t), s, c.rate);
    return beta_general(c, t, s, c.rate);
}

// min over s' != s of the minimal I on the slice subject to the cap.
double inner_impl(const Ctx& c, const Mat& p_hat, int s, double cap) {
    double best = kInf;
    std::vector<double> t = c.marginal(p_hat);
    for (int sp = 0; sp < c.num_states(); ++sp) {
        if (sp == s) continue;
        double v;
        if (c.free_rows.size() == 1) {
            Mat prod = product_kernel(c, t);
            v = (c.xent(prod, sp) <= cap + kCapSlack) ? 0.0 : kInf;
        } else if (binary_slice_applies(c)) {
            v = bin_inner_pair(c, make_bin_slice(c, t), sp, cap, c.refine_tol);
        } else {
            v = inner_pair_general(c, t, sp, cap, c.refine_tol);
        }
        best = std::min(best, v);
    }
    return best;
}

double succ_objective(const Ctx& c, const Mat& p_hat, int s) {
    double d = c.dterm(p_hat, s);
    if (d == kInf) return kInf;
    return d + clip_pos(c.mutual_info(p_hat) - c.rate);
}

double joint_objective(const Ctx& c, const Mat& p_hat, int s) {
    double d = c.dterm(p_hat, s);
    if (d == kInf) return kInf;
    double cap = std::min(beta_impl(c, p_hat, s), c.xent(p_hat, s));
    double inner = inner_impl(c, p_hat, s, cap);
    return d + clip_pos(inner - c.rate);
}

// Corollary-8 objective; betas must hold beta(p_hat, q, s'') for every state.
double bound_objective_with_betas(const Ctx& c, const Mat& p_hat, int s,
                                  const std::vector<double>& betas) {
    double d = c.dterm(p_hat, s);
    if (d == kInf) return kInf;
    double xe = c.xent(p_hat, s);
    double beta_max = -kInf;
    for (double b : betas) beta_max = std::max(beta_max, b);
    if (beta_max >= xe) return d + clip_pos(c.mutual_info(p_hat) - c.rate);
    std::vector<double> t = c.marginal(p_hat);
    double h_out = 0.0;
    for (double ty : t) h_out -= xlog(ty);
    return d + clip_pos(d + h_out - betas[s] - c.rate);
}

double bound_objective(const Ctx& c, const Mat& p_hat, int s) {
    std::vector<double> betas(c.num_states());
    for (int sq = 0; sq < c.num_states(); ++sq) betas[sq] = beta_impl(c, p_hat, sq);
    return bound_objective_with_betas(c, p_hat, s, betas);
}

// Refine a candidate by per-row mass transfers between output pairs.
double refine_rows(const Ctx& c, Mat& m, const std::function<double(const Mat&)>& obj,
                   double tol) {
    double cur = obj(m);
    for (int pass = 0; pass < 40; ++pass) {
        double improved = 0.0;
        for (int x : c.free_rows) {
            for (int y1 = 0; y1 < c.y; ++y1)
                for (int y2 = y1 + 1; y2 < c.y; ++y2) {
                    double total = m[x][y1] + m[x][y2];
                    if (total <= 0.0) continue;
                    double arg = m[x][y1];
                    double v = line_min(0.0, total, tol, 48,
                                        [&](double tpt) {
                                            Mat probe = m;
                                            probe[x][y1] = tpt;
                                            probe[x][y2] = total - tpt;
                                            return obj(probe);
                                        },
                                        &arg);
                    if (v < cur - 1e-15) {
                        m[x][y1] = arg;
                        m[x][y2] = total - arg;
                        improved += cur - v;
                        cur = v;
                    }
                }
        }
        if (improved < tol * 1e-2) break;
    }
    return cur;
}

struct StateScan {
    double value = kInf;
    Mat argmin;
};

// Grid scan keeping the per-state best candidate, then row-wise refinement.
std::vector<StateScan> scan_and_refine(
    const Ctx& c, const std::function<void(const Mat&, std::vector<double>&)>& eval_all,
    const std::function<double(const Mat&, int)>& eval_one) {
    const int S = c.num_states();
    std::vector<StateScan> per_state(S);
    auto rows = row_candidates(c.y, c.grid);
    std::vector<double> vals(S);
    for_each_combo(c, rows, [&](const Mat& m) {
        eval_all(m, vals);
        for (int s = 0; s < S; ++s) {
            if (vals[s] < per_state[s].value) {
                per_state[s].value = vals[s];
                per_state[s].argmin = m;
            }
        }
    });
    for (int s = 0; s < S; ++s) {
        if (per_state[s].argmin.empty()) continue;
        Mat m = per_state[s].argmin;
        double v = refine_rows(c, m, [&](const Mat& mm) { return eval_one(mm, s); },
                               c.refine_tol);
        if (v < per_state[s].value) {
            per_state[s].value = v;
            per_state[s].argmin = std::move(m);
        }
    }
    return per_state;
}

ConditionalDistribution mat_to_cond(const Ctx& c, const Mat& m, int s_fill) {
    ConditionalDistribution cd;
    cd.rows = m;
    // Zero-mass inputs carry no conditional type; report the channel row there.
    for (std::size_t x = 0; x < c.p_x.size(); ++x)
        if (c.p_x[x] <= 0.0) cd.rows[x] = c.fam->w_y[s_fill].rows[x];
    return cd;
}

void validate_p_hat(const Ctx& c, const ConditionalDistribution& p_hat) {
    if (static_cast<int>(p_hat.rows.size()) != static_cast<int>(c.p_x.size()))
        throw ValidationError("conditional type has wrong number of rows");
    for (int x : c.free_rows) {
        if (static_cast<int>(p_hat.rows[x].size()) != c.y)
            throw ValidationError("conditional type has wrong row width");
        Distribution row(p_hat.rows[x]);
        row.validate("conditional type row");
    }
}

}  // namespace

double rho_succ(const ExponentQuery& q) {
    Ctx c = make_ctx(q);
    auto per_state = scan_and_refine(
        c,
        [&](const Mat& m, std::vector<double>& vals) {
            for (int s = 0; s < c.num_states(); ++s) vals[s] = succ_objective(c, m, s);
        },
        [&](const Mat& m, int s) { return succ_objective(c, m, s); });
    double best = kInf;
    for (const StateScan& ss : per_state) best = std::min(best, ss.value);
    return best;
}

double beta(const ConditionalDistribution& p_hat, const ExponentQuery& q, int s) {
    Ctx c = make_ctx(q);
    if (s < 0 || s >= c.num_states()) throw ValidationError("state index out of range");
    validate_p_hat(c, p_hat);
    return beta_impl(c, p_hat.rows, s);
}

double inner_confusion_exponent(const ConditionalDistribution& p_hat,
                                const ExponentQuery& q, int s) {
    Ctx c = make_ctx(q);
    if (c.num_states() < 2)
        throw ValidationError("inner confusion exponent needs at least two states");
    if (s < 0 || s >= c.num_states()) throw ValidationError("state index out of range");
    validate_p_hat(c, p_hat);
    double cap = std::min(beta_impl(c, p_hat.rows, s), c.xent(p_hat.rows, s));
    return inner_impl(c, p_hat.rows, s, cap);
}

JointExponentBreakdown rho_joint(const ExponentQuery& q) {
    Ctx c = make_ctx(q);
    if (c.num_states() < 2) throw ValidationError("rho_joint needs at least two states");
    auto per_state = scan_and_refine(
        c,
        [&](const Mat& m, std::vector<double>& vals) {
            for (int s = 0; s < c.num_states(); ++s) vals[s] = joint_objective(c, m, s);
        },
        [&](const Mat& m, int s) { return joint_objective(c, m, s); });

    JointExponentBreakdown out;
    out.rho = kInf;
    int best_state = -1;
    for (int s = 0; s < c.num_states(); ++s) {
        JointExponentBreakdown::StateTerm term;
        if (per_state[s].argmin.empty()) {
            term.d_term = kInf;
            term.clipped_inner = 0.0;
            term.p_hat.rows = c.fam->w_y[s].rows;
        } else {
            const Mat& m = per_state[s].argmin;
            term.d_term = c.dterm(m, s);
            double cap = std::min(beta_impl(c, m, s), c.xent(m, s));
            term.clipped_inner = clip_pos(inner_impl(c, m, s, cap) - c.rate);
            term.p_hat = mat_to_cond(c, m, s);
            for (int sp = 0; sp < c.num_states(); ++sp)
                out.beta_values[{s, sp}] = beta_impl(c, m, sp);
        }
        out.per_state_terms.push_back(std::move(term));
        if (per_state[s].value < out.rho) {
            out.rho = per_state[s].value;
            best_state = s;
        }
    }
    if (best_state >= 0 && !per_state[best_state].argmin.empty())
        out.minimizing_p_hat = mat_to_cond(c, per_state[best_state].argmin, best_state);
    return out;
}

double rho_joint_lower_bound(const ExponentQuery& q) {
    Ctx c = make_ctx(q);
    if (c.num_states() < 2)
        throw ValidationError("rho_joint_lower_bound needs at least two states");
    std::vector<double> betas(c.num_states());
    auto per_state = scan_and_refine(
        c,
        [&](const Mat& m, std::vector<double>& vals) {
            for (int sq = 0; sq < c.num_states(); ++sq) betas[sq] = beta_impl(c, m, sq);
            for (int s = 0; s < c.num_states(); ++s)
                vals[s] = bound_objective_with_betas(c, m, s, betas);
        },
        [&](const Mat& m, int s) { return bound_objective(c, m, s); });
    double best = kInf;
    for (const StateScan& ss : per_state) best = std::min(best, ss.value);
    return best;
}

std::string breakdown_to_json(const JointExponentBreakdown& b, const ExponentQuery& q) {
    nlohmann::json j;
    auto num_or_inf = [](double v) {
        return v == kInf ? nlohmann::json("inf") : nlohmann::json(v);
    };
    j["rho_joint"] = num_or_inf(b.rho);
    j["rate_nats"] = q.rate;
    j["input_distribution"] = q.p_x.probs;
    j["row_grid"] = q.grid;
    nlohmann::json terms = nlohmann::json::array();
    for (std::size_t s = 0; s < b.per_state_terms.size(); ++s) {
        const auto& t = b.per_state_terms[s];
        nlohmann::json js;
        js["state"] =
            s < q.family.states.size() ? q.family.states[s] : std::to_string(s);
        js["divergence_term"] = num_or_inf(t.d_term);
        js["clipped_confusion_term"] = num_or_inf(t.clipped_inner);
        js["total"] = num_or_inf(t.d_term + t.clipped_inner);
        js["p_hat"] = t.p_hat.rows;
        terms.push_back(std::move(js));
    }
    j["per_state"] = std::move(terms);
    nlohmann::json betas = nlohmann::json::object();
    for (const auto& [key, val] : b.beta_values) {
        std::string name = std::to_string(key.first) + "->" + std::to_string(key.second);
        betas[name] = num_or_inf(val);
    }
    j["beta"] = std::move(betas);
    j["minimizing_p_hat"] = b.minimizing_p_hat.rows;
    return j.dump(2);
}

std::pair<RegionCurve, RegionCurve> bistatic_regions(const ChannelFamily& family,
                                                     int resolution, int rate_samples,
                                                     int grid, double refine_tol,
                                                     int threads) {
    validate_family_shape(family);
    if (family.num_states() < 2)
        throw ValidationError("bi-static regions need at least two states");
    if (family.x_size > 3 || family.y_size > 3)
        throw UnsupportedError("bi-static region solver supports |X| <= 3 and |Y| <= 3");
    if (rate_samples < 2) throw ValidationError("rate_samples must be >= 2");
    // Detection happens through Y here, so distinguishability and the Chernoff
    // cap are both taken on the communication kernels.
    for (int s = 0; s < family.num_states(); ++s)
        for (int t = s + 1; t < family.num_states(); ++t) {
            bool same = true;
            for (int x = 0; x < family.x_size && same; ++x)
                for (int j = 0; j < family.y_size && same; ++j)
                    if (std::abs(family.w_y[s].rows[x][j] - family.w_y[t].rows[x][j]) > 1e-12)
                        same = false;
            if (same)
                throw ValidationError("states " + family.states[s] + " and " +
                                      family.states[t] +
                                      " are indistinguishable through the channel output");
        }
    ChannelFamily sensing_view = family;
    sensing_view.w_z = family.w_y;
    sensing_view.z_size = family.y_size;
    sensing_view.w_z_aliases_w_y = true;

    int input_res = resolution > 0 ? resolution : default_grid_resolution(family.x_size);
    std::vector<Distribution> inputs = simplex_grid(family.x_size, input_res);
    struct PointPair {
        std::vector<RegionPoint> succ, joint;
    };
    std::vector<PointPair> results(inputs.size());

    parallel_for(inputs.size(), threads, [&](std::size_t i) {
        const Distribution& px = inputs[i];
        double sensing = phi(px, sensing_view);
        double i_min = kInf;
        for (int s = 0; s < family.num_states(); ++s)
            i_min = std::min(i_min, mutual_information(px, family.w_y[s]));
        PointPair& pp = results[i];
        for (int k = 0; k < rate_samples; ++k) {
            double r = i_min * k / (rate_samples - 1);
            ExponentQuery qq;
            qq.p_x = px;
            qq.rate = r;
            qq.family = family;
            qq.grid = grid;
            qq.refine_tol = refine_tol;
            double e_succ = std::min(rho_succ(qq), sensing);
            double e_joint = std::min(rho_joint(qq).rho, sensing);
            pp.succ.push_back({e_succ, r});
            pp.joint.push_back({e_joint, r});
        }
    });

    std::vector<RegionPoint> succ_pts, joint_pts;
    for (const PointPair& pp : results) {
        succ_pts.insert(succ_pts.end(), pp.succ.begin(), pp.succ.end());
        joint_pts.insert(joint_pts.end(), pp.joint.begin(), pp.joint.end());
    }
    RegionCurve succ;
    succ.points = pareto_envelope(std::move(succ_pts));
    succ.kind = "bi_succ";
    succ.grid_resolution = input_res;
    succ.metadata["row_grid"] = std::to_string(grid);
    succ.metadata["rate_samples"] = std::to_string(rate_samples);
    RegionCurve joint;
    joint.points = pareto_envelope(std::move(joint_pts));
    joint.kind = "bi_joint";
    joint.grid_resolution = input_res;
    joint.metadata["row_grid"] = std::to_string(grid);
    joint.metadata["rate_samples"] = std::to_string(rate_samples);
    return {std::move(succ), std::move(joint)};
}

}  // namespace jcas

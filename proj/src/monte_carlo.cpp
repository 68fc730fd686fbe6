#include "jcas/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "jcas/parallel.hpp"
#include "jcas/rng.hpp"
#include "json.hpp"

namespace jcas {
namespace {

using Counts = std::vector<std::vector<std::int64_t>>;

constexpr double kWilsonZ = 1.959963984540054;  // 95% two-sided normal quantile
constexpr double kLikelihoodTableCap = 1e7;     // M * |S| entries for simulate_bistatic

void check_family(const ChannelFamily& family) {
    if (family.num_states() < 1) throw ValidationError("channel family has no states");
    if (static_cast<int>(family.w_y.size()) != family.num_states() ||
        static_cast<int>(family.w_z.size()) != family.num_states())
        throw ValidationError("kernel state count does not match the state list");
    for (int s = 0; s < family.num_states(); ++s) {
        if (static_cast<int>(family.w_y[s].input_size()) != family.x_size ||
            static_cast<int>(family.w_y[s].output_size()) != family.y_size)
            throw ValidationError("w_y matrix shape mismatch for state " + family.states[s]);
        if (static_cast<int>(family.w_z[s].input_size()) != family.x_size ||
            static_cast<int>(family.w_z[s].output_size()) != family.z_size)
            throw ValidationError("w_z matrix shape mismatch for state " + family.states[s]);
    }
}

void check_type(const Distribution& type, const ChannelFamily& family,
                const std::string& what) {
    if (static_cast<int>(type.size()) != family.x_size)
        throw ValidationError(what + " size does not match |X|");
    type.validate(what);
}

// log-kernel table with -inf at zero entries, per state.
std::vector<std::vector<std::vector<double>>> log_table(
    const std::vector<ConditionalDistribution>& kernels) {
    std::vector<std::vector<std::vector<double>>> lw(kernels.size());
    for (std::size_t s = 0; s < kernels.size(); ++s) {
        lw[s].resize(kernels[s].input_size());
        for (std::size_t x = 0; x < kernels[s].input_size(); ++x) {
            lw[s][x].resize(kernels[s].output_size());
            for (std::size_t z = 0; z < kernels[s].output_size(); ++z) {
                double w = kernels[s].rows[x][z];
                lw[s][x][z] = w > 0.0 ? std::log(w) : -kInf;
            }
        }
    }
    return lw;
}

double loglik_counts(const Counts& c, const std::vector<std::vector<double>>& lw) {
    double v = 0.0;
    for (std::size_t x = 0; x < c.size(); ++x)
        for (std::size_t z = 0; z < c[x].size(); ++z) {
            if (c[x][z] == 0) continue;
            if (lw[x][z] == -kInf) return -kInf;
            v += static_cast<double>(c[x][z]) * lw[x][z];
        }
    return v;
}

// argmax with ties to the lowest index; all -inf also lands on index 0.
int argmax_index(const std::vector<double>& v) {
    int best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = static_cast<int>(i);
    return best;
}

std::vector<std::uint8_t> sequence_from_counts(const std::vector<int>& counts) {
    std::vector<std::uint8_t> seq;
    for (std::size_t x = 0; x < counts.size(); ++x)
        seq.insert(seq.end(), counts[x], static_cast<std::uint8_t>(x));
    return seq;
}

Distribution type_from_counts(const std::vector<int>& counts, int n) {
    Distribution d;
    d.probs.resize(counts.size());
    for (std::size_t x = 0; x < counts.size(); ++x)
        d.probs[x] = static_cast<double>(counts[x]) / n;
    return d;
}

SimPoint make_point(int n, std::int64_t trials, std::int64_t det, std::int64_t comm) {
    SimPoint p;
    p.n = n;
    p.trials = trials;
    p.det_errors = det;
    p.comm_errors = comm;
    p.pd = static_cast<double>(det) / trials;
    p.pc = static_cast<double>(comm) / trials;
    auto [lo, hi] = wilson_interval(det, trials);
    p.pd_lo = lo;
    p.pd_hi = hi;
    return p;
}

std::string join_probs(const Distribution& d) {
    std::string out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) out += ",";
        out += format_double(d[i]);
    }
    return out;
}

std::string fit_status_name(ExponentFit::Status s) {
    switch (s) {
        case ExponentFit::Status::ok: return "ok";
        case ExponentFit::Status::infinite: return "infinite";
        default: return "insufficient";
    }
}

bool sensing_matches_communication(const ChannelFamily& family) {
    if (family.w_z_aliases_w_y) return true;
    if (family.z_size != family.y_size) return false;
    for (int s = 0; s < family.num_states(); ++s)
        for (int x = 0; x < family.x_size; ++x)
            for (int y = 0; y < family.y_size; ++y)
                if (std::abs(family.w_y[s].rows[x][y] - family.w_z[s].rows[x][y]) > 1e-12)
                    return false;
    return true;
}

// Bhattacharyya distance table between input letters under one kernel.
std::vector<std::vector<double>> bhattacharyya_table(const ConditionalDistribution& w) {
    std::size_t X = w.input_size();
    std::vector<std::vector<double>> d(X, std::vector<double>(X, 0.0));
    for (std::size_t a = 0; a < X; ++a)
        for (std::size_t b = 0; b < X; ++b) {
            double sum = 0.0;
            for (std::size_t y = 0; y < w.output_size(); ++y)
                sum += std::sqrt(w.rows[a][y] * w.rows[b][y]);
            d[a][b] = sum > 0.0 ? -std::log(std::min(1.0, sum)) : kInf;
        }
    return d;
}

}  // namespace

std::vector<int> round_to_composition(const Distribution& type, int n) {
    if (n < 1) throw ValidationError("block length must be >= 1");
    type.validate("composition type");
    std::size_t dim = type.size();
    std::vector<int> counts(dim, 0);
    std::vector<double> rem(dim, 0.0);
    int assigned = 0;
    for (std::size_t x = 0; x < dim; ++x) {
        double v = type[x] * n;
        counts[x] = static_cast<int>(std::floor(v + 1e-12));
        rem[x] = v - counts[x];
        assigned += counts[x];
    }
    int deficit = n - assigned;
    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rem[a] != rem[b]) return rem[a] > rem[b];
        return a < b;
    });
    for (int k = 0; k < deficit; ++k) counts[order[k % dim]]++;
    return counts;
}

Codebook gen_constant_composition_codebook(int n, int M, const Distribution& type,
                                           std::uint64_t seed) {
    if (n < 1) throw ValidationError("block length must be >= 1");
    if (M < 1) throw ValidationError("codebook size must be >= 1");
    type.validate("codeword type");
    std::vector<int> counts(type.size(), 0);
    int total = 0;
    for (std::size_t x = 0; x < type.size(); ++x) {
        double v = type[x] * n;
        long long k = std::llround(v);
        if (std::abs(v - static_cast<double>(k)) > 1e-6)
            throw ValidationError("composition n*type(x) is not integral at x=" +
                                  std::to_string(x));
        counts[x] = static_cast<int>(k);
        total += counts[x];
    }
    if (total != n) throw ValidationError("composition counts do not sum to n");

    Codebook cb;
    cb.n = n;
    cb.seed = seed;
    cb.codewords.reserve(M);
    std::vector<std::uint8_t> base = sequence_from_counts(counts);
    for (int m = 0; m < M; ++m) {
        std::vector<std::uint8_t> cw = base;
        RngStream rng(seed, {static_cast<std::uint64_t>(m)});
        rng.shuffle(cw);
        cb.codewords.push_back(std::move(cw));
    }
    return cb;
}

std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t t) {
    if (t <= 0) throw ValidationError("Wilson interval needs at least one trial");
    double z2 = kWilsonZ * kWilsonZ;
    double kk = static_cast<double>(k);
    double tt = static_cast<double>(t);
    double center = (kk + z2 / 2.0) / (tt + z2);
    double half = kWilsonZ / (tt + z2) * std::sqrt(kk * (tt - kk) / tt + z2 / 4.0);
    double lo = std::max(0.0, center - half);
    double hi = std::min(1.0, center + half);
    return {lo, hi};
}

ExponentFit estimate_exponent(const std::vector<FitPoint>& points) {
    ExponentFit fit;
    std::vector<double> ns, ys;
    for (const FitPoint& p : points) {
        if (p.trials <= 0.0 || p.errors < 10.0 || p.errors > p.trials) continue;
        ns.push_back(p.n);
        ys.push_back(-std::log(p.errors / p.trials));
    }
    const int k = static_cast<int>(ns.size());
    if (k < 3) {
        fit.status = ExponentFit::Status::insufficient;
        fit.points_used = k;
        return fit;
    }
    double nbar = 0.0, ybar = 0.0;
    for (int i = 0; i < k; ++i) {
        nbar += ns[i];
        ybar += ys[i];
    }
    nbar /= k;
    ybar /= k;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < k; ++i) {
        sxx += (ns[i] - nbar) * (ns[i] - nbar);
        sxy += (ns[i] - nbar) * (ys[i] - ybar);
    }
    if (sxx <= 0.0) {
        fit.status = ExponentFit::Status::insufficient;
        fit.points_used = k;
        return fit;
    }
    double slope = sxy / sxx;
    double rss = 0.0;
    for (int i = 0; i < k; ++i) {
        double r = ys[i] - (ybar + slope * (ns[i] - nbar));
        rss += r * r;
    }
    fit.status = ExponentFit::Status::ok;
    fit.value = slope;
    fit.stderr_ = k >= 4 ? std::sqrt(rss / (k - 2) / sxx) : 0.0;
    fit.points_used = k;
    return fit;
}

SimReport simulate_mono_open(const ChannelFamily& family, const Distribution& type,
                             const std::vector<int>& n_list, std::int64_t trials,
                             std::uint64_t seed, int threads) {
    check_family(family);
    check_type(type, family, "codeword type");
    if (trials < 100) throw ValidationError("trials must be >= 100");
    if (n_list.empty()) throw ValidationError("n_list must not be empty");
    for (int n : n_list)
        if (n < 1) throw ValidationError("block lengths must be >= 1");

    const int S = family.num_states();
    const auto lwz = log_table(family.w_z);
    SimReport report;
    report.config["op"] = "simulate_mono_open";
    report.config["type"] = join_probs(type);
    {
        std::string joined;
        for (std::size_t i = 0; i < n_list.size(); ++i) {
            if (i) joined += ",";
            joined += std::to_string(n_list[i]);
        }
        report.config["n_list"] = joined;
    }
    report.config["trials"] = std::to_string(trials);
    report.config["seed"] = std::to_string(seed);
    report.config["detector"] = "ml, ties to lowest state";

    bool any_error = false;
    std::vector<FitPoint> fit_points;
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const int n = n_list[ni];
        const std::vector<int> comp = round_to_composition(type, n);
        std::int64_t worst = 0;
        for (int s = 0; s < S; ++s) {
            std::vector<std::uint8_t> err(trials, 0);
            parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
                RngStream rng(seed, {static_cast<std::uint64_t>(ni),
                                     static_cast<std::uint64_t>(s),
                                     static_cast<std::uint64_t>(t)});
                Counts c(family.x_size, std::vector<std::int64_t>(family.z_size, 0));
                for (int x = 0; x < family.x_size; ++x)
                    for (int k = 0; k < comp[x]; ++k)
                        c[x][rng.sample(family.w_z[s].rows[x])]++;
                std::vector<double> ll(S);
                for (int sp = 0; sp < S; ++sp) ll[sp] = loglik_counts(c, lwz[sp]);
                err[t] = argmax_index(ll) != s ? 1 : 0;
            });
            std::int64_t cnt = 0;
            for (std::uint8_t e : err) cnt += e;
            worst = std::max(worst, cnt);
        }
        if (worst > 0) any_error = true;
        report.per_n.push_back(make_point(n, trials, worst, 0));
        fit_points.push_back({static_cast<double>(n), static_cast<double>(worst),
                              static_cast<double>(trials)});
    }
    if (!any_error) {
        report.fitted.status = ExponentFit::Status::infinite;
        report.fitted.value = kInf;
        report.fitted.points_used = 0;
    } else {
        report.fitted = estimate_exponent(fit_points);
    }
    return report;
}

SimReport simulate_closed_loop(const ChannelFamily& family, double delta1, double delta2,
                               const Distribution& probe_type,
                               const std::vector<Distribution>& per_state_types, int n, int M,
                               std::int64_t trials, std::uint64_t seed, int threads) {
    check_family(family);
    if (!(delta1 > 0.0 && delta1 < 1.0 && delta2 > 0.0 && delta2 < 1.0 &&
          delta1 + delta2 < 1.0))
        throw ValidationError("phase fractions need delta1, delta2 in (0,1) with sum < 1");
    if (n < 3) throw ValidationError("block length too short for three phases");
    if (M < 1) throw ValidationError("message count must be >= 1");
    if (trials < 100) throw ValidationError("trials must be >= 100");
    const int S = family.num_states();
    check_type(probe_type, family, "probe type");
    if (static_cast<int>(per_state_types.size()) != S)
        throw ValidationError("per_state_types must have one entry per state");
    for (int s = 0; s < S; ++s) check_type(per_state_types[s], family, "per-state type");

    const int n1 = static_cast<int>(std::lround(delta1 * n));
    const int n2 = static_cast<int>(std::lround(delta2 * n));
    const int n3 = n - n1 - n2;
    if (n1 < 1 || n2 < 1 || n3 < 1)
        throw ValidationError("a phase length fell below one symbol after rounding");

    // Phase-1 probe sequence.
    const std::vector<std::uint8_t> probe_seq =
        sequence_from_counts(round_to_composition(probe_type, n1));

    // Phase-2 state code: distinct cyclic shifts of one constant-composition
    // sequence, greedily spread by worst-state Bhattacharyya distance.
    std::vector<std::uint8_t> base2 = sequence_from_counts(round_to_composition(probe_type, n2));
    std::set<std::vector<std::uint8_t>> distinct;
    std::vector<std::vector<std::uint8_t>> shifts;
    for (int r = 0; r < n2; ++r) {
        std::vector<std::uint8_t> sh(n2);
        for (int i = 0; i < n2; ++i) sh[i] = base2[(i + r) % n2];
        if (distinct.insert(sh).second) shifts.push_back(std::move(sh));
    }
    if (static_cast<int>(shifts.size()) < S)
        throw ValidationError("phase-2 block cannot carry " + std::to_string(S) +
                              " distinct state sequences; increase delta2*n");
    std::vector<std::vector<std::vector<double>>> bh(S);
    for (int s = 0; s < S; ++s) bh[s] = bhattacharyya_table(family.w_y[s]);
    auto seq_dist = [&](const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
        double worst = kInf;
        for (int s = 0; s < S; ++s) {
            double d = 0.0;
            for (int i = 0; i < n2; ++i) d += bh[s][a[i]][b[i]];
            worst = std::min(worst, d);
        }
        return worst;
    };
    std::vector<std::vector<std::uint8_t>> state_seq;
    std::vector<bool> used(shifts.size(), false);
    state_seq.push_back(shifts[0]);
    used[0] = true;
    while (static_cast<int>(state_seq.size()) < S) {
        int best = -1;
        double best_d = -1.0;
        for (std::size_t i = 0; i < shifts.size(); ++i) {
            if (used[i]) continue;
            double d = kInf;
            for (const auto& ch : state_seq) d = std::min(d, seq_dist(shifts[i], ch));
            if (d > best_d) {
                best_d = d;
                best = static_cast<int>(i);
            }
        }
        used[best] = true;
        state_seq.push_back(shifts[best]);
    }

    // Phase-3 per-state codebooks, fixed for the whole run and known to both ends.
    std::vector<Codebook> books;
    std::vector<Distribution> book_types;
    for (int s = 0; s < S; ++s) {
        std::vector<int> comp3 = round_to_composition(per_state_types[s], n3);
        book_types.push_back(type_from_counts(comp3, n3));
        books.push_back(gen_constant_composition_codebook(
            n3, M, book_types.back(), splitmix64(seed + 7919ull * (s + 1))));
    }

    const auto lwy = log_table(family.w_y);
    const auto lwz = log_table(family.w_z);

    std::int64_t worst_det = 0, worst_comm = 0;
    for (int s = 0; s < S; ++s) {
        std::vector<std::uint8_t> derr(trials, 0), cerr(trials, 0);
        parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
            RngStream rng(seed, {1ull, static_cast<std::uint64_t>(s),
                                 static_cast<std::uint64_t>(t)});
            // Phase 1: transmitter senses along the probe and guesses the state.
            Counts c1(family.x_size, std::vector<std::int64_t>(family.z_size, 0));
            for (int i = 0; i < n1; ++i)
                c1[probe_seq[i]][rng.sample(family.w_z[s].rows[probe_seq[i]])]++;
            std::vector<double> ll1(S);
            for (int sp = 0; sp < S; ++sp) ll1[sp] = loglik_counts(c1, lwz[sp]);
            const int s_tilde = argmax_index(ll1);

            // Phase 2: the state estimate crosses the channel; the receiver
            // decodes it by a GLRT over (sequence, state) pairs.
            const std::vector<std::uint8_t>& x2 = state_seq[s_tilde];
            std::vector<int> y2(n2);
            for (int i = 0; i < n2; ++i) y2[i] = rng.sample(family.w_y[s].rows[x2[i]]);
            std::vector<double> ll2(S, -kInf);
            for (int k = 0; k < S; ++k) {
                Counts ck(family.x_size, std::vector<std::int64_t>(family.y_size, 0));
                for (int i = 0; i < n2; ++i) ck[state_seq[k][i]][y2[i]]++;
                for (int sp = 0; sp < S; ++sp)
                    ll2[k] = std::max(ll2[k], loglik_counts(ck, lwy[sp]));
            }
            const int s_rx = argmax_index(ll2);

            // Phase 3: adapted codebook; the receiver decodes the message in
            // the codebook of its own state estimate, the transmitter re-reads
            // the state from the phase-3 sensing symbols alone.
            const std::uint64_t w = rng.uniform_below(static_cast<std::uint64_t>(M));
            const std::vector<std::uint8_t>& x3 = books[s_tilde].codewords[w];
            Counts c3y(family.x_size, std::vector<std::int64_t>(family.y_size, 0));
            std::vector<int> y3(n3);
            for (int i = 0; i < n3; ++i) {
                y3[i] = rng.sample(family.w_y[s].rows[x3[i]]);
                c3y[x3[i]][y3[i]]++;
            }
            Counts c3z(family.x_size, std::vector<std::int64_t>(family.z_size, 0));
            for (int i = 0; i < n3; ++i) c3z[x3[i]][rng.sample(family.w_z[s].rows[x3[i]])]++;

            std::vector<double> llw(M);
            for (int m = 0; m < M; ++m) {
                const std::vector<std::uint8_t>& cand = books[s_rx].codewords[m];
                Counts cm(family.x_size, std::vector<std::int64_t>(family.y_size, 0));
                for (int i = 0; i < n3; ++i) cm[cand[i]][y3[i]]++;
                llw[m] = loglik_counts(cm, lwy[s_rx]);
            }
            const int w_hat = argmax_index(llw);

            std::vector<double> ll3(S);
            for (int sp = 0; sp < S; ++sp) ll3[sp] = loglik_counts(c3z, lwz[sp]);
            const int s_hat = argmax_index(ll3);

            derr[t] = s_hat != s ? 1 : 0;
            cerr[t] = w_hat != static_cast<int>(w) ? 1 : 0;
        });
        std::int64_t dc = 0, cc = 0;
        for (std::int64_t t = 0; t < trials; ++t) {
            dc += derr[t];
            cc += cerr[t];
        }
        worst_det = std::max(worst_det, dc);
        worst_comm = std::max(worst_comm, cc);
    }

    SimReport report;
    report.per_n.push_back(make_point(n, trials, worst_det, worst_comm));
    report.fitted.status = ExponentFit::Status::insufficient;
    report.config["op"] = "simulate_closed_loop";
    report.config["delta1"] = format_double(delta1);
    report.config["delta2"] = format_double(delta2);
    report.config["n"] = std::to_string(n);
    report.config["n1"] = std::to_string(n1);
    report.config["n2"] = std::to_string(n2);
    report.config["n3"] = std::to_string(n3);
    report.config["probe_type"] = join_probs(probe_type);
    {
        std::string joined;
        for (int s = 0; s < S; ++s) {
            if (s) joined += ";";
            joined += join_probs(book_types[s]);
        }
        report.config["state_types"] = joined;
    }
    report.config["M"] = std::to_string(M);
    report.config["trials"] = std::to_string(trials);
    report.config["seed"] = std::to_string(seed);
    report.config["implied_rate_nats"] = format_double(std::log(static_cast<double>(M)) / n);
    report.config["phase2_code"] = "cyclic-shift constant composition, GLRT";
    report.config["yz_coupling"] = "independent";
    return report;
}

SimReport simulate_bistatic(const ChannelFamily& family, const Distribution& type, int n, int M,
                            std::int64_t trials, std::uint64_t seed, BistaticMode mode,
                            int threads) {
    check_family(family);
    if (!sensing_matches_communication(family))
        throw ValidationError("bi-static model has a single output; w_z must alias w_y");
    check_type(type, family, "codeword type");
    if (n < 1) throw ValidationError("block length must be >= 1");
    if (M < 1) throw ValidationError("message count must be >= 1");
    if (trials < 100) throw ValidationError("trials must be >= 100");
    const int S = family.num_states();
    if (static_cast<double>(M) * S > kLikelihoodTableCap)
        throw UnsupportedError("M * |S| likelihood table exceeds the memory cap");

    const std::vector<int> comp = round_to_composition(type, n);
    const Distribution ntype = type_from_counts(comp, n);
    const auto lwy = log_table(family.w_y);

    std::int64_t worst_det = 0, worst_comm = 0;
    for (int s = 0; s < S; ++s) {
        std::vector<std::uint8_t> derr(trials, 0), cerr(trials, 0);
        parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
            RngStream rng(seed, {2ull, static_cast<std::uint64_t>(s),
                                 static_cast<std::uint64_t>(t)});
            const std::uint64_t cb_seed = rng.next_u64();
            Codebook cb = gen_constant_composition_codebook(n, M, ntype, cb_seed);
            const std::uint64_t w = rng.uniform_below(static_cast<std::uint64_t>(M));
            const std::vector<std::uint8_t>& xw = cb.codewords[w];
            std::vector<int> y(n);
            for (int i = 0; i < n; ++i) y[i] = rng.sample(family.w_y[s].rows[xw[i]]);

            int w_hat = 0, s_hat = 0;
            if (mode == BistaticMode::joint) {
                double best = -kInf;
                bool have = false;
                for (int m = 0; m < M; ++m) {
                    Counts cm(family.x_size, std::vector<std::int64_t>(family.y_size, 0));
                    for (int i = 0; i < n; ++i) cm[cb.codewords[m][i]][y[i]]++;
                    for (int sp = 0; sp < S; ++sp) {
                        double ll = loglik_counts(cm, lwy[sp]);
                        if (!have || ll > best) {
                            have = true;
                            best = ll;
                            w_hat = m;
                            s_hat = sp;
                        }
                    }
                }
            } else {
                // MMI first stage: empirical mutual information of the joint
                // type of (candidate codeword, output).
                double best_i = -1.0;
                for (int m = 0; m < M; ++m) {
                    Counts cm(family.x_size, std::vector<std::int64_t>(family.y_size, 0));
                    for (int i = 0; i < n; ++i) cm[cb.codewords[m][i]][y[i]]++;
                    double mi = 0.0;
                    for (int x = 0; x < family.x_size; ++x)
                        for (int j = 0; j < family.y_size; ++j) {
                            if (cm[x][j] == 0) continue;
                            double pxy = static_cast<double>(cm[x][j]) / n;
                            double px = static_cast<double>(comp[x]) / n;
                            std::int64_t coly = 0;
                            for (int xx = 0; xx < family.x_size; ++xx) coly += cm[xx][j];
                            double py = static_cast<double>(coly) / n;
                            mi += pxy * std::log(pxy / (px * py));
                        }
                    if (mi > best_i) {
                        best_i = mi;
                        w_hat = m;
                    }
                }
                Counts cw(family.x_size, std::vector<std::int64_t>(family.y_size, 0));
                for (int i = 0; i < n; ++i) cw[cb.codewords[w_hat][i]][y[i]]++;
                std::vector<double> ll(S);
                for (int sp = 0; sp < S; ++sp) ll[sp] = loglik_counts(cw, lwy[sp]);
                s_hat = argmax_index(ll);
            }
            derr[t] = s_hat != s ? 1 : 0;
            cerr[t] = w_hat != static_cast<int>(w) ? 1 : 0;
        });
        std::int64_t dc = 0, cc = 0;
        for (std::int64_t t = 0; t < trials; ++t) {
            dc += derr[t];
            cc += cerr[t];
        }
        worst_det = std::max(worst_det, dc);
        worst_comm = std::max(worst_comm, cc);
    }

    SimReport report;
    report.per_n.push_back(make_point(n, trials, worst_det, worst_comm));
    report.fitted.status = ExponentFit::Status::insufficient;
    report.config["op"] = "simulate_bistatic";
    report.config["mode"] = mode == BistaticMode::joint ? "joint" : "successive";
    report.config["type"] = join_probs(ntype);
    report.config["n"] = std::to_string(n);
    report.config["M"] = std::to_string(M);
    report.config["trials"] = std::to_string(trials);
    report.config["seed"] = std::to_string(seed);
    report.config["implied_rate_nats"] = format_double(std::log(static_cast<double>(M)) / n);
    if (mode == BistaticMode::successive) report.config["first_stage_decoder"] = "mmi";
    return report;
}

std::string sim_report_csv(const SimReport& report) {
    std::ostringstream os;
    for (const auto& [key, value] : report.config) os << "# " << key << ": " << value << "\n";
    os << "n,trials,det_errors,comm_errors,pd,pc,pd_lo,pd_hi\n";
    for (const SimPoint& p : report.per_n) {
        os << p.n << "," << p.trials << "," << p.det_errors << "," << p.comm_errors << ","
           << format_double(p.pd) << "," << format_double(p.pc) << ","
           << format_double(p.pd_lo) << "," << format_double(p.pd_hi) << "\n";
    }
    return os.str();
}

std::string sim_report_json(const SimReport& report) {
    nlohmann::json j;
    j["config"] = report.config;
    nlohmann::json rows = nlohmann::json::array();
    for (const SimPoint& p : report.per_n) {
        nlohmann::json r;
        r["n"] = p.n;
        r["trials"] = p.trials;
        r["det_errors"] = p.det_errors;
        r["comm_errors"] = p.comm_errors;
        r["pd"] = p.pd;
        r["pc"] = p.pc;
        r["pd_lo"] = p.pd_lo;
        r["pd_hi"] = p.pd_hi;
        rows.push_back(std::move(r));
    }
    j["per_n"] = std::move(rows);
    nlohmann::json fit;
    fit["status"] = fit_status_name(report.fitted.status);
    if (report.fitted.status == ExponentFit::Status::infinite)
        fit["value"] = "inf";
    else if (report.fitted.status == ExponentFit::Status::ok)
        fit["value"] = report.fitted.value;
    else
        fit["value"] = nullptr;
    fit["stderr"] = report.fitted.stderr_;
    fit["points_used"] = report.fitted.points_used;
    j["fitted_exponent"] = std::move(fit);
    return j.dump(2);
}

}  // namespace jcas

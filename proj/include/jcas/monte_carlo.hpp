#ifndef JCAS_MONTE_CARLO_HPP
#define JCAS_MONTE_CARLO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jcas/channel.hpp"
#include "jcas/types.hpp"

namespace jcas {

struct Codebook {
    int n = 0;
    std::vector<std::vector<std::uint8_t>> codewords;  // M sequences over X
    std::uint64_t seed = 0;
};

// Independent uniform draws from the type class of `type` (with replacement),
// realized as seeded Fisher-Yates permutations of the canonical sorted base
// sequence. Requires n*type(x) integral for every x.
Codebook gen_constant_composition_codebook(int n, int M, const Distribution& type,
                                           std::uint64_t seed);

// Rounds a distribution to the nearest n-type by largest remainder (ties to
// the lowest index); returns symbol counts summing to n.
std::vector<int> round_to_composition(const Distribution& type, int n);

struct ExponentFit {
    enum class Status { ok, infinite, insufficient };
    Status status = Status::insufficient;
    double value = 0.0;       // slope, nats/symbol, valid when status == ok
    double stderr_ = 0.0;     // standard error of the slope (0 when < 4 points)
    int points_used = 0;
};

struct SimPoint {
    int n = 0;
    std::int64_t trials = 0;        // per state
    std::int64_t det_errors = 0;    // worst state's detection-error count
    std::int64_t comm_errors = 0;   // worst state's message-error count
    double pd = 0.0;
    double pc = 0.0;
    double pd_lo = 0.0;  // Wilson 95% interval for pd
    double pd_hi = 0.0;
};

struct SimReport {
    std::vector<SimPoint> per_n;
    ExponentFit fitted;
    std::map<std::string, std::string> config;  // echo of the generating parameters
};

// Wilson 95% score interval for k successes in n trials.
std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t t);

struct FitPoint {
    double n = 0.0;
    double errors = 0.0;  // real-valued so synthetic exact inputs stay exact
    double trials = 0.0;
};

// Least-squares slope of -ln(err/trials) against n over the points with at
// least 10 errors; needs >= 3 such points, otherwise reports insufficient.
ExponentFit estimate_exponent(const std::vector<FitPoint>& points);

// Mono-static open-loop ML detection: for each block length and each true
// state, sense along a fixed composition-P_X sequence and detect by max
// log-likelihood (ties to the lowest state index). P_d is the worst state's
// error rate (max over s).
SimReport simulate_mono_open(const ChannelFamily& family, const Distribution& type,
                             const std::vector<int>& n_list, std::int64_t trials,
                             std::uint64_t seed, int threads = 1);

// Three-phase closed-loop protocol: probe + transmitter-side ML state
// estimate, state-index transmission over W_Y, then an adapted
// constant-composition message codebook; the final state estimate uses only
// the phase-3 sensing symbols.
SimReport simulate_closed_loop(const ChannelFamily& family, double delta1, double delta2,
                               const Distribution& probe_type,
                               const std::vector<Distribution>& per_state_types, int n, int M,
                               std::int64_t trials, std::uint64_t seed, int threads = 1);

enum class BistaticMode { successive, joint };

// Bi-static decoding at the receiver: joint mode takes the (w, s) pair with
// the largest log-likelihood; successive mode decodes the message with the
// state-independent MMI rule first, then the state by ML
// given the decoded codeword.
SimReport simulate_bistatic(const ChannelFamily& family, const Distribution& type, int n, int M,
                            std::int64_t trials, std::uint64_t seed, BistaticMode mode,
                            int threads = 1);

// CSV body: header n,trials,det_errors,comm_errors,pd,pc,pd_lo,pd_hi.
std::string sim_report_csv(const SimReport& report);
// JSON summary with per-n rows, fitted exponent, and the config echo.
std::string sim_report_json(const SimReport& report);

}  // namespace jcas

#endif

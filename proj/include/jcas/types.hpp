#ifndef JCAS_TYPES_HPP
#define JCAS_TYPES_HPP

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace jcas {

// Exit-code contract: validation failures map to exit 2, unsupported problem
// sizes to exit 3, simulations without enough data for a fit to exit 4.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbTol = 1e-9;  // stochasticity tolerance; rows are rejected, never repaired

// Point on the probability simplex over a finite alphabet.
struct Distribution {
    std::vector<double> probs;

    Distribution() = default;
    explicit Distribution(std::vector<double> p) : probs(std::move(p)) {}

    std::size_t size() const { return probs.size(); }
    double operator[](std::size_t i) const { return probs[i]; }
    double& operator[](std::size_t i) { return probs[i]; }

    // Throws ValidationError unless entries are >= 0 and sum to 1 within kProbTol.
    void validate(const std::string& what = "distribution") const;
};

Distribution uniform_distribution(std::size_t n);

// Row-stochastic matrix from X to Y; rows[x][y].
struct ConditionalDistribution {
    std::vector<std::vector<double>> rows;

    ConditionalDistribution() = default;
    explicit ConditionalDistribution(std::vector<std::vector<double>> r) : rows(std::move(r)) {}

    std::size_t input_size() const { return rows.size(); }
    std::size_t output_size() const { return rows.empty() ? 0 : rows[0].size(); }
    const std::vector<double>& row(std::size_t x) const { return rows[x]; }

    void validate(const std::string& what = "conditional distribution") const;
};

// Output marginal (p_x o w)(y) = sum_x p_x(x) w(y|x).
Distribution output_marginal(const Distribution& p_x, const ConditionalDistribution& w);

// Deterministic decimal rendering used by every CSV/stdout emitter, so that
// identical numbers always serialize to identical bytes.
std::string format_double(double v);

}  // namespace jcas

#endif

#ifndef JCAS_RNG_HPP
#define JCAS_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace jcas {

// splitmix64; used only to key independent substreams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic stream keyed by (seed, id...): every simulation trial gets a
// stream that is a pure function of the master seed and its own indices, so
// tallies are identical for any thread count or scheduling order.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
        std::uint64_t k = splitmix64(seed);
        for (std::uint64_t id : ids) k = splitmix64(k ^ (id + 0x9E3779B97F4A7C15ull));
        engine_.seed(k);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, bound); rejection sampling on the top bits, not
    // std::uniform_int_distribution (whose mapping is implementation-defined).
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~0ull) / bound);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // CDF-inversion draw from a finite distribution (probabilities, not
    // necessarily renormalized exactly; the last index absorbs float slack).
    int sample(const std::vector<double>& probs) {
        double u = uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace jcas

#endif

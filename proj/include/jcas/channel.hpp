#ifndef JCAS_CHANNEL_HPP
#define JCAS_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jcas/types.hpp"

namespace jcas {

// State-dependent DMC family: per-state communication channel W_{Y|X,s} and
// sensing channel W_{Z|X,s}. When a channel file omits w_z, the sensing
// channel aliases w_y (the bi-static situation, where the receiver both
// decodes and senses from the same observation).
struct ChannelFamily {
    int x_size = 0;
    int y_size = 0;
    int z_size = 0;
    std::vector<std::string> states;
    std::vector<ConditionalDistribution> w_y;  // indexed by state
    std::vector<ConditionalDistribution> w_z;  // indexed by state
    bool w_z_aliases_w_y = false;

    int num_states() const { return static_cast<int>(states.size()); }
};

struct SymmetryReport {
    bool symmetric = false;
    std::optional<int> base_input;
    // witness[x] is a permutation of Z with W_{Z|X,s}(z|x) = W_{Z|X,s}(witness[x][z]|x0)
    // for every state s, valid only when symmetric.
    std::vector<std::vector<int>> witness;
};

// Parses and validates the channel-spec JSON document. Rows failing the
// stochasticity tolerance are rejected (no renormalization). A missing w_z is
// accepted only when z_size == y_size, in which case w_z aliases w_y.
ChannelFamily parse_channel_spec(const std::string& text);
ChannelFamily load_channel_file(const std::string& path);

// Canonical JSON rendering; parse(serialize(f)) reproduces f bit-exactly.
std::string serialize_channel_spec(const ChannelFamily& family);

// FNV-1a 64-bit hash of a serialized channel, used as the content tag in CSV
// preambles and stdout summaries.
std::uint64_t fnv1a64(const std::string& bytes);
std::string channel_content_hash(const ChannelFamily& family);

// Lists state pairs (s, s') with s < s' whose sensing channels agree on every
// row within 1e-12; an empty result means every pair is distinguishable.
std::vector<std::pair<int, int>> validate_distinguishability(const ChannelFamily& family);

// Output-symmetry detector: symmetric iff some base input x0 has, for every
// x, a single output permutation aligning all states at once; equivalently the
// per-input multisets of per-output state vectors coincide. Vectors are
// rounded to 12 decimals and sorted lexicographically to stabilize the
// multiset comparison.
SymmetryReport check_output_symmetry(const ChannelFamily& family, double tol = 1e-9);

}  // namespace jcas

#endif

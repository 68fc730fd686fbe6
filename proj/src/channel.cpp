#include "jcas/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace jcas {

using nlohmann::json;

void Distribution::validate(const std::string& what) const {
    if (probs.empty()) throw ValidationError(what + ": empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0))
            throw ValidationError(what + ": negative entry at index " + std::to_string(i));
        sum += probs[i];
    }
    if (std::abs(sum - 1.0) > kProbTol)
        throw ValidationError(what + ": entries sum to " + format_double(sum) + ", expected 1");
}

Distribution uniform_distribution(std::size_t n) {
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

void ConditionalDistribution::validate(const std::string& what) const {
    if (rows.empty()) throw ValidationError(what + ": no rows");
    const std::size_t cols = rows[0].size();
    for (std::size_t x = 0; x < rows.size(); ++x) {
        if (rows[x].size() != cols) throw ValidationError(what + ": ragged rows");
        Distribution(rows[x]).validate(what + ", row " + std::to_string(x));
    }
}

Distribution output_marginal(const Distribution& p_x, const ConditionalDistribution& w) {
    Distribution out(std::vector<double>(w.output_size(), 0.0));
    for (std::size_t x = 0; x < w.input_size(); ++x) {
        const double px = p_x[x];
        if (px == 0.0) continue;
        for (std::size_t y = 0; y < w.output_size(); ++y) out[y] += px * w.rows[x][y];
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

namespace {

std::vector<ConditionalDistribution> parse_matrix_set(const json& arr, const std::string& name,
                                                      int n_states, int x_size, int out_size) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != n_states)
        throw ValidationError(name + ": expected one matrix per state (" +
                              std::to_string(n_states) + ")");
    std::vector<ConditionalDistribution> result;
    result.reserve(n_states);
    for (int s = 0; s < n_states; ++s) {
        const json& mat = arr[s];
        if (!mat.is_array() || static_cast<int>(mat.size()) != x_size)
            throw ValidationError(name + "[" + std::to_string(s) + "]: expected " +
                                  std::to_string(x_size) + " rows");
        ConditionalDistribution cd;
        cd.rows.resize(x_size);
        for (int x = 0; x < x_size; ++x) {
            const json& row = mat[x];
            if (!row.is_array() || static_cast<int>(row.size()) != out_size)
                throw ValidationError(name + "[" + std::to_string(s) + "], row " +
                                      std::to_string(x) + ": expected " +
                                      std::to_string(out_size) + " entries");
            cd.rows[x].resize(out_size);
            for (int k = 0; k < out_size; ++k) {
                if (!row[k].is_number())
                    throw ValidationError(name + "[" + std::to_string(s) + "], row " +
                                          std::to_string(x) + ": non-numeric entry");
                cd.rows[x][k] = row[k].get<double>();
            }
        }
        cd.validate(name + "[" + std::to_string(s) + "]");
        result.push_back(std::move(cd));
    }
    return result;
}

}  // namespace

ChannelFamily parse_channel_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed channel spec: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("malformed channel spec: not a JSON object");

    ChannelFamily fam;
    for (const char* key : {"x_size", "y_size", "z_size"}) {
        if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<int>() < 1)
            throw ValidationError(std::string("channel spec: ") + key +
                                  " must be a positive integer");
    }
    fam.x_size = doc["x_size"].get<int>();
    fam.y_size = doc["y_size"].get<int>();
    fam.z_size = doc["z_size"].get<int>();

    if (!doc.contains("states") || !doc["states"].is_array() || doc["states"].empty())
        throw ValidationError("channel spec: states must be a non-empty array of labels");
    for (const auto& s : doc["states"]) {
        if (!s.is_string()) throw ValidationError("channel spec: state labels must be strings");
        fam.states.push_back(s.get<std::string>());
    }

    if (!doc.contains("w_y")) throw ValidationError("channel spec: missing w_y");
    fam.w_y = parse_matrix_set(doc["w_y"], "w_y", fam.num_states(), fam.x_size, fam.y_size);

    if (doc.contains("w_z")) {
        fam.w_z = parse_matrix_set(doc["w_z"], "w_z", fam.num_states(), fam.x_size, fam.z_size);
        fam.w_z_aliases_w_y = false;
    } else {
        if (fam.z_size != fam.y_size)
            throw ValidationError(
                "channel spec: w_z missing and z_size != y_size; sensing channel required");
        fam.w_z = fam.w_y;
        fam.w_z_aliases_w_y = true;
    }
    return fam;
}

ChannelFamily load_channel_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open channel spec: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_channel_spec(ss.str());
}

std::string serialize_channel_spec(const ChannelFamily& family) {
    json doc;
    doc["x_size"] = family.x_size;
    doc["y_size"] = family.y_size;
    doc["z_size"] = family.z_size;
    doc["states"] = family.states;
    json wy = json::array();
    for (const auto& cd : family.w_y) wy.push_back(cd.rows);
    doc["w_y"] = wy;
    if (!family.w_z_aliases_w_y) {
        json wz = json::array();
        for (const auto& cd : family.w_z) wz.push_back(cd.rows);
        doc["w_z"] = wz;
    }
    return doc.dump(2);
}

std::string channel_content_hash(const ChannelFamily& family) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016llx",
                  static_cast<unsigned long long>(fnv1a64(serialize_channel_spec(family))));
    return buf;
}

std::vector<std::pair<int, int>> validate_distinguishability(const ChannelFamily& family) {
    std::vector<std::pair<int, int>> identical;
    const double tol = 1e-12;
    for (int s = 0; s < family.num_states(); ++s) {
        for (int t = s + 1; t < family.num_states(); ++t) {
            bool same = true;
            for (int x = 0; x < family.x_size && same; ++x)
                for (int z = 0; z < family.z_size && same; ++z)
                    if (std::abs(family.w_z[s].rows[x][z] - family.w_z[t].rows[x][z]) > tol)
                        same = false;
            if (same) identical.emplace_back(s, t);
        }
    }
    return identical;
}

SymmetryReport check_output_symmetry(const ChannelFamily& family, double tol) {
    SymmetryReport report;
    const int S = family.num_states();
    const int X = family.x_size;
    const int Z = family.z_size;

    // state_vec[x][z] = (W_{Z|X,s}(z|x))_s, rounded for stable lexicographic sorting
    auto state_vec = [&](int x, int z) {
        std::vector<double> v(S);
        for (int s = 0; s < S; ++s) v[s] = family.w_z[s].rows[x][z];
        return v;
    };
    auto rounded = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) r[i] = std::round(v[i] * 1e12) / 1e12;
        return r;
    };

    // sort output indices of each input by their rounded state vector
    std::vector<std::vector<int>> order(X);
    for (int x = 0; x < X; ++x) {
        std::vector<std::vector<double>> keys(Z);
        for (int z = 0; z < Z; ++z) keys[z] = rounded(state_vec(x, z));
        order[x].resize(Z);
        std::iota(order[x].begin(), order[x].end(), 0);
        std::sort(order[x].begin(), order[x].end(),
                  [&](int a, int b) { return keys[a] < keys[b]; });
    }

    const int x0 = 0;
    for (int x = 0; x < X; ++x) {
        for (int k = 0; k < Z; ++k) {
            const auto va = state_vec(x, order[x][k]);
            const auto vb = state_vec(x0, order[x0][k]);
            for (int s = 0; s < S; ++s)
                if (std::abs(va[s] - vb[s]) > tol) return report;  // symmetric = false
        }
    }

    report.symmetric = true;
    report.base_input = x0;
    report.witness.assign(X, std::vector<int>(Z, 0));
    for (int x = 0; x < X; ++x)
        for (int k = 0; k < Z; ++k) report.witness[x][order[x][k]] = order[x0][k];
    return report;
}

}  // namespace jcas

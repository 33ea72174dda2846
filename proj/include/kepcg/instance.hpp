#ifndef KEPCG_INSTANCE_HPP
#define KEPCG_INSTANCE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kepcg/errors.hpp"
#include "kepcg/rng.hpp"

namespace kepcg {

using VertexId = int;

struct Arc {
    VertexId from;
    VertexId to;
    double weight;
};

/// Compatibility graph of a kidney exchange pool: patient-donor pairs,
/// altruistic donors, weighted transplant arcs and the cycle/chain limits.
/// Vertex ids are arbitrary distinct non-negative integers; internally they
/// are mapped to dense indices 0..n-1 in increasing id order.
class CompatibilityInstance {
public:
    CompatibilityInstance() = default;

    CompatibilityInstance(std::vector<std::pair<VertexId, bool>> vertices,
                          std::vector<Arc> arcs, int k, int l)
        : arcs_(std::move(arcs)), k_(k), l_(l) {
        std::sort(vertices.begin(), vertices.end());
        ids_.reserve(vertices.size());
        altruist_.reserve(vertices.size());
        for (auto& [id, alt] : vertices) {
            ids_.push_back(id);
            altruist_.push_back(alt ? 1 : 0);
        }
        validate();
        build_adjacency();
    }

    int n() const { return static_cast<int>(ids_.size()); }
    int k() const { return k_; }
    int l() const { return l_; }
    VertexId id(int index) const { return ids_[index]; }
    bool is_altruist(int index) const { return altruist_[index] != 0; }

    int index_of(VertexId id) const {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id)
            throw ValidationError("unknown vertex id " + std::to_string(id));
        return static_cast<int>(it - ids_.begin());
    }

    bool has_vertex(VertexId id) const {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        return it != ids_.end() && *it == id;
    }

    const std::vector<Arc>& arcs() const { return arcs_; }

    /// Successors of a vertex by dense index: (successor index, arc weight).
    const std::vector<std::pair<int, double>>& succ(int index) const { return succ_[index]; }

    double arc_weight(int from_index, int to_index) const {
        for (auto& [j, w] : succ_[from_index])
            if (j == to_index) return w;
        throw ValidationError("no arc " + std::to_string(ids_[from_index]) + "->" +
                              std::to_string(ids_[to_index]));
    }

    bool has_arc(int from_index, int to_index) const {
        for (auto& [j, w] : succ_[from_index])
            if (j == to_index) return true;
        return false;
    }

    int num_pairs() const {
        return n() - num_altruists();
    }
    int num_altruists() const {
        return static_cast<int>(std::count(altruist_.begin(), altruist_.end(), 1));
    }

private:
    void validate() const {
        if (k_ < 2) throw ValidationError("K must be >= 2");
        if (l_ < 1) throw ValidationError("L must be >= 1");
        for (std::size_t i = 0; i + 1 < ids_.size(); ++i)
            if (ids_[i] == ids_[i + 1])
                throw ValidationError("duplicate vertex id " + std::to_string(ids_[i]));
        for (const auto& id : ids_)
            if (id < 0) throw ValidationError("negative vertex id");
        std::map<std::pair<VertexId, VertexId>, int> seen;
        for (const auto& a : arcs_) {
            if (!has_vertex(a.from) || !has_vertex(a.to))
                throw ValidationError("arc references unknown vertex");
            if (a.from == a.to)
                throw ValidationError("self-loop at vertex " + std::to_string(a.from));
            if (altruist_[index_of_unchecked(a.to)])
                throw ValidationError("arc into altruist " + std::to_string(a.to));
            if (a.weight < 0.0)
                throw ValidationError("negative arc weight on (" + std::to_string(a.from) +
                                      "," + std::to_string(a.to) + ")");
            if (++seen[{a.from, a.to}] > 1)
                throw ValidationError("duplicate arc (" + std::to_string(a.from) + "," +
                                      std::to_string(a.to) + ")");
        }
    }

    int index_of_unchecked(VertexId id) const {
        return static_cast<int>(std::lower_bound(ids_.begin(), ids_.end(), id) - ids_.begin());
    }

    void build_adjacency() {
        succ_.assign(ids_.size(), {});
        for (const auto& a : arcs_)
            succ_[index_of(a.from)].emplace_back(index_of(a.to), a.weight);
        for (auto& row : succ_) std::sort(row.begin(), row.end());
    }

    std::vector<VertexId> ids_;     // sorted ascending; position = dense index
    std::vector<char> altruist_;    // by dense index
    std::vector<Arc> arcs_;
    int k_ = 2;
    int l_ = 1;
    std::vector<std::vector<std::pair<int, double>>> succ_;  // by dense index
};

enum class WeightMode { Unit, UniformRandom };

/// Simplified Saidman-style pool generator parameters. Blood-type frequencies
/// are O/A/B/AB; PRA bands are low/medium/high with the matching
/// crossmatch-failure rates.
struct GeneratorParams {
    int num_pairs = 50;
    double altruist_fraction = 0.04;
    std::uint64_t seed = 1;
    std::array<double, 4> blood_type_freq{0.44, 0.42, 0.10, 0.04};
    std::array<double, 3> pra_band_prob{0.70, 0.20, 0.10};
    std::array<double, 3> crossmatch_fail{0.05, 0.45, 0.90};
    WeightMode weight_mode = WeightMode::Unit;

    void validate() const {
        if (num_pairs <= 0) throw ParameterError("num_pairs must be positive");
        if (altruist_fraction < 0.0 || altruist_fraction > 1.0)
            throw ParameterError("altruist_fraction must be in [0,1]");
        double bs = blood_type_freq[0] + blood_type_freq[1] + blood_type_freq[2] + blood_type_freq[3];
        if (std::abs(bs - 1.0) > 1e-9)
            throw ParameterError("blood-type frequencies must sum to 1");
        double ps = pra_band_prob[0] + pra_band_prob[1] + pra_band_prob[2];
        if (std::abs(ps - 1.0) > 1e-9)
            throw ParameterError("pra band probabilities must sum to 1");
        for (double f : crossmatch_fail)
            if (f < 0.0 || f > 1.0) throw ParameterError("crossmatch failure rate must be in [0,1]");
    }
};

namespace detail {

// O, A, B, AB
inline bool blood_compatible(int donor, int patient) {
    if (donor == 0) return true;
    if (patient == 3) return true;
    return donor == patient;
}

inline int draw_category(std::mt19937_64& rng, const double* probs, int count) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double x = u(rng);
    double acc = 0.0;
    for (int i = 0; i < count; ++i) {
        acc += probs[i];
        if (x < acc) return i;
    }
    return count - 1;
}

}  // namespace detail

/// Deterministic function of the seed: vertices 0..num_pairs-1 are pairs,
/// the remaining round(altruist_fraction * num_pairs) ids are altruists.
/// An arc (u,v) exists iff u's donor is blood-compatible with v's patient and
/// the crossmatch (probability by v's PRA band) succeeds.
inline CompatibilityInstance generate(const GeneratorParams& params, int k = 3, int l = 4) {
    params.validate();
    const int np = params.num_pairs;
    const int na = static_cast<int>(std::llround(params.altruist_fraction * np));
    const int n = np + na;

    auto rng = make_stream(params.seed, 0x6765);

    std::vector<int> donor_blood(n), patient_blood(np), pra_band(np);
    for (int v = 0; v < np; ++v) {
        patient_blood[v] = detail::draw_category(rng, params.blood_type_freq.data(), 4);
        donor_blood[v] = detail::draw_category(rng, params.blood_type_freq.data(), 4);
        pra_band[v] = detail::draw_category(rng, params.pra_band_prob.data(), 3);
    }
    for (int v = np; v < n; ++v)
        donor_blood[v] = detail::draw_category(rng, params.blood_type_freq.data(), 4);

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<std::pair<VertexId, bool>> vertices;
    vertices.reserve(n);
    for (int v = 0; v < n; ++v) vertices.emplace_back(v, v >= np);

    // Weights come from their own stream so the graph structure is identical
    // across weight modes for a given seed.
    auto weight_rng = make_stream(params.seed, 0x7767);
    std::vector<Arc> arcs;
    for (int from = 0; from < n; ++from) {
        for (int to = 0; to < np; ++to) {
            if (from == to) continue;
            // One crossmatch draw per ordered (donor, patient), in fixed order.
            double draw = u01(rng);
            if (!detail::blood_compatible(donor_blood[from], patient_blood[to])) continue;
            if (draw < params.crossmatch_fail[pra_band[to]]) continue;
            double w = 1.0;
            if (params.weight_mode == WeightMode::UniformRandom) w = u01(weight_rng);
            arcs.push_back({from, to, w});
        }
    }
    return CompatibilityInstance(std::move(vertices), std::move(arcs), k, l);
}

}  // namespace kepcg

#endif

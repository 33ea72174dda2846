#ifndef KEPCG_COLOR_CODING_HPP
#define KEPCG_COLOR_CODING_HPP

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "kepcg/empplc.hpp"
#include "kepcg/errors.hpp"
#include "kepcg/pricing_graph.hpp"
#include "kepcg/rng.hpp"

namespace kepcg {

/// Ordering of the colored vertices. delta is the sum of position distances
/// over extended-neighbor pairs (each ordered pair counted), delta_max the
/// maximum such distance.
struct Arrangement {
    std::vector<int> order;   // position -> vertex index
    long long delta_sum = 0;
    int delta_max = 0;

    int size() const { return static_cast<int>(order.size()); }
};

inline long long evaluate_delta_sum(const PricingGraph& g, const std::vector<int>& order) {
    std::vector<int> pos(g.n, -1);
    for (int p = 0; p < static_cast<int>(order.size()); ++p) pos[order[p]] = p;
    long long sum = 0;
    for (int i : order)
        for (int j : g.gamma[i])
            if (pos[j] >= 0) sum += std::abs(pos[i] - pos[j]);
    return sum;
}

inline int evaluate_delta_max(const PricingGraph& g, const std::vector<int>& order) {
    std::vector<int> pos(g.n, -1);
    for (int p = 0; p < static_cast<int>(order.size()); ++p) pos[order[p]] = p;
    int mx = 0;
    for (int i : order)
        for (int j : g.gamma[i])
            if (pos[j] >= 0) mx = std::max(mx, std::abs(pos[i] - pos[j]));
    return mx;
}

/// Vertices that receive a color: alive and not a source-arc target
/// (altruists start paths uncolored; they can never repeat on a path).
inline std::vector<char> colorable_mask(const PricingGraph& g) {
    std::vector<char> mask(g.alive.begin(), g.alive.end());
    for (auto& [u, c] : g.source_arcs)
        if (u >= 0 && u < g.n) mask[u] = 0;
    return mask;
}

/// Linear-arrangement local search over the colorable vertices: pairwise
/// position swaps, first improvement on delta, one seeded restart if budget
/// remains. Never worse than the identity order.
inline Arrangement build_arrangement(const PricingGraph& g, std::uint64_t iter_budget = 2'000'000,
                                     std::uint64_t seed = 0) {
    std::vector<char> colorable = colorable_mask(g);
    std::vector<int> identity;
    for (int v = 0; v < g.n; ++v)
        if (colorable[v]) identity.push_back(v);
    const int m = static_cast<int>(identity.size());

    std::vector<int> pos(g.n, -1);
    auto set_positions = [&](const std::vector<int>& order) {
        std::fill(pos.begin(), pos.end(), -1);
        for (int p = 0; p < m; ++p) pos[order[p]] = p;
    };

    // Half the change in delta if u (at p) and v (at q) swap positions.
    auto swap_gain = [&](int u, int v) {
        int p = pos[u], q = pos[v];
        long long diff = 0;
        for (int j : g.gamma[u]) {
            if (j == u || j == v || pos[j] < 0) continue;
            diff += std::abs(q - pos[j]) - std::abs(p - pos[j]);
        }
        for (int j : g.gamma[v]) {
            if (j == u || j == v || pos[j] < 0) continue;
            diff += std::abs(p - pos[j]) - std::abs(q - pos[j]);
        }
        return diff;
    };

    std::uint64_t iters = 0;
    auto local_search = [&](std::vector<int> order) {
        set_positions(order);
        bool improved = true;
        while (improved && iters < iter_budget) {
            improved = false;
            for (int p = 0; p < m && iters < iter_budget; ++p) {
                for (int q = p + 1; q < m && iters < iter_budget; ++q) {
                    ++iters;
                    int u = order[p], v = order[q];
                    if (swap_gain(u, v) < 0) {
                        std::swap(order[p], order[q]);
                        pos[u] = q;
                        pos[v] = p;
                        improved = true;
                    }
                }
            }
        }
        return order;
    };

    std::vector<int> best = local_search(identity);
    long long best_delta = evaluate_delta_sum(g, best);

    if (iters < iter_budget && m > 1) {
        std::vector<int> shuffled = identity;
        auto rng = make_stream(seed, 0xa55);
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        std::vector<int> cand = local_search(std::move(shuffled));
        long long cand_delta = evaluate_delta_sum(g, cand);
        if (cand_delta < best_delta) {
            best = std::move(cand);
            best_delta = cand_delta;
        }
    }

    Arrangement arr;
    arr.order = std::move(best);
    arr.delta_sum = best_delta;
    arr.delta_max = evaluate_delta_max(g, arr.order);
    return arr;
}

enum class ColoringStrategy { UniformRandom, PermInterval };

struct ColoringPlan {
    ColoringStrategy strategy = ColoringStrategy::PermInterval;
    int colors = 2;              // C
    int shift_offset = 0;
    std::uint64_t rng_seed = 0;
    double rho = 0.99;
    int trial_budget = 0;        // <= 0: use trial_count(rho, colors)

    void validate() const {
        if (colors < 2) throw ParameterError("need at least 2 colors");
        if (colors > 20) throw ParameterError("color count capped at 20");
        if (rho <= 0.0 || rho >= 1.0) throw ParameterError("rho must be in (0,1)");
        if (shift_offset < 0) throw ParameterError("shift offset must be >= 0");
    }
};

/// color[v] in {0..C-1} for colored vertices, -1 otherwise.
struct Coloring {
    std::vector<int> color;
    int colors = 0;
};

/// t = ceil(ln(1-rho) / ln(1 - C!/C^C)): trials for a fixed path of C
/// vertices to be colorful with probability rho under uniform coloring.
inline int trial_count(double rho, int colors) {
    if (rho <= 0.0 || rho >= 1.0) throw ParameterError("rho must be in (0,1)");
    if (colors < 2) throw ParameterError("need at least 2 colors");
    double fact = 1.0;
    for (int i = 2; i <= colors; ++i) fact *= i;
    double p = fact / std::pow(static_cast<double>(colors), colors);
    double t = std::log(1.0 - rho) / std::log(1.0 - p);
    return std::max(1, static_cast<int>(std::ceil(t - 1e-12)));
}

/// UniformRandom: i.i.d. colors. PermInterval: rotate the arrangement left by
/// shift_offset, split into size-C intervals, give each a fresh uniform
/// permutation of the colors; the trailing partial interval gets a random
/// injection, so every interval is rainbow.
inline Coloring color_vertices(const ColoringPlan& plan, const Arrangement& arr, int num_vertices) {
    plan.validate();
    const int m = arr.size();
    if (m > 0 && plan.shift_offset >= m)
        throw ParameterError("shift offset must be < arrangement size");
    Coloring col;
    col.colors = plan.colors;
    col.color.assign(num_vertices, -1);
    auto rng = make_stream(plan.rng_seed, static_cast<std::uint64_t>(plan.shift_offset));

    if (plan.strategy == ColoringStrategy::UniformRandom) {
        std::uniform_int_distribution<int> pick(0, plan.colors - 1);
        for (int v : arr.order) col.color[v] = pick(rng);
        return col;
    }

    std::vector<int> palette(plan.colors);
    std::iota(palette.begin(), palette.end(), 0);
    for (int start = 0; start < m; start += plan.colors) {
        std::shuffle(palette.begin(), palette.end(), rng);
        int block = std::min(plan.colors, m - start);
        for (int k = 0; k < block; ++k) {
            int p = (start + k + plan.shift_offset) % m;
            col.color[arr.order[p]] = palette[k];
        }
    }
    return col;
}

/// Minimum-cost source path of <= max_arcs arcs whose colored vertices carry
/// pairwise distinct colors. An uncolored vertex may appear only as the first
/// vertex of a path (it consumes no color); states are indexed by
/// (started-uncolored flag, color subset, end vertex). Distinct colors imply
/// the colored vertices are distinct, and the uncolored start cannot recur
/// because extensions never enter uncolored vertices.
inline EmpplcSolution colorful_dp(const PricingGraph& g, const Coloring& coloring,
                                  int max_arcs) {
    const int C = coloring.colors;
    if (C > 20) throw ParameterError("color count capped at 20");
    const int num_masks = 1 << C;
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<std::vector<std::vector<double>>> cost(
        2, std::vector<std::vector<double>>(num_masks, std::vector<double>(g.n, inf)));
    std::vector<std::vector<std::vector<int>>> pred(
        2, std::vector<std::vector<int>>(num_masks, std::vector<int>(g.n, -2)));

    for (auto& [u, c] : g.source_arcs) {
        int cu = coloring.color[u];
        int f = cu < 0 ? 1 : 0;
        int mask = cu < 0 ? 0 : 1 << cu;
        if (c < cost[f][mask][u]) {
            cost[f][mask][u] = c;
            pred[f][mask][u] = -1;  // source
        }
    }

    for (int f = 0; f < 2; ++f) {
        for (int mask = 0; mask < num_masks; ++mask) {
            int arcs = std::popcount(static_cast<unsigned>(mask)) + f;
            if (arcs == 0 || arcs >= max_arcs ||
                std::popcount(static_cast<unsigned>(mask)) >= C)
                continue;  // cannot be extended
            for (int v = 0; v < g.n; ++v) {
                double cv = cost[f][mask][v];
                if (cv == inf) continue;
                for (auto& [j, c] : g.succ[v]) {
                    int cj = coloring.color[j];
                    if (cj < 0 || (mask >> cj) & 1) continue;
                    int nm = mask | (1 << cj);
                    if (cv + c < cost[f][nm][j] - 1e-15) {
                        cost[f][nm][j] = cv + c;
                        pred[f][nm][j] = v;
                    }
                }
            }
        }
    }

    EmpplcSolution best;
    best.kind = SolutionKind::Heuristic;
    best.cost = inf;
    auto reconstruct = [&](int f, int mask, int v) {
        std::vector<int> path;
        while (v >= 0) {
            path.push_back(v);
            int p = pred[f][mask][v];
            if (coloring.color[v] >= 0) mask ^= 1 << coloring.color[v];
            v = p;
        }
        std::reverse(path.begin(), path.end());
        return path;
    };

    double best_cost = inf;
    for (int f = 0; f < 2; ++f)
        for (int mask = 0; mask < num_masks; ++mask)
            for (int v = 0; v < g.n; ++v)
                best_cost = std::min(best_cost, cost[f][mask][v]);
    if (best_cost == inf) {
        best.cost = 0.0;  // no colorful path
        return best;
    }
    for (int f = 0; f < 2; ++f)
        for (int mask = 0; mask < num_masks; ++mask)
            for (int v = 0; v < g.n; ++v)
                if (cost[f][mask][v] <= best_cost + 1e-12) {
                    std::vector<int> path = reconstruct(f, mask, v);
                    if (detail::lex_better(cost[f][mask][v], path, best.cost, best.path)) {
                        best.cost = cost[f][mask][v];
                        best.path = std::move(path);
                    }
                }
    return best;
}

struct ColorCodingResult {
    std::optional<EmpplcSolution> first_negative;
    EmpplcSolution best;
    int trials_run = 0;
    bool proven_optimal = false;
};

/// Trial loop: color (shift incremented mod n after each trial), solve the
/// DP, keep the running minimum. With PermInterval and delta_max <= C the
/// loop stops after exactly C trials and the best path is provably optimal;
/// otherwise it stops at min(time limit, trial budget), the limit checked
/// between trials only.
inline ColorCodingResult solve_color_coding(const EmpplcInstance& inst,
                                            const ColoringPlan& plan, const Arrangement& arr,
                                            double time_limit_s,
                                            bool stop_on_negative = false) {
    plan.validate();
    const PricingGraph& g = *inst.graph;
    ColorCodingResult result;
    result.best.kind = SolutionKind::Heuristic;
    result.best.cost = std::numeric_limits<double>::infinity();

    // Optimality claims require that no source-arc target has incoming arcs,
    // so every path visits at most one uncolored vertex (its start). This
    // holds for graphs derived from an instance; raw inputs may violate it.
    std::vector<char> is_target(g.n, 0);
    for (auto& [u, c] : g.source_arcs) is_target[u] = 1;
    bool starts_isolated = true;
    for (int v = 0; v < g.n && starts_isolated; ++v) {
        if (!g.alive[v]) continue;
        for (auto& [j, c] : g.succ[v])
            if (is_target[j]) starts_isolated = false;
    }

    const int m = arr.size();
    if (g.source_arcs.empty()) {
        result.best.cost = 0.0;
        result.proven_optimal = true;
        return result;
    }
    if (m == 0) {
        // No colorable vertices: only single-vertex paths are representable.
        Coloring empty;
        empty.colors = plan.colors;
        empty.color.assign(g.n, -1);
        result.best = colorful_dp(g, empty, inst.length_limit);
        result.trials_run = 1;
        if (result.best.has_path() && result.best.cost < -1e-12)
            result.first_negative = result.best;
        result.proven_optimal = starts_isolated;
        result.best.is_proven_optimal = starts_isolated;
        return result;
    }

    const bool guaranteed = plan.strategy == ColoringStrategy::PermInterval &&
                            arr.delta_max <= plan.colors && starts_isolated;
    int max_trials = guaranteed
                         ? plan.colors
                         : (plan.trial_budget > 0 ? plan.trial_budget
                                                  : trial_count(plan.rho, plan.colors));
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration<double>(time_limit_s);

    for (int t = 0; t < max_trials; ++t) {
        ColoringPlan trial_plan = plan;
        trial_plan.shift_offset = (plan.shift_offset + t) % m;
        trial_plan.rng_seed = splitmix64(plan.rng_seed ^ splitmix64(static_cast<std::uint64_t>(t)));
        Coloring col = color_vertices(trial_plan, arr, g.n);
        EmpplcSolution sol = colorful_dp(g, col, inst.length_limit);
        ++result.trials_run;
        if (sol.has_path()) {
            validate_empplc_path(g, sol.path, sol.cost);
            if (detail::lex_better(sol.cost, sol.path, result.best.cost, result.best.path)) {
                result.best.cost = sol.cost;
                result.best.path = sol.path;
            }
            if (sol.cost < -1e-12 && !result.first_negative) result.first_negative = sol;
        }
        if (!guaranteed) {
            if (stop_on_negative && result.first_negative) break;
            if (std::chrono::steady_clock::now() > deadline) break;
        }
    }

    if (guaranteed) {
        result.proven_optimal = true;
        result.best.is_proven_optimal = true;
    }
    if (!result.best.has_path()) result.best.cost = 0.0;
    return result;
}

}  // namespace kepcg

#endif

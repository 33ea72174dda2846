#ifndef KEPCG_EMPPLC_HPP
#define KEPCG_EMPPLC_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "kepcg/errors.hpp"
#include "kepcg/pricing_graph.hpp"
#include "kepcg/rng.hpp"

namespace kepcg {

enum class SolutionKind { Exact, Heuristic, RelaxationBound };
enum class PricingTarget { BestOverall, FirstNegative };

/// Minimum-cost elementary path from the source with at most L arcs.
struct EmpplcInstance {
    const PricingGraph* graph = nullptr;
    int length_limit = 0;  // max arcs from the source
    PricingTarget target = PricingTarget::BestOverall;

    explicit EmpplcInstance(const PricingGraph& g,
                            PricingTarget t = PricingTarget::BestOverall)
        : graph(&g), length_limit(g.length_limit), target(t) {}
};

struct EmpplcSolution {
    std::vector<int> path;  // real vertex indices, source omitted; empty = no path
    double cost = 0.0;
    bool is_proven_optimal = false;
    SolutionKind kind = SolutionKind::Exact;
    bool elementary = true;

    bool has_path() const { return !path.empty(); }
};

/// Checks elementarity, arc existence, the length limit, and that `cost`
/// matches the recomputed arc sum.
inline void validate_empplc_path(const PricingGraph& g, const std::vector<int>& path,
                                 double cost) {
    if (path.empty()) return;
    if (static_cast<int>(path.size()) > g.length_limit)
        throw ValidationError("path exceeds length limit");
    std::vector<int> sorted = path;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError("path is not elementary");
    double recomputed = g.path_cost(path);
    if (std::abs(recomputed - cost) > 1e-12 * std::max(1.0, std::abs(cost)) + 1e-12)
        throw ValidationError("path cost mismatch");
}

namespace detail {

inline bool lex_better(double cost, const std::vector<int>& path, double best_cost,
                       const std::vector<int>& best_path) {
    if (cost < best_cost - 1e-12) return true;
    if (cost > best_cost + 1e-12) return false;
    return best_path.empty() || path < best_path;
}

}  // namespace detail

/// Exhaustive elementary-path search (the ground-truth oracle). Depth-first
/// over the preprocessed graph with a visited set; no cost pruning, since
/// arcs may be negative. Ties broken by lexicographically smallest path.
inline EmpplcSolution solve_exact(const EmpplcInstance& inst,
                                  std::size_t node_budget = 200'000'000) {
    const PricingGraph& g = *inst.graph;
    const int L = inst.length_limit;
    EmpplcSolution best;
    best.kind = SolutionKind::Exact;
    best.cost = std::numeric_limits<double>::infinity();
    std::size_t nodes = 0;

    std::vector<int> path;
    std::vector<char> visited(g.n, 0);

    auto dfs = [&](auto&& self, int v, double cost) -> void {
        if (++nodes > node_budget)
            throw UnsupportedError("exact EMPPLC enumeration exceeds node budget");
        if (detail::lex_better(cost, path, best.cost, best.path)) {
            best.cost = cost;
            best.path = path;
        }
        if (static_cast<int>(path.size()) >= L) return;
        for (auto& [j, c] : g.succ[v]) {
            if (visited[j]) continue;
            visited[j] = 1;
            path.push_back(j);
            self(self, j, cost + c);
            path.pop_back();
            visited[j] = 0;
        }
    };

    for (auto& [u, c] : g.source_arcs) {
        visited.assign(g.n, 0);
        visited[u] = 1;
        path.assign(1, u);
        dfs(dfs, u, c);
    }

    if (!best.has_path()) {
        best.cost = 0.0;  // no-path convention
        best.is_proven_optimal = true;
        return best;
    }
    best.is_proven_optimal = true;
    return best;
}

struct LocalSearchResult {
    std::optional<EmpplcSolution> first_negative;
    EmpplcSolution best;
};

/// Local-search pricing heuristic. Moves: single-vertex insertion at any
/// position, removal of up to 3 consecutive vertices, 1-for-1 vertex
/// exchange; first improvement, random-altruist restart on local optimum.
inline LocalSearchResult solve_local_search(const EmpplcInstance& inst, double time_limit_s,
                                            std::uint64_t seed = 0) {
    if (time_limit_s <= 0.0) throw ParameterError("time limit must be positive");
    const PricingGraph& g = *inst.graph;
    const int L = inst.length_limit;
    LocalSearchResult result;
    result.best.kind = SolutionKind::Heuristic;
    result.best.cost = std::numeric_limits<double>::infinity();

    if (g.source_arcs.empty()) {
        result.best.cost = 0.0;
        return result;
    }

    auto rng = make_stream(seed, 0x15);
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration<double>(time_limit_s);

    auto source_cost = [&](int v) -> std::optional<double> {
        for (auto& [u, c] : g.source_arcs)
            if (u == v) return c;
        return std::nullopt;
    };
    auto arc_cost = [&](int u, int v) -> std::optional<double> {
        for (auto& [j, c] : g.succ[u])
            if (j == v) return c;
        return std::nullopt;
    };

    std::vector<char> on_path(g.n, 0);
    std::vector<int> path;
    double cost = 0.0;

    auto record = [&](const std::vector<int>& p, double c) {
        if (detail::lex_better(c, p, result.best.cost, result.best.path)) {
            result.best.cost = c;
            result.best.path = p;
        }
        if (c < -1e-12 && !result.first_negative) {
            EmpplcSolution fn;
            fn.kind = SolutionKind::Heuristic;
            fn.path = p;
            fn.cost = c;
            result.first_negative = fn;
        }
    };

    auto start_from = [&](int altruist) {
        std::fill(on_path.begin(), on_path.end(), 0);
        path.assign(1, altruist);
        on_path[altruist] = 1;
        cost = *source_cost(altruist);
        // Greedy extension by cheapest outgoing arc while it pays off.
        while (static_cast<int>(path.size()) < L) {
            int best_j = -1;
            double best_c = std::numeric_limits<double>::infinity();
            for (auto& [j, c] : g.succ[path.back()])
                if (!on_path[j] && c < best_c) {
                    best_c = c;
                    best_j = j;
                }
            if (best_j < 0 || best_c >= 0.0) break;
            path.push_back(best_j);
            on_path[best_j] = 1;
            cost += best_c;
        }
        record(path, cost);
    };

    // Start from the cheapest source arc.
    int first = g.source_arcs[0].first;
    double first_c = g.source_arcs[0].second;
    for (auto& [u, c] : g.source_arcs)
        if (c < first_c) {
            first = u;
            first_c = c;
        }
    start_from(first);

    auto try_path = [&](std::vector<int>& cand) -> std::optional<double> {
        if (cand.empty() || static_cast<int>(cand.size()) > L) return std::nullopt;
        auto sc = source_cost(cand[0]);
        if (!sc) return std::nullopt;
        double c = *sc;
        for (std::size_t i = 0; i + 1 < cand.size(); ++i) {
            auto ac = arc_cost(cand[i], cand[i + 1]);
            if (!ac) return std::nullopt;
            c += *ac;
        }
        return c;
    };

    std::uniform_int_distribution<std::size_t> pick_source(0, g.source_arcs.size() - 1);
    bool out_of_time = false;
    while (!out_of_time) {
        bool improved = true;
        while (improved) {
            improved = false;
            if (std::chrono::steady_clock::now() > deadline) {
                out_of_time = true;
                break;
            }
            const std::size_t len = path.size();
            // Insertion of one vertex at any position.
            for (int v = 0; v < g.n && !improved; ++v) {
                if (on_path[v] || !g.alive[v]) continue;
                for (std::size_t pos = 0; pos <= len && !improved; ++pos) {
                    std::vector<int> cand = path;
                    cand.insert(cand.begin() + pos, v);
                    auto c = try_path(cand);
                    if (c && *c < cost - 1e-12) {
                        path = cand;
                        cost = *c;
                        std::fill(on_path.begin(), on_path.end(), 0);
                        for (int u : path) on_path[u] = 1;
                        record(path, cost);
                        improved = true;
                    }
                }
            }
            // Removal of up to 3 consecutive vertices.
            for (std::size_t pos = 0; pos < len && !improved; ++pos) {
                for (std::size_t run = 1; run <= 3 && pos + run <= len && !improved; ++run) {
                    if (len - run < 1) continue;
                    std::vector<int> cand = path;
                    cand.erase(cand.begin() + pos, cand.begin() + pos + run);
                    auto c = try_path(cand);
                    if (c && *c < cost - 1e-12) {
                        path = cand;
                        cost = *c;
                        std::fill(on_path.begin(), on_path.end(), 0);
                        for (int u : path) on_path[u] = 1;
                        record(path, cost);
                        improved = true;
                    }
                }
            }
            // 1-for-1 exchange.
            for (std::size_t pos = 0; pos < len && !improved; ++pos) {
                for (int v = 0; v < g.n && !improved; ++v) {
                    if (on_path[v] || !g.alive[v]) continue;
                    std::vector<int> cand = path;
                    cand[pos] = v;
                    auto c = try_path(cand);
                    if (c && *c < cost - 1e-12) {
                        path = cand;
                        cost = *c;
                        std::fill(on_path.begin(), on_path.end(), 0);
                        for (int u : path) on_path[u] = 1;
                        record(path, cost);
                        improved = true;
                    }
                }
            }
        }
        if (out_of_time || std::chrono::steady_clock::now() > deadline) break;
        start_from(g.source_arcs[pick_source(rng)].first);
    }

    if (!result.best.has_path()) result.best.cost = 0.0;
    if (result.first_negative)
        validate_empplc_path(g, result.first_negative->path, result.first_negative->cost);
    validate_empplc_path(g, result.best.path, result.best.cost);
    return result;
}

}  // namespace kepcg

#endif

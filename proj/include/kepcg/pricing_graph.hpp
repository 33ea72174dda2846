#ifndef KEPCG_PRICING_GRAPH_HPP
#define KEPCG_PRICING_GRAPH_HPP

#include <algorithm>
#include <deque>
#include <utility>
#include <vector>

#include "kepcg/errors.hpp"
#include "kepcg/exchange.hpp"
#include "kepcg/instance.hpp"

namespace kepcg {

/// Source-augmented digraph for chain pricing. Real vertices are dense
/// indices 0..n-1; the artificial source is index n. Arc costs are
/// c_uv = -w_uv + alpha_v, source arcs (s,u) for each altruist u cost alpha_u,
/// so the cost of a path equals the opposite of the chain's reduced cost.
struct PricingGraph {
    int n = 0;
    int length_limit = 0;  // max arcs on a path from the source
    std::vector<std::vector<std::pair<int, double>>> succ;  // real -> (real, cost)
    std::vector<std::pair<int, double>> source_arcs;        // (vertex, cost)
    std::vector<char> alive;
    std::vector<std::vector<int>> hop;         // (n+1)x(n+1), inf() if unreachable
    std::vector<std::vector<int>> gamma;       // extended neighborhoods, sorted
    std::vector<std::vector<int>> gamma_pred;  // extended predecessors, sorted
    bool preprocessed = false;

    int source() const { return n; }
    int inf() const { return n + 2; }

    bool has_gamma(int i, int j) const {
        return std::binary_search(gamma[i].begin(), gamma[i].end(), j);
    }
    bool has_gamma_pred(int i, int j) const {
        return std::binary_search(gamma_pred[i].begin(), gamma_pred[i].end(), j);
    }

    double path_cost(const std::vector<int>& path) const {
        if (path.empty()) return 0.0;
        double c = 0.0;
        bool found = false;
        for (auto& [v, cost] : source_arcs)
            if (v == path[0]) {
                c += cost;
                found = true;
                break;
            }
        if (!found) throw ValidationError("path does not start at an altruist");
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            bool ok = false;
            for (auto& [j, cost] : succ[path[i]])
                if (j == path[i + 1]) {
                    c += cost;
                    ok = true;
                    break;
                }
            if (!ok) throw ValidationError("missing arc on path");
        }
        return c;
    }
};

inline PricingGraph build_pricing_graph(const CompatibilityInstance& inst,
                                        const DualVector& duals) {
    if (static_cast<int>(duals.alpha.size()) != inst.n())
        throw ValidationError("dual vector does not cover every vertex");
    PricingGraph g;
    g.n = inst.n();
    g.length_limit = inst.l();
    g.succ.assign(g.n, {});
    g.alive.assign(g.n, 1);
    for (int u = 0; u < g.n; ++u)
        for (auto& [v, w] : inst.succ(u))
            g.succ[u].emplace_back(v, -w + duals.alpha[v]);
    for (int u = 0; u < g.n; ++u)
        if (inst.is_altruist(u)) g.source_arcs.emplace_back(u, duals.alpha[u]);
    return g;
}

/// Builds a pricing graph directly from raw cost data (the EMPPLC file form).
inline PricingGraph build_pricing_graph_raw(int n, int length_limit,
                                            std::vector<std::pair<int, double>> source_arcs,
                                            const std::vector<std::tuple<int, int, double>>& arcs) {
    PricingGraph g;
    g.n = n;
    g.length_limit = length_limit;
    g.succ.assign(n, {});
    g.alive.assign(n, 1);
    g.source_arcs = std::move(source_arcs);
    for (auto& [from, to, c] : arcs) g.succ[from].emplace_back(to, c);
    for (auto& row : g.succ) std::sort(row.begin(), row.end());
    std::sort(g.source_arcs.begin(), g.source_arcs.end());
    return g;
}

/// One BFS per vertex over surviving arcs; d(i,j) counts arcs, inf() if
/// unreachable. The source row is computed over the source arcs.
inline void compute_hop_distances(PricingGraph& g) {
    const int sz = g.n + 1;
    g.hop.assign(sz, std::vector<int>(sz, g.inf()));
    std::deque<int> queue;
    for (int start = 0; start <= g.n; ++start) {
        if (start < g.n && !g.alive[start]) continue;
        auto& dist = g.hop[start];
        dist[start] = 0;
        queue.clear();
        if (start == g.source()) {
            for (auto& [v, c] : g.source_arcs)
                if (g.alive[v] && dist[v] == g.inf()) {
                    dist[v] = 1;
                    queue.push_back(v);
                }
        } else {
            queue.push_back(start);
        }
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (auto& [v, c] : g.succ[u]) {
                if (!g.alive[v] || dist[v] != g.inf()) continue;
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
}

/// Removes every vertex with d(s,i) > L and every arc (i,j) with
/// d(s,i) + 1 > L (distances taken before any removal), then recomputes the
/// distance table on the surviving graph.
inline void preprocess(PricingGraph& g) {
    if (g.hop.empty()) throw ValidationError("hop distances not computed");
    const auto& ds = g.hop[g.source()];
    for (int i = 0; i < g.n; ++i)
        if (ds[i] > g.length_limit) g.alive[i] = 0;
    for (int i = 0; i < g.n; ++i) {
        auto& row = g.succ[i];
        if (!g.alive[i] || ds[i] + 1 > g.length_limit) {
            row.clear();
            continue;
        }
        std::erase_if(row, [&](const std::pair<int, double>& a) { return !g.alive[a.first]; });
    }
    std::erase_if(g.source_arcs,
                  [&](const std::pair<int, double>& a) { return !g.alive[a.first]; });
    g.preprocessed = true;
    compute_hop_distances(g);
}

/// gamma(i) = { j : d(s,i)+d(i,j) <= L or d(s,j)+d(j,i) <= L },
/// gamma-(i) = { j : d(s,j)+d(j,i) <= L }, over surviving vertices.
inline void compute_extended_sets(PricingGraph& g) {
    if (g.hop.empty()) throw ValidationError("hop distances not computed");
    const int s = g.source();
    const int L = g.length_limit;
    g.gamma.assign(g.n, {});
    g.gamma_pred.assign(g.n, {});
    auto bounded_sum = [&](int a, int b) {
        return (a >= g.inf() || b >= g.inf()) ? g.inf() : a + b;
    };
    for (int i = 0; i < g.n; ++i) {
        if (!g.alive[i]) continue;
        for (int j = 0; j < g.n; ++j) {
            if (!g.alive[j]) continue;
            bool fwd = bounded_sum(g.hop[s][i], g.hop[i][j]) <= L;
            bool bwd = bounded_sum(g.hop[s][j], g.hop[j][i]) <= L;
            if (fwd || bwd) g.gamma[i].push_back(j);
            if (bwd) g.gamma_pred[i].push_back(j);
        }
    }
}

/// Full pipeline: build, distances, preprocessing, extended sets.
inline PricingGraph prepare_pricing_graph(const CompatibilityInstance& inst,
                                          const DualVector& duals) {
    PricingGraph g = build_pricing_graph(inst, duals);
    compute_hop_distances(g);
    preprocess(g);
    compute_extended_sets(g);
    return g;
}

inline void prepare(PricingGraph& g) {
    compute_hop_distances(g);
    preprocess(g);
    compute_extended_sets(g);
}

}  // namespace kepcg

#endif

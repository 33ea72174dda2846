#ifndef KEPCG_TESTS_ORACLE_HPP
#define KEPCG_TESTS_ORACLE_HPP

// Independent reference implementations used to pin expected values. These
// deliberately share no code with the library solvers.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kepcg/exchange.hpp"
#include "kepcg/instance.hpp"
#include "kepcg/pricing_graph.hpp"

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

// The worked 7-vertex fixture: altruists 1,2; pairs 3..7; K=3, L=4.
inline kepcg::CompatibilityInstance g1(int k = 3, int l = 4) {
    std::vector<std::pair<kepcg::VertexId, bool>> vertices{
        {1, true}, {2, true}, {3, false}, {4, false}, {5, false}, {6, false}, {7, false}};
    std::vector<kepcg::Arc> arcs{{1, 3, 1}, {2, 3, 1}, {3, 5, 1}, {5, 7, 1},
                                 {7, 6, 1}, {6, 5, 1}, {4, 6, 1}, {6, 4, 1}};
    return kepcg::CompatibilityInstance(vertices, arcs, k, l);
}

// ---- pricing-graph path oracles ----------------------------------------

struct PathRecord {
    std::vector<int> path;  // real vertices, source omitted
    double cost;
};

/// Every elementary source path with 1..L arcs, by plain recursion.
inline std::vector<PathRecord> all_paths(const kepcg::PricingGraph& g) {
    std::vector<PathRecord> out;
    std::vector<int> cur;
    std::vector<char> used(g.n, 0);
    auto rec = [&](auto&& self, int v, double cost) -> void {
        out.push_back({cur, cost});
        if (static_cast<int>(cur.size()) >= g.length_limit) return;
        for (auto& [j, c] : g.succ[v]) {
            if (used[j]) continue;
            used[j] = 1;
            cur.push_back(j);
            self(self, j, cost + c);
            cur.pop_back();
            used[j] = 0;
        }
    };
    for (auto& [u, c] : g.source_arcs) {
        used.assign(g.n, 0);
        used[u] = 1;
        cur.assign(1, u);
        rec(rec, u, c);
    }
    return out;
}

/// Minimum-cost elementary path (lexicographic tie-break); 0 and empty if no
/// path exists.
inline PathRecord best_path(const kepcg::PricingGraph& g) {
    PathRecord best{{}, 0.0};
    bool found = false;
    for (const PathRecord& p : all_paths(g)) {
        if (!found || p.cost < best.cost - 1e-12 ||
            (p.cost < best.cost + 1e-12 && p.path < best.path)) {
            best = p;
            found = true;
        }
    }
    return best;
}

/// Held-Karp style DP over (visited bitset, end vertex); requires n <= 24.
inline double held_karp(const kepcg::PricingGraph& g) {
    const double inf = std::numeric_limits<double>::infinity();
    std::map<std::pair<std::uint32_t, int>, double> layer;
    for (auto& [u, c] : g.source_arcs) {
        auto key = std::make_pair(std::uint32_t{1} << u, u);
        auto it = layer.find(key);
        if (it == layer.end() || c < it->second) layer[key] = c;
    }
    double best = inf;
    for (int arcs = 1; arcs <= g.length_limit; ++arcs) {
        std::map<std::pair<std::uint32_t, int>, double> next;
        for (auto& [key, cost] : layer) {
            best = std::min(best, cost);
            auto [mask, v] = key;
            if (arcs == g.length_limit) continue;
            for (auto& [j, c] : g.succ[v]) {
                if (mask & (std::uint32_t{1} << j)) continue;
                auto nk = std::make_pair(mask | (std::uint32_t{1} << j), j);
                auto it = next.find(nk);
                if (it == next.end() || cost + c < it->second) next[nk] = cost + c;
            }
        }
        layer = std::move(next);
    }
    return best == inf ? 0.0 : best;
}

/// Hop-limited minimum walk cost from the source (repeats allowed): the
/// reference value for the eta = {i} ng relaxation.
inline double min_walk(const kepcg::PricingGraph& g) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cur(g.n, inf);
    for (auto& [u, c] : g.source_arcs) cur[u] = std::min(cur[u], c);
    double best = inf;
    for (int arcs = 1; arcs <= g.length_limit; ++arcs) {
        for (double c : cur) best = std::min(best, c);
        std::vector<double> next(g.n, inf);
        for (int v = 0; v < g.n; ++v) {
            if (cur[v] == inf) continue;
            for (auto& [j, c] : g.succ[v]) next[j] = std::min(next[j], cur[v] + c);
        }
        cur = std::move(next);
    }
    return best == inf ? 0.0 : best;
}

// ---- exact rational LP for the packing problem --------------------------

/// max sum c_j x_j s.t. for each row at most one of the covering x_j, x >= 0.
/// Dense rational tableau simplex with Bland's rule; exact, always terminates.
inline Rational packing_lp_value(int num_rows, const std::vector<std::vector<int>>& cols,
                                 const std::vector<Rational>& obj) {
    const int m = num_rows;
    const int n = static_cast<int>(cols.size());
    // Tableau: rows 0..m-1 constraints over n structural + m slack columns,
    // row m = objective (as -c for maximization).
    std::vector<std::vector<Rational>> t(m + 1, std::vector<Rational>(n + m + 1, 0));
    for (int j = 0; j < n; ++j)
        for (int r : cols[j]) t[r][j] = 1;
    for (int r = 0; r < m; ++r) {
        t[r][n + r] = 1;
        t[r][n + m] = 1;  // rhs
    }
    for (int j = 0; j < n; ++j) t[m][j] = -obj[j];

    std::vector<int> basis(m);
    for (int r = 0; r < m; ++r) basis[r] = n + r;

    while (true) {
        int enter = -1;
        for (int j = 0; j < n + m; ++j)
            if (t[m][j] < 0) {
                enter = j;
                break;  // Bland: lowest index
            }
        if (enter < 0) break;
        int leave = -1;
        Rational best_ratio = 0;
        for (int r = 0; r < m; ++r) {
            if (t[r][enter] <= 0) continue;
            Rational ratio = t[r][n + m] / t[r][enter];
            if (leave < 0 || ratio < best_ratio ||
                (ratio == best_ratio && basis[r] < basis[leave])) {
                leave = r;
                best_ratio = ratio;
            }
        }
        if (leave < 0) break;  // unbounded; cannot happen for packing
        Rational piv = t[leave][enter];
        for (auto& x : t[leave]) x /= piv;
        for (int r = 0; r <= m; ++r) {
            if (r == leave || t[r][enter] == 0) continue;
            Rational f = t[r][enter];
            for (int j = 0; j <= n + m; ++j) t[r][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }
    return t[m][n + m];
}

inline double full_exf_lp(const kepcg::CompatibilityInstance& inst,
                          const std::vector<kepcg::Exchange>& exchanges) {
    std::vector<std::vector<int>> cols;
    std::vector<Rational> obj;
    for (const auto& e : exchanges) {
        std::vector<int> rows;
        for (kepcg::VertexId v : e.vertices) rows.push_back(inst.index_of(v));
        cols.push_back(rows);
        obj.emplace_back(e.weight);  // doubles convert exactly (dyadic rationals)
    }
    return static_cast<double>(packing_lp_value(inst.n(), cols, obj));
}

// ---- exact IP over an explicit column set -------------------------------

/// Max-weight packing by branching on the lowest uncovered vertex; exact.
inline double packing_ip_value(const kepcg::CompatibilityInstance& inst,
                               const std::vector<kepcg::Exchange>& exchanges) {
    const int n = inst.n();
    std::vector<std::uint32_t> masks;
    std::vector<double> weights;
    for (const auto& e : exchanges) {
        std::uint32_t m = 0;
        for (kepcg::VertexId v : e.vertices) m |= std::uint32_t{1} << inst.index_of(v);
        masks.push_back(m);
        weights.push_back(e.weight);
    }
    std::unordered_map<std::uint32_t, double> memo;
    auto rec = [&](auto&& self, std::uint32_t used) -> double {
        int i = -1;
        for (int v = 0; v < n; ++v)
            if (!(used & (std::uint32_t{1} << v))) {
                i = v;
                break;
            }
        if (i < 0) return 0.0;
        auto it = memo.find(used);
        if (it != memo.end()) return it->second;
        // Either vertex i stays unused...
        double best = self(self, used | (std::uint32_t{1} << i));
        // ...or some column covering i is chosen.
        for (std::size_t j = 0; j < masks.size(); ++j) {
            if (!(masks[j] & (std::uint32_t{1} << i))) continue;
            if (masks[j] & used) continue;
            best = std::max(best, weights[j] + self(self, used | masks[j]));
        }
        memo[used] = best;
        return best;
    };
    return n > 0 ? rec(rec, 0) : 0.0;
}

// ---- random test instances ----------------------------------------------

/// Small random KEP instance (dense ids 0..n-1, unit or random weights).
inline kepcg::CompatibilityInstance random_instance(std::mt19937_64& rng, int max_vertices,
                                                    int k, int l, bool unit_weights = true,
                                                    double arc_prob = 0.3,
                                                    double altruist_prob = 0.25) {
    std::uniform_int_distribution<int> nv(2, max_vertices);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    while (true) {
        int n = nv(rng);
        std::vector<std::pair<kepcg::VertexId, bool>> vertices;
        std::vector<char> alt(n, 0);
        for (int v = 0; v < n; ++v) {
            alt[v] = u01(rng) < altruist_prob;
            vertices.emplace_back(v, alt[v] != 0);
        }
        std::vector<kepcg::Arc> arcs;
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) {
                if (u == v || alt[v]) continue;
                if (u01(rng) < arc_prob)
                    arcs.push_back({u, v, unit_weights ? 1.0 : u01(rng)});
            }
        if (arcs.empty()) continue;
        return kepcg::CompatibilityInstance(vertices, arcs, k, l);
    }
}

/// Random standalone pricing graph with signed costs and >= 1 source arc.
inline kepcg::PricingGraph random_pricing(std::mt19937_64& rng, int max_vertices, int l,
                                          double arc_prob = 0.3) {
    std::uniform_int_distribution<int> nv(2, max_vertices);
    std::uniform_real_distribution<double> cost(-1.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    while (true) {
        int n = nv(rng);
        std::vector<std::pair<int, double>> source_arcs;
        std::vector<std::tuple<int, int, double>> arcs;
        for (int v = 0; v < n; ++v)
            if (u01(rng) < 0.3) source_arcs.emplace_back(v, cost(rng));
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (u != v && u01(rng) < arc_prob) arcs.emplace_back(u, v, cost(rng));
        if (source_arcs.empty()) continue;
        return kepcg::build_pricing_graph_raw(n, l, std::move(source_arcs), arcs);
    }
}

}  // namespace oracle

#endif

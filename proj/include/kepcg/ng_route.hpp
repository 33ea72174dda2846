#ifndef KEPCG_NG_ROUTE_HPP
#define KEPCG_NG_ROUTE_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "kepcg/empplc.hpp"
#include "kepcg/errors.hpp"
#include "kepcg/exchange.hpp"
#include "kepcg/pricing_graph.hpp"
#include "kepcg/rng.hpp"

namespace kepcg {

enum class NgConstruction { UniformRandom, DualGuidedNeighborhood };

/// Per-vertex memory sets (eta_i, always containing i, sorted).
struct NgSets {
    std::vector<std::vector<int>> eta;
    int lambda = 0;
    NgConstruction construction = NgConstruction::DualGuidedNeighborhood;
};

/// eta_i = {i} + the Lambda extended predecessors of i with the highest dual
/// value (ties by lower vertex index), or Lambda uniform draws for the
/// UniformRandom construction.
inline NgSets build_ng_sets(const PricingGraph& g, const DualVector& duals, int lambda,
                            NgConstruction construction, std::uint64_t seed = 0) {
    if (lambda < 0) throw ParameterError("ng-set size must be >= 0");
    NgSets sets;
    sets.lambda = lambda;
    sets.construction = construction;
    sets.eta.assign(g.n, {});
    auto rng = make_stream(seed, 0x96);
    for (int i = 0; i < g.n; ++i) {
        if (!g.alive[i]) continue;
        std::vector<int>& eta = sets.eta[i];
        if (construction == NgConstruction::DualGuidedNeighborhood) {
            std::vector<int> cand;
            for (int j : g.gamma_pred[i])
                if (j != i) cand.push_back(j);
            std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
                if (duals.alpha[a] != duals.alpha[b]) return duals.alpha[a] > duals.alpha[b];
                return a < b;
            });
            if (static_cast<int>(cand.size()) > lambda) cand.resize(lambda);
            eta = std::move(cand);
        } else {
            std::vector<int> pool;
            for (int j = 0; j < g.n; ++j)
                if (j != i && g.alive[j]) pool.push_back(j);
            std::shuffle(pool.begin(), pool.end(), rng);
            if (static_cast<int>(pool.size()) > lambda) pool.resize(lambda);
            eta = std::move(pool);
        }
        eta.push_back(i);
        std::sort(eta.begin(), eta.end());
    }
    return sets;
}

/// Memory carried over an extension ending at i: (pi_prev intersect eta_i)
/// plus i. Returns nullopt when i is already remembered (label pruned).
inline std::optional<std::vector<int>> project_memory(const std::vector<int>& pi_prev, int i,
                                                      const NgSets& sets) {
    if (std::binary_search(pi_prev.begin(), pi_prev.end(), i)) return std::nullopt;
    std::vector<int> out;
    const auto& eta = sets.eta[i];
    std::set_intersection(pi_prev.begin(), pi_prev.end(), eta.begin(), eta.end(),
                          std::back_inserter(out));
    out.insert(std::lower_bound(out.begin(), out.end(), i), i);
    return out;
}

enum class NgDirection { Forward, Backward };

struct NgDpOptions {
    bool use_dominance = true;
    /// Opposite-direction label costs [vertex][arcs]; when set, labels whose
    /// cost plus completion bound exceeds 0 are pruned and the run only
    /// promises exactness for negative optima.
    const std::vector<std::vector<double>>* completion_bounds = nullptr;
};

struct NgDpResult {
    double bound = 0.0;
    std::vector<int> best_path;  // walk over real vertices; may repeat vertices
    bool elementary = false;
    bool no_path = false;
    /// Filtering found no negative walk; bound is reported as 0 and best_path
    /// is empty (surviving labels need not contain the true minimum).
    bool certified_nonnegative = false;
    std::vector<std::vector<double>> label_costs;  // [vertex][arcs 0..L]
};

namespace ngdetail {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline int local_index(const std::vector<int>& eta, int v) {
    auto it = std::lower_bound(eta.begin(), eta.end(), v);
    if (it == eta.end() || *it != v) return -1;
    return static_cast<int>(it - eta.begin());
}

// Kills every label whose memory strictly contains a cheaper-or-equal one.
inline void dominance_pass(std::vector<double>& cost, int bits) {
    const int size = 1 << bits;
    std::vector<double> best_sub(size, kInf);
    for (int m = 1; m < size; ++m) {
        for (int b = 0; b < bits; ++b) {
            if (!((m >> b) & 1)) continue;
            int sub = m ^ (1 << b);
            best_sub[m] = std::min(best_sub[m], std::min(cost[sub], best_sub[sub]));
        }
        if (best_sub[m] <= cost[m]) cost[m] = kInf;
    }
}

inline bool is_elementary(const std::vector<int>& walk) {
    std::vector<int> sorted = walk;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

}  // namespace ngdetail

/// Label-setting DP over ng-paths (memory set, arc count, end vertex).
/// Returns the minimum walk cost, a valid lower bound on the elementary
/// optimum, plus per-(vertex, length) label minima for completion bounds.
inline NgDpResult ng_dp(const PricingGraph& g, const std::vector<std::vector<int>>& eta, int L,
                        NgDirection direction, const NgDpOptions& options = {}) {
    using ngdetail::kInf;
    NgDpResult result;
    const int n = g.n;
    const double tol = 1e-9;

    for (int i = 0; i < n; ++i)
        if (g.alive[i] && static_cast<int>(eta[i].size()) > 20)
            throw UnsupportedError("ng memory set larger than 20 vertices");

    // Prefix minima of the opposite-direction completion bounds.
    std::vector<std::vector<double>> cb;
    if (options.completion_bounds) {
        cb.assign(n, std::vector<double>(L + 1, kInf));
        for (int i = 0; i < n; ++i) {
            double run = kInf;
            for (int r = 0; r <= L; ++r) {
                if (r < static_cast<int>((*options.completion_bounds)[i].size()))
                    run = std::min(run, (*options.completion_bounds)[i][r]);
                cb[i][r] = run;
            }
        }
    }
    auto pruned = [&](int i, double cost, int remaining) {
        if (!options.completion_bounds) return false;
        double bound = cb[i][remaining];
        if (direction == NgDirection::Forward) {
            // A forward label is already a complete walk; remaining = 0 is
            // always allowed.
            bound = std::min(bound, 0.0);
        }
        return cost + bound > tol;
    };

    result.label_costs.assign(n, std::vector<double>(L + 1, kInf));

    // Per layer and vertex: flat arrays over local memory masks.
    struct Layer {
        std::vector<std::vector<double>> cost;
        std::vector<std::vector<int>> par_vertex;
        std::vector<std::vector<int>> par_mask;
    };
    std::vector<Layer> layers(L + 1);
    auto alloc_layer = [&](Layer& layer) {
        layer.cost.assign(n, {});
        layer.par_vertex.assign(n, {});
        layer.par_mask.assign(n, {});
        for (int i = 0; i < n; ++i) {
            if (!g.alive[i]) continue;
            int size = 1 << eta[i].size();
            layer.cost[i].assign(size, kInf);
            layer.par_vertex[i].assign(size, -1);
            layer.par_mask[i].assign(size, 0);
        }
    };

    std::vector<std::vector<std::pair<int, double>>> pred;
    if (direction == NgDirection::Backward) {
        pred.assign(n, {});
        for (int i = 0; i < n; ++i)
            for (auto& [j, c] : g.succ[i]) pred[j].emplace_back(i, c);
    }

    double best_cost = kInf;
    int best_len = -1, best_vertex = -1, best_mask = -1, best_source = -1;
    double best_source_cost = 0.0;

    auto project = [&](int from, int mask, int to) -> int {
        // (Pi intersect eta_to) | {to}; -1 if `to` is remembered in Pi.
        int jl = ngdetail::local_index(eta[from], to);
        if (jl >= 0 && ((mask >> jl) & 1)) return -1;
        int out = 1 << ngdetail::local_index(eta[to], to);
        int m = mask;
        while (m) {
            int b = std::countr_zero(static_cast<unsigned>(m));
            m &= m - 1;
            int v = eta[from][b];
            int lv = ngdetail::local_index(eta[to], v);
            if (lv >= 0) out |= 1 << lv;
        }
        return out;
    };

    const int first_len = direction == NgDirection::Forward ? 1 : 0;
    alloc_layer(layers[first_len]);
    if (direction == NgDirection::Forward) {
        for (auto& [u, c] : g.source_arcs) {
            if (!g.alive[u] || pruned(u, c, L - 1)) continue;
            int mask = 1 << ngdetail::local_index(eta[u], u);
            if (c < layers[1].cost[u][mask]) layers[1].cost[u][mask] = c;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            if (!g.alive[i] || pruned(i, 0.0, L)) continue;
            int mask = 1 << ngdetail::local_index(eta[i], i);
            layers[0].cost[i][mask] = 0.0;
        }
    }

    auto note_complete = [&](int len, int i, int mask, double c) {
        if (direction == NgDirection::Forward) {
            if (c < best_cost - 1e-15) {
                best_cost = c;
                best_len = len;
                best_vertex = i;
                best_mask = mask;
            }
        } else {
            for (auto& [u, sc] : g.source_arcs) {
                if (u != i || len > L - 1) continue;
                if (sc + c < best_cost - 1e-15) {
                    best_cost = sc + c;
                    best_len = len;
                    best_vertex = i;
                    best_mask = mask;
                    best_source = u;
                    best_source_cost = sc;
                }
            }
        }
    };

    for (int len = first_len; len <= L; ++len) {
        Layer& layer = layers[len];
        if (layer.cost.empty()) break;
        bool any = false;
        for (int i = 0; i < n; ++i) {
            if (!g.alive[i]) continue;
            if (options.use_dominance)
                ngdetail::dominance_pass(layer.cost[i], static_cast<int>(eta[i].size()));
            for (int mask = 0; mask < static_cast<int>(layer.cost[i].size()); ++mask) {
                double c = layer.cost[i][mask];
                if (c == kInf) continue;
                any = true;
                result.label_costs[i][len] = std::min(result.label_costs[i][len], c);
                note_complete(len, i, mask, c);
            }
        }
        if (!any || len == L) break;
        alloc_layer(layers[len + 1]);
        for (int i = 0; i < n; ++i) {
            if (!g.alive[i]) continue;
            for (int mask = 0; mask < static_cast<int>(layers[len].cost[i].size()); ++mask) {
                double c = layers[len].cost[i][mask];
                if (c == kInf) continue;
                if (direction == NgDirection::Forward) {
                    for (auto& [j, ac] : g.succ[i]) {
                        int nm = project(i, mask, j);
                        if (nm < 0) continue;
                        double nc = c + ac;
                        if (pruned(j, nc, L - (len + 1))) continue;
                        if (nc < layers[len + 1].cost[j][nm] - 1e-15) {
                            layers[len + 1].cost[j][nm] = nc;
                            layers[len + 1].par_vertex[j][nm] = i;
                            layers[len + 1].par_mask[j][nm] = mask;
                        }
                    }
                } else {
                    for (auto& [j, ac] : pred[i]) {
                        int nm = project(i, mask, j);
                        if (nm < 0) continue;
                        double nc = c + ac;
                        if (pruned(j, nc, L - (len + 1))) continue;
                        if (nc < layers[len + 1].cost[j][nm] - 1e-15) {
                            layers[len + 1].cost[j][nm] = nc;
                            layers[len + 1].par_vertex[j][nm] = i;
                            layers[len + 1].par_mask[j][nm] = mask;
                        }
                    }
                }
            }
        }
    }

    if (best_len < 0) {
        if (options.completion_bounds) {
            result.certified_nonnegative = true;
            result.bound = 0.0;
        } else {
            result.no_path = true;
            result.bound = 0.0;
        }
        return result;
    }
    if (options.completion_bounds && best_cost > -1e-12) {
        // Filtering only guarantees exactness below the 0 upper bound.
        result.certified_nonnegative = true;
        result.bound = 0.0;
        return result;
    }

    std::vector<int> walk;
    int len = best_len, v = best_vertex, mask = best_mask;
    while (v >= 0) {
        walk.push_back(v);
        int pv = layers[len].par_vertex[v][mask];
        int pm = layers[len].par_mask[v][mask];
        v = pv;
        mask = pm;
        --len;
    }
    if (direction == NgDirection::Forward) {
        std::reverse(walk.begin(), walk.end());
    } else {
        (void)best_source_cost;
    }
    result.bound = best_cost;
    result.best_path = std::move(walk);
    result.elementary = ngdetail::is_elementary(result.best_path);
    return result;
}

enum class DssrMode { None, Limited, Predefined, UnlimitedTestOnly };

struct NgConfig {
    DssrMode mode = DssrMode::Limited;
    NgConstruction construction = NgConstruction::DualGuidedNeighborhood;
    int lambda = 5;
    int size_limit = 5;  // Limited-mode cap on |mu_i|
    std::uint64_t seed = 0;
    bool use_completion_bounds = true;
    bool use_dominance = true;
};

struct NgSolveResult {
    EmpplcSolution solution;  // kind RelaxationBound; cost is the lower bound
    int iterations = 0;
    bool stalled = false;  // Limited cap prevented further descent
};

namespace ngdetail {

inline bool feasible_under(const std::vector<int>& walk, const std::vector<std::vector<int>>& eta) {
    std::vector<int> pi;
    for (std::size_t t = 0; t < walk.size(); ++t) {
        int v = walk[t];
        if (t > 0) {
            if (std::binary_search(pi.begin(), pi.end(), v)) return false;
            std::vector<int> next;
            std::set_intersection(pi.begin(), pi.end(), eta[v].begin(), eta[v].end(),
                                  std::back_inserter(next));
            pi = std::move(next);
        }
        pi.insert(std::lower_bound(pi.begin(), pi.end(), v), v);
    }
    return true;
}

}  // namespace ngdetail

/// Decremental state-space relaxation around ng_dp, alternating forward and
/// backward passes and feeding the previous pass's label costs as completion
/// bounds. Returns a certified lower bound; when the final walk is
/// elementary the bound equals the exact EMPPLC optimum.
inline NgSolveResult solve_ng_dssr(const PricingGraph& g, const DualVector& duals,
                                   const NgConfig& config) {
    if (config.mode == DssrMode::Limited && config.size_limit < 1)
        throw ParameterError("Limited DSSR needs size_limit >= 1");
    const int L = g.length_limit;
    const int n = g.n;

    NgSets base;
    if (config.mode == DssrMode::None || config.mode == DssrMode::Predefined)
        base = build_ng_sets(g, duals, config.lambda, config.construction, config.seed);

    std::vector<std::vector<int>> mu(n);  // without the implicit {i}
    auto memory_for_iteration = [&]() {
        if (config.mode == DssrMode::None) return base.eta;
        std::vector<std::vector<int>> eta(n);
        for (int i = 0; i < n; ++i) {
            if (!g.alive[i]) continue;
            eta[i] = mu[i];
            if (!std::binary_search(eta[i].begin(), eta[i].end(), i))
                eta[i].insert(std::lower_bound(eta[i].begin(), eta[i].end(), i), i);
        }
        return eta;
    };

    NgSolveResult out;
    out.solution.kind = SolutionKind::RelaxationBound;
    std::vector<std::vector<double>> prev_label_costs;
    bool have_prev = false;

    for (int k = 0;; ++k) {
        ++out.iterations;
        auto eta = memory_for_iteration();
        NgDirection dir = (k % 2 == 0) ? NgDirection::Forward : NgDirection::Backward;
        NgDpOptions opts;
        opts.use_dominance = config.use_dominance;
        if (config.use_completion_bounds && have_prev) opts.completion_bounds = &prev_label_costs;

        NgDpResult res = ng_dp(g, eta, L, dir, opts);
        if (res.certified_nonnegative) {
            // Rerun unfiltered for the true bound, walk and elementarity.
            NgDpOptions plain;
            plain.use_dominance = config.use_dominance;
            res = ng_dp(g, eta, L, dir, plain);
        }
        prev_label_costs = res.label_costs;
        have_prev = true;

        out.solution.cost = res.bound;
        out.solution.path = res.best_path;
        out.solution.elementary = res.elementary;
        if (res.no_path || res.elementary) {
            out.solution.is_proven_optimal = res.elementary || res.no_path;
            return out;
        }
        if (config.mode == DssrMode::None) return out;
        if (config.mode == DssrMode::Predefined &&
            ngdetail::feasible_under(res.best_path, base.eta))
            return out;

        // Augment: each repeated vertex joins the memory of every vertex
        // strictly between its consecutive occurrences.
        bool added = false;
        bool blocked = false;
        std::vector<std::vector<int>> occurrences(n);
        for (std::size_t t = 0; t < res.best_path.size(); ++t)
            occurrences[res.best_path[t]].push_back(static_cast<int>(t));
        for (int v = 0; v < n; ++v) {
            const auto& occ = occurrences[v];
            for (std::size_t o = 0; o + 1 < occ.size(); ++o) {
                for (int t = occ[o] + 1; t < occ[o + 1]; ++t) {
                    int w = res.best_path[t];
                    if (std::binary_search(mu[w].begin(), mu[w].end(), v)) continue;
                    if (config.mode == DssrMode::Predefined &&
                        !std::binary_search(base.eta[w].begin(), base.eta[w].end(), v))
                        continue;
                    if (config.mode == DssrMode::Limited &&
                        static_cast<int>(mu[w].size()) >= config.size_limit) {
                        blocked = true;
                        continue;
                    }
                    mu[w].insert(std::lower_bound(mu[w].begin(), mu[w].end(), v), v);
                    added = true;
                }
            }
        }
        if (!added) {
            out.stalled = blocked;
            return out;
        }
    }
}

}  // namespace kepcg

#endif

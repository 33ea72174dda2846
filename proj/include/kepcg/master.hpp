#ifndef KEPCG_MASTER_HPP
#define KEPCG_MASTER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "kepcg/errors.hpp"
#include "kepcg/exchange.hpp"
#include "kepcg/instance.hpp"
#include "kepcg/simplex.hpp"

namespace kepcg {

enum class SolveStatus { OptimalLP, UpperBoundOnly, TimeLimit };

inline std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::OptimalLP: return "OptimalLP";
        case SolveStatus::UpperBoundOnly: return "UpperBoundOnly";
        case SolveStatus::TimeLimit: return "TimeLimit";
    }
    return "?";
}

struct KepSolution {
    std::vector<Exchange> chosen;
    double objective = 0.0;
    double upper_bound = 0.0;
    double gap = 0.0;
    SolveStatus status = SolveStatus::OptimalLP;
    std::map<std::string, double> timings;
};

inline double compute_gap(double upper_bound, double objective) {
    return std::max(0.0, upper_bound - objective) / std::max(upper_bound, 1e-9);
}

struct RmpSolution {
    double lp_value = 0.0;
    std::vector<double> primal;  // per column
    DualVector duals;
};

/// Restricted master: the packing LP over the current column pool.
/// Column ids are assigned monotonically; duplicates (same kind and vertex
/// list) are silently skipped.
class RestrictedMaster {
public:
    explicit RestrictedMaster(const CompatibilityInstance& inst)
        : inst_(&inst), lp_(inst.n()) {}

    const CompatibilityInstance& instance() const { return *inst_; }
    const std::vector<Exchange>& columns() const { return columns_; }

    /// Inserts the exchange (validated) and, if `expand` and it is a chain,
    /// every prefix. Returns the number of new columns.
    int add_column(const Exchange& e, bool expand = false) {
        validate_exchange(e, *inst_);
        int added = insert(e);
        if (expand && e.kind == ExchangeKind::Chain)
            for (const Exchange& prefix : expand_subpaths(e, *inst_))
                added += insert(prefix);
        return added;
    }

    bool contains(const Exchange& e) const {
        return keys_.count(key(e)) > 0;
    }

    /// Solves the LP over the pooled columns; empty pool yields value 0 and
    /// zero duals.
    RmpSolution solve() {
        RmpSolution sol;
        sol.duals = DualVector::zeros(inst_->n());
        if (columns_.empty()) return sol;
        lp_.solve();
        sol.lp_value = lp_.objective();
        sol.primal = lp_.primal();
        sol.duals.alpha = lp_.duals();
        return sol;
    }

private:
    using Key = std::pair<int, std::vector<VertexId>>;

    Key key(const Exchange& e) const {
        return {static_cast<int>(e.kind), e.vertices};
    }

    int insert(const Exchange& e) {
        if (!keys_.insert(key(e)).second) return 0;
        Exchange stored = e;
        stored.column_id = static_cast<long>(columns_.size());
        std::vector<int> rows;
        for (VertexId v : stored.vertices) rows.push_back(inst_->index_of(v));
        lp_.add_column(std::move(rows), stored.weight);
        columns_.push_back(std::move(stored));
        return 1;
    }

    const CompatibilityInstance* inst_;
    std::vector<Exchange> columns_;
    std::set<Key> keys_;
    PackingLp lp_;
};

/// Valid upper bound on the full LP when CG is truncated: the last RMP value
/// plus |V|/2 times the best-known bound on the maximum reduced cost (the
/// instance holds at most |V|/2 exchanges).
inline double lagrangian_ub(double z_bar, double max_rc, int num_vertices) {
    return z_bar + (num_vertices / 2.0) * std::max(0.0, max_rc);
}

struct IpResult {
    std::vector<int> chosen;  // column indices
    double objective = 0.0;
    long nodes = 0;
    bool hit_time_limit = false;
};

namespace ipdetail {

struct Node {
    std::vector<int> fixed_one;
    std::vector<int> fixed_zero;
    double lp_bound;
    int depth;
    long id;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.lp_bound != b.lp_bound) return a.lp_bound < b.lp_bound;  // best bound first
        return a.id > b.id;
    }
};

}  // namespace ipdetail

/// Optimal 0/1 packing over the pooled columns: best-bound branch and bound
/// with LP node bounds, branching on the most fractional column (ties by
/// higher weight then lower column id).
inline IpResult solve_restricted_ip(const CompatibilityInstance& inst,
                                    const std::vector<Exchange>& columns,
                                    double time_limit_s = 60.0) {
    IpResult result;
    if (columns.empty()) return result;
    const int n = static_cast<int>(columns.size());
    const double int_tol = 1e-6;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration<double>(time_limit_s);

    std::vector<std::vector<int>> col_rows(n);
    for (int j = 0; j < n; ++j)
        for (VertexId v : columns[j].vertices) col_rows[j].push_back(inst.index_of(v));

    // With integral weights every packing value is integral, so LP node
    // bounds can be floored before pruning.
    bool integral_weights = true;
    for (int j = 0; j < n; ++j)
        if (std::abs(columns[j].weight - std::round(columns[j].weight)) > 1e-9)
            integral_weights = false;
    auto tighten = [&](double bound) {
        return integral_weights ? std::floor(bound + 1e-6) : bound;
    };

    // Solves the node LP; returns (bound, primal over free columns or empty
    // if infeasible fixing).
    auto solve_node = [&](const ipdetail::Node& node, std::vector<double>& primal,
                          std::vector<int>& free_cols) -> double {
        std::vector<char> banned(n, 0), covered(inst.n(), 0);
        double fixed_value = 0.0;
        for (int j : node.fixed_zero) banned[j] = 1;
        for (int j : node.fixed_one) {
            fixed_value += columns[j].weight;
            for (int r : col_rows[j]) covered[r] = 1;
        }
        free_cols.clear();
        PackingLp lp(inst.n());
        std::vector<int> lp_to_col;
        for (int j = 0; j < n; ++j) {
            if (banned[j]) continue;
            bool overlaps = false;
            for (int r : col_rows[j])
                if (covered[r]) overlaps = true;
            if (overlaps) continue;
            bool is_fixed_one = std::find(node.fixed_one.begin(), node.fixed_one.end(), j) !=
                                node.fixed_one.end();
            if (is_fixed_one) continue;
            lp.add_column(col_rows[j], columns[j].weight);
            lp_to_col.push_back(j);
        }
        lp.solve();
        std::vector<double> x = lp.primal();
        primal.assign(n, 0.0);
        for (std::size_t k = 0; k < lp_to_col.size(); ++k) primal[lp_to_col[k]] = x[k];
        free_cols = std::move(lp_to_col);
        return fixed_value + lp.objective();
    };

    // Greedy seed: heaviest-first disjoint columns. Guarantees a feasible
    // incumbent even when the search times out before an integral leaf.
    double incumbent = -1.0;
    std::vector<int> incumbent_cols;
    {
        std::vector<int> order(n);
        for (int j = 0; j < n; ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (columns[a].weight != columns[b].weight)
                return columns[a].weight > columns[b].weight;
            return col_rows[a].size() < col_rows[b].size();
        });
        std::vector<char> covered(inst.n(), 0);
        double value = 0.0;
        std::vector<int> chosen;
        for (int j : order) {
            bool overlaps = false;
            for (int r : col_rows[j])
                if (covered[r]) overlaps = true;
            if (overlaps) continue;
            for (int r : col_rows[j]) covered[r] = 1;
            chosen.push_back(j);
            value += columns[j].weight;
        }
        incumbent = value;
        incumbent_cols = std::move(chosen);
    }

    // LP rounding dive: repeatedly fix the most fractional column to one and
    // re-solve. Usually lands on (near-)optimal packings and lets best-bound
    // pruning close the tree quickly.
    auto dive = [&](ipdetail::Node node) {
        while (true) {
            std::vector<double> primal;
            std::vector<int> free_cols;
            solve_node(node, primal, free_cols);
            int pick = -1;
            double best_x = int_tol;
            for (int j : free_cols)
                if (primal[j] < 1.0 - int_tol && primal[j] > best_x) {
                    best_x = primal[j];
                    pick = j;
                }
            if (pick < 0) {
                std::vector<int> chosen = node.fixed_one;
                double value = 0.0;
                for (int j : node.fixed_one) value += columns[j].weight;
                for (int j : free_cols)
                    if (primal[j] > 1.0 - int_tol) {
                        chosen.push_back(j);
                        value += columns[j].weight;
                    }
                if (value > incumbent + 1e-9) {
                    incumbent = value;
                    incumbent_cols = std::move(chosen);
                }
                return;
            }
            node.fixed_one.push_back(pick);
        }
    };
    dive(ipdetail::Node{});
    long next_id = 0;

    std::priority_queue<ipdetail::Node, std::vector<ipdetail::Node>, ipdetail::NodeOrder> open;
    {
        ipdetail::Node root{{}, {}, 0.0, 0, next_id++};
        std::vector<double> primal;
        std::vector<int> free_cols;
        root.lp_bound = solve_node(root, primal, free_cols);
        open.push(root);
    }

    while (!open.empty()) {
        if (std::chrono::steady_clock::now() > deadline) {
            result.hit_time_limit = true;
            break;
        }
        ipdetail::Node node = open.top();
        open.pop();
        if (tighten(node.lp_bound) <= incumbent + 1e-9) continue;
        ++result.nodes;

        std::vector<double> primal;
        std::vector<int> free_cols;
        double bound = solve_node(node, primal, free_cols);
        if (tighten(bound) <= incumbent + 1e-9) continue;

        int branch = -1;
        double best_frac = -1.0;
        for (int j : free_cols) {
            double x = primal[j];
            if (x > int_tol && x < 1.0 - int_tol) {
                double frac = 0.5 - std::abs(x - 0.5);
                if (frac > best_frac + 1e-12 ||
                    (frac > best_frac - 1e-12 && branch >= 0 &&
                     (columns[j].weight > columns[branch].weight + 1e-12 ||
                      (std::abs(columns[j].weight - columns[branch].weight) <= 1e-12 &&
                       j < branch)))) {
                    best_frac = frac;
                    branch = j;
                }
            }
        }

        if (branch < 0) {
            // Integral node solution.
            std::vector<int> chosen = node.fixed_one;
            double value = 0.0;
            for (int j : node.fixed_one) value += columns[j].weight;
            for (int j : free_cols)
                if (primal[j] > 1.0 - int_tol) {
                    chosen.push_back(j);
                    value += columns[j].weight;
                }
            if (value > incumbent + 1e-9) {
                incumbent = value;
                incumbent_cols = chosen;
            }
            continue;
        }

        ipdetail::Node one = node;
        one.fixed_one.push_back(branch);
        one.depth++;
        one.id = next_id++;
        std::vector<double> p1;
        std::vector<int> f1;
        one.lp_bound = solve_node(one, p1, f1);
        if (tighten(one.lp_bound) > incumbent + 1e-9) open.push(one);

        ipdetail::Node zero = node;
        zero.fixed_zero.push_back(branch);
        zero.depth++;
        zero.id = next_id++;
        std::vector<double> p0;
        std::vector<int> f0;
        zero.lp_bound = solve_node(zero, p0, f0);
        if (tighten(zero.lp_bound) > incumbent + 1e-9) open.push(zero);
    }

    result.objective = std::max(0.0, incumbent);
    std::sort(incumbent_cols.begin(), incumbent_cols.end());
    result.chosen = std::move(incumbent_cols);
    return result;
}

}  // namespace kepcg

#endif

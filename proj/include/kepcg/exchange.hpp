#ifndef KEPCG_EXCHANGE_HPP
#define KEPCG_EXCHANGE_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "kepcg/errors.hpp"
#include "kepcg/instance.hpp"

namespace kepcg {

enum class ExchangeKind { Cycle, Chain };

/// A master-problem column: a valid cycle (canonical, lowest id first) or a
/// valid chain (altruist first). Vertices are stored as instance ids.
struct Exchange {
    ExchangeKind kind;
    std::vector<VertexId> vertices;
    double weight = 0.0;
    long column_id = -1;

    bool operator==(const Exchange& other) const {
        return kind == other.kind && vertices == other.vertices;
    }
};

/// Duals of the per-vertex packing constraints, indexed by dense vertex index.
struct DualVector {
    std::vector<double> alpha;

    double at(int index) const { return alpha.at(index); }
    static DualVector zeros(int n) { return DualVector{std::vector<double>(n, 0.0)}; }
};

inline void validate_exchange(const Exchange& e, const CompatibilityInstance& inst) {
    if (e.vertices.size() < 2) throw ValidationError("exchange has fewer than 2 vertices");
    std::vector<VertexId> sorted = e.vertices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError("exchange repeats a vertex");

    std::vector<int> idx;
    idx.reserve(e.vertices.size());
    for (VertexId v : e.vertices) idx.push_back(inst.index_of(v));

    double w = 0.0;
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
        if (!inst.has_arc(idx[i], idx[i + 1]))
            throw ValidationError("missing arc in exchange");
        w += inst.arc_weight(idx[i], idx[i + 1]);
    }

    if (e.kind == ExchangeKind::Cycle) {
        if (static_cast<int>(e.vertices.size()) > inst.k())
            throw ValidationError("cycle longer than K");
        if (!inst.has_arc(idx.back(), idx.front()))
            throw ValidationError("missing closing arc in cycle");
        w += inst.arc_weight(idx.back(), idx.front());
        for (std::size_t i = 1; i < e.vertices.size(); ++i)
            if (e.vertices[i] < e.vertices[0])
                throw ValidationError("cycle not canonical (first vertex not lowest id)");
        for (int i : idx)
            if (inst.is_altruist(i)) throw ValidationError("cycle through altruist");
    } else {
        if (static_cast<int>(e.vertices.size()) > inst.l())
            throw ValidationError("chain longer than L");
        if (!inst.is_altruist(idx.front()))
            throw ValidationError("chain does not start at an altruist");
    }
    if (std::abs(w - e.weight) > 1e-9)
        throw ValidationError("stored weight differs from arc sum");
}

inline Exchange make_cycle(const CompatibilityInstance& inst, std::vector<VertexId> vertices) {
    Exchange e{ExchangeKind::Cycle, std::move(vertices), 0.0, -1};
    std::vector<int> idx;
    for (VertexId v : e.vertices) idx.push_back(inst.index_of(v));
    for (std::size_t i = 0; i + 1 < idx.size(); ++i)
        e.weight += inst.arc_weight(idx[i], idx[i + 1]);
    e.weight += inst.arc_weight(idx.back(), idx.front());
    return e;
}

inline Exchange make_chain(const CompatibilityInstance& inst, std::vector<VertexId> vertices) {
    Exchange e{ExchangeKind::Chain, std::move(vertices), 0.0, -1};
    std::vector<int> idx;
    for (VertexId v : e.vertices) idx.push_back(inst.index_of(v));
    for (std::size_t i = 0; i + 1 < idx.size(); ++i)
        e.weight += inst.arc_weight(idx[i], idx[i + 1]);
    return e;
}

/// All canonical valid cycles (<= K vertices, lowest index first), each once,
/// in lexicographic order of vertex lists. DFS from each start vertex over
/// successors with a larger index enforces canonicality by construction.
inline std::vector<Exchange> enumerate_cycles(const CompatibilityInstance& inst) {
    if (inst.k() > 4)
        throw UnsupportedError("cycle enumeration supports K <= 4, got K=" +
                               std::to_string(inst.k()));
    std::vector<Exchange> out;
    const int n = inst.n();
    std::vector<int> stack;
    std::vector<char> on_path(n, 0);

    auto dfs = [&](auto&& self, int start, int v) -> void {
        for (auto& [j, w] : inst.succ(v)) {
            if (j == start && stack.size() >= 2) {
                std::vector<VertexId> ids;
                for (int u : stack) ids.push_back(inst.id(u));
                out.push_back(make_cycle(inst, std::move(ids)));
            }
            if (j > start && !on_path[j] && static_cast<int>(stack.size()) < inst.k()) {
                stack.push_back(j);
                on_path[j] = 1;
                self(self, start, j);
                on_path[j] = 0;
                stack.pop_back();
            }
        }
    };

    for (int start = 0; start < n; ++start) {
        if (inst.is_altruist(start)) continue;
        stack.assign(1, start);
        on_path.assign(n, 0);
        on_path[start] = 1;
        dfs(dfs, start, start);
    }
    std::sort(out.begin(), out.end(),
              [](const Exchange& a, const Exchange& b) { return a.vertices < b.vertices; });
    return out;
}

/// All valid chains (DFS from every altruist, <= L vertices). Test scale only:
/// refuses once more than `guard` chains were produced.
inline std::vector<Exchange> enumerate_chains(const CompatibilityInstance& inst,
                                              std::size_t guard = 2'000'000) {
    std::vector<Exchange> out;
    const int n = inst.n();
    std::vector<int> stack;
    std::vector<char> on_path(n, 0);

    auto dfs = [&](auto&& self, int v) -> void {
        if (stack.size() >= 2) {
            std::vector<VertexId> ids;
            for (int u : stack) ids.push_back(inst.id(u));
            out.push_back(make_chain(inst, std::move(ids)));
            if (out.size() > guard)
                throw UnsupportedError("chain enumeration exceeds guard of " +
                                       std::to_string(guard));
        }
        if (static_cast<int>(stack.size()) >= inst.l()) return;
        for (auto& [j, w] : inst.succ(v)) {
            if (on_path[j]) continue;
            stack.push_back(j);
            on_path[j] = 1;
            self(self, j);
            on_path[j] = 0;
            stack.pop_back();
        }
    };

    for (int a = 0; a < n; ++a) {
        if (!inst.is_altruist(a)) continue;
        stack.assign(1, a);
        on_path.assign(n, 0);
        on_path[a] = 1;
        dfs(dfs, a);
    }
    std::sort(out.begin(), out.end(),
              [](const Exchange& a, const Exchange& b) { return a.vertices < b.vertices; });
    return out;
}

/// Cycles plus chains; the full column set of a small instance.
inline std::vector<Exchange> enumerate_exchanges(const CompatibilityInstance& inst,
                                                 std::size_t guard = 2'000'000) {
    std::vector<Exchange> out = enumerate_cycles(inst);
    std::vector<Exchange> chains = enumerate_chains(inst, guard);
    out.insert(out.end(), chains.begin(), chains.end());
    return out;
}

/// rc_e = w_e - sum of alpha over the exchange's vertices.
inline double reduced_cost(const Exchange& e, const DualVector& duals,
                           const CompatibilityInstance& inst) {
    double rc = e.weight;
    for (VertexId v : e.vertices) rc -= duals.at(inst.index_of(v));
    return rc;
}

/// All prefixes of a chain with >= 2 vertices, the input included,
/// shortest first.
inline std::vector<Exchange> expand_subpaths(const Exchange& chain,
                                             const CompatibilityInstance& inst) {
    if (chain.kind != ExchangeKind::Chain)
        throw ValidationError("expand_subpaths expects a chain");
    std::vector<Exchange> out;
    for (std::size_t len = 2; len <= chain.vertices.size(); ++len) {
        std::vector<VertexId> prefix(chain.vertices.begin(), chain.vertices.begin() + len);
        out.push_back(make_chain(inst, std::move(prefix)));
    }
    return out;
}

}  // namespace kepcg

#endif

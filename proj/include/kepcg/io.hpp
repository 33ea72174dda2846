#ifndef KEPCG_IO_HPP
#define KEPCG_IO_HPP

#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kepcg/bench.hpp"
#include "kepcg/cg.hpp"
#include "kepcg/errors.hpp"
#include "kepcg/exchange.hpp"
#include "kepcg/instance.hpp"
#include "kepcg/master.hpp"
#include "kepcg/pricing_graph.hpp"

namespace kepcg {

namespace iodetail {

inline nlohmann::json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

inline void write_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

template <class T>
T field(const nlohmann::json& j, const char* name) {
    if (!j.contains(name)) throw ParseError(std::string("missing field \"") + name + "\"");
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError(std::string("field \"") + name + "\" has the wrong type");
    }
}

inline void check_format(const nlohmann::json& j) {
    if (field<int>(j, "format") != 1) throw ParseError("unsupported \"format\" version");
}

}  // namespace iodetail

inline nlohmann::json instance_to_json(const CompatibilityInstance& inst) {
    nlohmann::json j;
    j["format"] = 1;
    j["k"] = inst.k();
    j["l"] = inst.l();
    auto vertices = nlohmann::json::array();
    for (int i = 0; i < inst.n(); ++i)
        vertices.push_back({{"id", inst.id(i)}, {"altruist", inst.is_altruist(i)}});
    j["vertices"] = std::move(vertices);
    auto arcs = nlohmann::json::array();
    for (const Arc& a : inst.arcs())
        arcs.push_back({{"from", a.from}, {"to", a.to}, {"w", a.weight}});
    j["arcs"] = std::move(arcs);
    return j;
}

inline CompatibilityInstance instance_from_json(const nlohmann::json& j) {
    iodetail::check_format(j);
    int k = iodetail::field<int>(j, "k");
    int l = iodetail::field<int>(j, "l");
    std::vector<std::pair<VertexId, bool>> vertices;
    for (const auto& v : iodetail::field<nlohmann::json>(j, "vertices"))
        vertices.emplace_back(iodetail::field<VertexId>(v, "id"),
                              iodetail::field<bool>(v, "altruist"));
    std::vector<Arc> arcs;
    for (const auto& a : iodetail::field<nlohmann::json>(j, "arcs"))
        arcs.push_back({iodetail::field<VertexId>(a, "from"),
                        iodetail::field<VertexId>(a, "to"),
                        iodetail::field<double>(a, "w")});
    return CompatibilityInstance(vertices, arcs, k, l);
}

inline void save_instance(const CompatibilityInstance& inst, const std::string& path) {
    iodetail::write_file(path, instance_to_json(inst));
}

inline CompatibilityInstance load_instance(const std::string& path) {
    return instance_from_json(iodetail::parse_file(path));
}

inline nlohmann::json solution_to_json(const KepSolution& sol) {
    nlohmann::json j;
    j["format"] = 1;
    j["objective"] = sol.objective;
    j["upper_bound"] = sol.upper_bound;
    j["gap"] = sol.gap;
    j["status"] = to_string(sol.status);
    auto exchanges = nlohmann::json::array();
    for (const Exchange& e : sol.chosen)
        exchanges.push_back({{"kind", e.kind == ExchangeKind::Cycle ? "cycle" : "chain"},
                             {"vertices", e.vertices},
                             {"weight", e.weight}});
    j["exchanges"] = std::move(exchanges);
    j["timings"] = sol.timings;
    return j;
}

inline KepSolution solution_from_json(const nlohmann::json& j) {
    iodetail::check_format(j);
    KepSolution sol;
    sol.objective = iodetail::field<double>(j, "objective");
    sol.upper_bound = iodetail::field<double>(j, "upper_bound");
    sol.gap = iodetail::field<double>(j, "gap");
    std::string status = iodetail::field<std::string>(j, "status");
    if (status == "OptimalLP")
        sol.status = SolveStatus::OptimalLP;
    else if (status == "UpperBoundOnly")
        sol.status = SolveStatus::UpperBoundOnly;
    else if (status == "TimeLimit")
        sol.status = SolveStatus::TimeLimit;
    else
        throw ParseError("unknown \"status\" value: " + status);
    for (const auto& e : iodetail::field<nlohmann::json>(j, "exchanges")) {
        Exchange x;
        std::string kind = iodetail::field<std::string>(e, "kind");
        if (kind == "cycle")
            x.kind = ExchangeKind::Cycle;
        else if (kind == "chain")
            x.kind = ExchangeKind::Chain;
        else
            throw ParseError("unknown \"kind\" value: " + kind);
        x.vertices = iodetail::field<std::vector<VertexId>>(e, "vertices");
        x.weight = iodetail::field<double>(e, "weight");
        sol.chosen.push_back(std::move(x));
    }
    if (j.contains("timings"))
        sol.timings = j.at("timings").get<std::map<std::string, double>>();
    return sol;
}

inline void save_solution(const KepSolution& sol, const std::string& path) {
    iodetail::write_file(path, solution_to_json(sol));
}

inline KepSolution load_solution(const std::string& path) {
    return solution_from_json(iodetail::parse_file(path));
}

/// A standalone pricing problem: the cost graph plus an optional dual vector
/// (used to rebuild dual-guided neighborhoods when present).
struct EmpplcFile {
    PricingGraph graph;
    std::optional<std::vector<double>> alpha;
};

inline nlohmann::json empplc_to_json(const PricingGraph& g,
                                     const std::vector<double>* alpha = nullptr) {
    nlohmann::json j;
    j["format"] = 1;
    j["n"] = g.n;
    j["l"] = g.length_limit;
    auto source_arcs = nlohmann::json::array();
    for (auto& [to, c] : g.source_arcs) source_arcs.push_back({{"to", to}, {"c", c}});
    j["source_arcs"] = std::move(source_arcs);
    auto arcs = nlohmann::json::array();
    for (int u = 0; u < g.n; ++u)
        for (auto& [v, c] : g.succ[u]) arcs.push_back({{"from", u}, {"to", v}, {"c", c}});
    j["arcs"] = std::move(arcs);
    if (alpha) j["alpha"] = *alpha;
    return j;
}

inline EmpplcFile empplc_from_json(const nlohmann::json& j) {
    iodetail::check_format(j);
    int n = iodetail::field<int>(j, "n");
    int l = iodetail::field<int>(j, "l");
    std::vector<std::pair<int, double>> source_arcs;
    for (const auto& a : iodetail::field<nlohmann::json>(j, "source_arcs"))
        source_arcs.emplace_back(iodetail::field<int>(a, "to"),
                                 iodetail::field<double>(a, "c"));
    std::vector<std::tuple<int, int, double>> arcs;
    for (const auto& a : iodetail::field<nlohmann::json>(j, "arcs"))
        arcs.emplace_back(iodetail::field<int>(a, "from"), iodetail::field<int>(a, "to"),
                          iodetail::field<double>(a, "c"));
    EmpplcFile out{build_pricing_graph_raw(n, l, source_arcs, arcs), std::nullopt};
    if (j.contains("alpha")) {
        auto alpha = iodetail::field<std::vector<double>>(j, "alpha");
        if (static_cast<int>(alpha.size()) != n)
            throw ParseError("field \"alpha\" must have one entry per vertex");
        out.alpha = std::move(alpha);
    }
    return out;
}

inline void save_empplc(const PricingGraph& g, const std::string& path,
                        const std::vector<double>* alpha = nullptr) {
    iodetail::write_file(path, empplc_to_json(g, alpha));
}

inline EmpplcFile load_empplc(const std::string& path) {
    return empplc_from_json(iodetail::parse_file(path));
}

inline nlohmann::json trace_to_json(const CgTrace& trace) {
    nlohmann::json j;
    j["format"] = 1;
    auto iterations = nlohmann::json::array();
    for (const CgIteration& it : trace.iterations)
        iterations.push_back({{"rmp_value", it.rmp_value},
                              {"pricing_algo", it.pricing_algo},
                              {"best_rc", it.best_rc},
                              {"columns_added", it.columns_added},
                              {"elapsed_s", it.elapsed_s}});
    j["iterations"] = std::move(iterations);
    j["ng_calls"] = trace.ng_calls;
    j["ng_escalations"] = trace.ng_escalations;
    j["final_status"] = to_string(trace.final_status);
    return j;
}

inline void save_trace(const CgTrace& trace, const std::string& path) {
    iodetail::write_file(path, trace_to_json(trace));
}

inline nlohmann::json bench_to_json(const BenchReport& report) {
    nlohmann::json j;
    j["format"] = 1;
    auto rows = nlohmann::json::array();
    for (const BenchRow& r : report.rows)
        rows.push_back({{"pairs", r.num_pairs},
                        {"altruists", r.num_altruists},
                        {"k", r.k},
                        {"l", r.l},
                        {"seed", r.seed},
                        {"lp_ub", r.lp_ub},
                        {"ip_lb", r.ip_lb},
                        {"gap", r.gap},
                        {"runtime_s", r.runtime_s},
                        {"ng_calls", r.ng_calls},
                        {"status", r.status}});
    j["rows"] = std::move(rows);
    return j;
}

inline BenchReport bench_from_json(const nlohmann::json& j) {
    iodetail::check_format(j);
    BenchReport report;
    for (const auto& r : iodetail::field<nlohmann::json>(j, "rows")) {
        BenchRow row;
        row.num_pairs = iodetail::field<int>(r, "pairs");
        row.num_altruists = iodetail::field<int>(r, "altruists");
        row.k = iodetail::field<int>(r, "k");
        row.l = iodetail::field<int>(r, "l");
        row.seed = iodetail::field<std::uint64_t>(r, "seed");
        row.lp_ub = iodetail::field<double>(r, "lp_ub");
        row.ip_lb = iodetail::field<double>(r, "ip_lb");
        row.gap = iodetail::field<double>(r, "gap");
        row.runtime_s = iodetail::field<double>(r, "runtime_s");
        row.ng_calls = iodetail::field<int>(r, "ng_calls");
        row.status = iodetail::field<std::string>(r, "status");
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline void save_bench(const BenchReport& report, const std::string& path) {
    iodetail::write_file(path, bench_to_json(report));
}

inline BenchReport load_bench(const std::string& path) {
    return bench_from_json(iodetail::parse_file(path));
}

}  // namespace kepcg

#endif

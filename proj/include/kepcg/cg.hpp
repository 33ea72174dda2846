#ifndef KEPCG_CG_HPP
#define KEPCG_CG_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kepcg/color_coding.hpp"
#include "kepcg/empplc.hpp"
#include "kepcg/errors.hpp"
#include "kepcg/exchange.hpp"
#include "kepcg/instance.hpp"
#include "kepcg/master.hpp"
#include "kepcg/ng_route.hpp"
#include "kepcg/pricing_graph.hpp"

namespace kepcg {

struct CgConfig {
    double cc_time_limit_s = 1.0;   // color coding budget per iteration
    NgConfig ng_config;
    int colors = 0;                 // <= 0: use L + 1 (capped at 20)
    double rho = 0.99;
    std::uint64_t seed = 0;
    double total_time_limit_s = 600.0;
    std::uint64_t arrangement_budget = 2'000'000;
    bool subpath_expansion = true;
    double ip_time_limit_s = 120.0;

    void validate() const {
        if (cc_time_limit_s <= 0.0) throw ParameterError("cc time limit must be > 0");
        if (total_time_limit_s <= 0.0) throw ParameterError("total time limit must be > 0");
        if (ip_time_limit_s <= 0.0) throw ParameterError("IP time limit must be > 0");
        if (arrangement_budget == 0) throw ParameterError("arrangement budget must be > 0");
        if (rho <= 0.0 || rho >= 1.0) throw ParameterError("rho must be in (0,1)");
        if (colors > 20) throw ParameterError("color count capped at 20");
    }

    int effective_colors(int l) const {
        if (colors > 0) return colors;
        return std::max(2, std::min(l + 1, 20));
    }
};

struct CgIteration {
    double rmp_value = 0.0;
    std::string pricing_algo;  // "cc", "ng", "none"
    double best_rc = 0.0;      // best reduced cost seen this iteration
    int columns_added = 0;
    double elapsed_s = 0.0;
};

struct CgTrace {
    std::vector<CgIteration> iterations;
    int ng_calls = 0;
    int ng_escalations = 0;  // Limited cap lifted to keep the descent moving
    SolveStatus final_status = SolveStatus::OptimalLP;
};

/// Called with the pricing graph of each iteration before pricing runs.
using PricingHook =
    std::function<void(int iteration, const PricingGraph& g, const DualVector& duals)>;

namespace cgdetail {

inline Exchange chain_from_path(const CompatibilityInstance& inst,
                                const std::vector<int>& path) {
    std::vector<VertexId> ids;
    ids.reserve(path.size());
    for (int v : path) ids.push_back(inst.id(v));
    return make_chain(inst, std::move(ids));
}

/// Longest elementary prefix of a walk (cut before the first repeat).
inline std::vector<int> elementary_prefix(const std::vector<int>& walk) {
    std::vector<int> prefix;
    std::vector<char> seen;
    for (int v : walk) {
        if (static_cast<int>(seen.size()) <= v) seen.resize(v + 1, 0);
        if (seen[v]) break;
        seen[v] = 1;
        prefix.push_back(v);
    }
    return prefix;
}

}  // namespace cgdetail

/// The full column-generation solve: pre-enumerated cycles, color-coding
/// pricing with an ng-route fallback for certification, subpath expansion,
/// Lagrangian bound on truncation, then the restricted IP.
inline std::pair<KepSolution, CgTrace> solve_kep(const CompatibilityInstance& inst,
                                                 const CgConfig& config,
                                                 const PricingHook& hook = {}) {
    config.validate();
    using Clock = std::chrono::steady_clock;
    auto t0 = Clock::now();
    auto deadline = t0 + std::chrono::duration<double>(config.total_time_limit_s);
    auto seconds = [](Clock::time_point a, Clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    };

    KepSolution sol;
    CgTrace trace;
    RestrictedMaster master(inst);
    for (const Exchange& cycle : enumerate_cycles(inst)) master.add_column(cycle);

    const double rc_tol = 1e-7;
    double z_bar = 0.0;
    std::vector<double> primal;
    double rmp_time = 0.0, pricing_time = 0.0;
    // Certificate states: no altruists or an exact (elementary / no-path) ng
    // answer allow status OptimalLP; a relaxed bound only certifies z_bar as
    // an upper bound; truncation falls back to the Lagrangian bound.
    bool certified = inst.num_altruists() == 0;
    bool certificate_exact = true;
    bool truncated = false;
    int iteration = 0;

    while (true) {
        auto it_start = Clock::now();
        RmpSolution rmp = master.solve();
        rmp_time += seconds(it_start, Clock::now());
        z_bar = rmp.lp_value;
        primal = rmp.primal;

        if (certified) break;  // no altruists: nothing to price
        if (Clock::now() > deadline) {
            truncated = true;
            break;
        }

        CgIteration rec;
        rec.rmp_value = z_bar;

        auto p0 = Clock::now();
        PricingGraph g = prepare_pricing_graph(inst, rmp.duals);
        if (hook) hook(iteration, g, rmp.duals);

        bool have_candidate = false;
        Exchange candidate;

        if (g.source_arcs.empty()) {
            // Preprocessing removed every altruist: no chain can price out.
            rec.pricing_algo = "none";
            certified = true;
            certificate_exact = true;
        } else {
            // Color coding first; stop at the first negative-cost trial.
            EmpplcInstance pinst(g, PricingTarget::FirstNegative);
            Arrangement arr = build_arrangement(g, config.arrangement_budget, config.seed);
            ColoringPlan plan;
            plan.colors = config.effective_colors(inst.l());
            plan.rho = config.rho;
            plan.rng_seed = splitmix64(config.seed ^ splitmix64(iteration));
            ColorCodingResult cc =
                solve_color_coding(pinst, plan, arr, config.cc_time_limit_s, true);
            if (cc.first_negative && cc.first_negative->cost < -rc_tol) {
                candidate = cgdetail::chain_from_path(inst, cc.first_negative->path);
                rec.pricing_algo = "cc";
                rec.best_rc = -cc.first_negative->cost;
                have_candidate = true;
            } else {
                // Fallback: ng relaxation, both to price and to certify.
                NgConfig ng = config.ng_config;
                ng.seed = splitmix64(config.seed ^ splitmix64(0x1717 + iteration));
                NgSolveResult res = solve_ng_dssr(g, rmp.duals, ng);
                ++trace.ng_calls;
                // A stalled Limited run ends on a negative non-elementary
                // walk; unless an elementary prefix already prices out, lift
                // the cap so the descent can continue.
                while (res.stalled && res.solution.cost < -rc_tol &&
                       !res.solution.elementary) {
                    std::vector<int> prefix = cgdetail::elementary_prefix(res.solution.path);
                    if (prefix.size() >= 2 && g.path_cost(prefix) < -rc_tol) break;
                    ng.size_limit *= 2;
                    ++trace.ng_escalations;
                    res = solve_ng_dssr(g, rmp.duals, ng);
                    ++trace.ng_calls;
                }
                rec.pricing_algo = "ng";
                rec.best_rc = -res.solution.cost;
                if (res.solution.cost < -rc_tol) {
                    if (res.solution.elementary) {
                        candidate = cgdetail::chain_from_path(inst, res.solution.path);
                        have_candidate = true;
                    } else {
                        std::vector<int> prefix =
                            cgdetail::elementary_prefix(res.solution.path);
                        if (prefix.size() >= 2 && g.path_cost(prefix) < -rc_tol) {
                            candidate = cgdetail::chain_from_path(inst, prefix);
                            rec.best_rc = -g.path_cost(prefix);
                            have_candidate = true;
                        } else {
                            // Negative relaxed bound, nothing usable to add:
                            // stop with the Lagrangian bound.
                            truncated = true;
                            sol.timings["stuck_rc_bound"] = -res.solution.cost;
                        }
                    }
                } else {
                    certified = true;
                    certificate_exact = res.solution.is_proven_optimal;
                }
            }
        }
        pricing_time += seconds(p0, Clock::now());

        if (have_candidate) rec.columns_added = master.add_column(candidate, config.subpath_expansion);
        rec.elapsed_s = seconds(it_start, Clock::now());
        trace.iterations.push_back(rec);
        ++iteration;

        if (have_candidate && rec.columns_added == 0) {
            // The priced column was already pooled (numerical noise at the
            // tolerance edge); the LP cannot move, so truncate.
            truncated = true;
        }
        if (certified) {
            auto r0 = Clock::now();
            RmpSolution final_rmp = master.solve();
            rmp_time += seconds(r0, Clock::now());
            z_bar = final_rmp.lp_value;
            primal = final_rmp.primal;
            break;
        }
        if (truncated) break;
    }

    if (certified) {
        sol.status = certificate_exact ? SolveStatus::OptimalLP : SolveStatus::UpperBoundOnly;
        sol.upper_bound = z_bar;
    } else {
        // Truncated: bound the maximum reduced cost under the current duals
        // with one single-pass ng relaxation.
        sol.status = SolveStatus::TimeLimit;
        auto b0 = Clock::now();
        RmpSolution rmp = master.solve();
        z_bar = rmp.lp_value;
        primal = rmp.primal;
        double max_rc = 0.0;
        if (inst.num_altruists() > 0) {
            PricingGraph g = prepare_pricing_graph(inst, rmp.duals);
            if (!g.source_arcs.empty()) {
                NgConfig ng = config.ng_config;
                ng.mode = DssrMode::None;
                NgSolveResult res = solve_ng_dssr(g, rmp.duals, ng);
                ++trace.ng_calls;
                max_rc = std::max(0.0, -res.solution.cost);
            }
        }
        sol.upper_bound = lagrangian_ub(z_bar, max_rc, inst.n());
        pricing_time += seconds(b0, Clock::now());
    }

    // The restricted IP, skipped when the LP primal is already integral.
    bool integral = true;
    for (double x : primal)
        if (x > 1e-6 && x < 1.0 - 1e-6) integral = false;
    auto ip0 = Clock::now();
    if (integral) {
        double value = 0.0;
        const auto& cols = master.columns();
        for (std::size_t j = 0; j < primal.size(); ++j)
            if (primal[j] > 1.0 - 1e-6) {
                sol.chosen.push_back(cols[j]);
                value += cols[j].weight;
            }
        sol.objective = value;
    } else {
        IpResult ip = solve_restricted_ip(inst, master.columns(), config.ip_time_limit_s);
        for (int j : ip.chosen) sol.chosen.push_back(master.columns()[j]);
        sol.objective = ip.objective;
    }
    double ip_time = seconds(ip0, Clock::now());

    // The pool supports the optimal LP, not necessarily the optimal integral
    // packing, so a positive gap can remain even under a tight bound. When
    // the full chain set is small, complete the pool and re-solve the IP.
    if (sol.objective < sol.upper_bound - 1e-9 && Clock::now() < deadline) {
        try {
            std::vector<Exchange> all_chains = enumerate_chains(inst, 30'000);
            int added = 0;
            for (const Exchange& chain : all_chains) added += master.add_column(chain);
            if (added > 0) {
                auto p0 = Clock::now();
                double budget =
                    std::min(config.ip_time_limit_s,
                             std::chrono::duration<double>(deadline - Clock::now()).count());
                if (budget > 0.0) {
                    IpResult ip = solve_restricted_ip(inst, master.columns(), budget);
                    if (ip.objective > sol.objective + 1e-9) {
                        sol.chosen.clear();
                        for (int j : ip.chosen) sol.chosen.push_back(master.columns()[j]);
                        sol.objective = ip.objective;
                    }
                }
                ip_time += seconds(p0, Clock::now());
            }
        } catch (const UnsupportedError&) {
            // Too many chains to enumerate; keep the restricted result.
        }
    }

    sol.gap = compute_gap(sol.upper_bound, sol.objective);
    trace.final_status = sol.status;
    sol.timings["rmp_s"] = rmp_time;
    sol.timings["pricing_s"] = pricing_time;
    sol.timings["ip_s"] = ip_time;
    sol.timings["total_s"] = seconds(t0, Clock::now());
    sol.timings["iterations"] = static_cast<double>(trace.iterations.size());
    sol.timings["ng_calls"] = static_cast<double>(trace.ng_calls);
    return {std::move(sol), std::move(trace)};
}

}  // namespace kepcg

#endif

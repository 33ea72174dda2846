#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kepcg/bench.hpp"
#include "kepcg/cg.hpp"
#include "kepcg/color_coding.hpp"
#include "kepcg/empplc.hpp"
#include "kepcg/errors.hpp"
#include "kepcg/extract.hpp"
#include "kepcg/instance.hpp"
#include "kepcg/io.hpp"
#include "kepcg/ng_route.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitTimeLimit = 4;

kepcg::CompatibilityInstance with_limits(const kepcg::CompatibilityInstance& inst, int k, int l) {
    if (k == inst.k() && l == inst.l()) return inst;
    std::vector<std::pair<kepcg::VertexId, bool>> vertices;
    for (int i = 0; i < inst.n(); ++i)
        vertices.emplace_back(inst.id(i), inst.is_altruist(i));
    return kepcg::CompatibilityInstance(vertices, inst.arcs(), k, l);
}

void print_solution(const char* label, const kepcg::EmpplcSolution& s) {
    std::cout << label << " cost " << s.cost;
    if (s.has_path()) {
        std::cout << " path s";
        for (int v : s.path) std::cout << "-" << v;
    } else {
        std::cout << " (no path)";
    }
    std::cout << "\n";
}

int cmd_generate(int pairs, double altruists, std::uint64_t seed, int k, int l,
                 const std::string& weights, const std::string& out) {
    kepcg::GeneratorParams params;
    params.num_pairs = pairs;
    params.altruist_fraction = altruists;
    params.seed = seed;
    params.weight_mode =
        weights == "uniform" ? kepcg::WeightMode::UniformRandom : kepcg::WeightMode::Unit;
    kepcg::CompatibilityInstance inst = kepcg::generate(params, k, l);
    kepcg::save_instance(inst, out);
    std::cout << "wrote " << out << " (" << inst.num_pairs() << " pairs, "
              << inst.num_altruists() << " altruists, " << inst.arcs().size() << " arcs)\n";
    return kExitOk;
}

int cmd_solve(const std::string& instance_path, std::optional<int> k, std::optional<int> l,
              const kepcg::CgConfig& config, const std::string& out,
              const std::string& trace_out) {
    kepcg::CompatibilityInstance inst = kepcg::load_instance(instance_path);
    inst = with_limits(inst, k.value_or(inst.k()), l.value_or(inst.l()));
    auto [sol, trace] = kepcg::solve_kep(inst, config);
    if (!out.empty()) kepcg::save_solution(sol, out);
    if (!trace_out.empty()) kepcg::save_trace(trace, trace_out);
    std::cout << "objective " << sol.objective << " upper_bound " << sol.upper_bound
              << " gap " << sol.gap << " status " << kepcg::to_string(sol.status)
              << " iterations " << trace.iterations.size() << " ng_calls "
              << trace.ng_calls << "\n";
    return sol.status == kepcg::SolveStatus::TimeLimit ? kExitTimeLimit : kExitOk;
}

int cmd_price(const std::string& instance_path, const std::string& algo, int colors,
              double rho, std::uint64_t seed, double time_limit, int lambda,
              const std::string& dssr, const std::string& ng_sets, bool against_oracle) {
    kepcg::EmpplcFile file = kepcg::load_empplc(instance_path);
    kepcg::PricingGraph& g = file.graph;
    kepcg::prepare(g);
    kepcg::EmpplcInstance inst(g);

    std::optional<kepcg::EmpplcSolution> oracle;
    if (against_oracle || algo == "oracle") oracle = kepcg::solve_exact(inst);

    if (algo == "oracle") {
        print_solution("OPT", *oracle);
    } else if (algo == "ls") {
        kepcg::LocalSearchResult res = kepcg::solve_local_search(inst, time_limit, seed);
        print_solution("LF", res.first_negative ? *res.first_negative : res.best);
        print_solution("LM", res.best);
    } else if (algo == "cc") {
        kepcg::Arrangement arr = kepcg::build_arrangement(g, 2'000'000, seed);
        kepcg::ColoringPlan plan;
        plan.colors = colors > 0 ? colors : std::max(2, std::min(g.length_limit + 1, 20));
        plan.rho = rho;
        plan.rng_seed = seed;
        kepcg::ColorCodingResult res = kepcg::solve_color_coding(inst, plan, arr, time_limit);
        print_solution("CF", res.first_negative ? *res.first_negative : res.best);
        print_solution("CM", res.best);
        std::cout << "trials " << res.trials_run << " proven_optimal "
                  << (res.proven_optimal ? "yes" : "no") << " delta_max " << arr.delta_max
                  << " colors " << plan.colors << "\n";
    } else if (algo == "ng") {
        kepcg::DualVector duals;
        kepcg::NgConfig config;
        config.seed = seed;
        if (lambda > 0) config.lambda = lambda;
        if (dssr == "none")
            config.mode = kepcg::DssrMode::None;
        else if (dssr == "limited")
            config.mode = kepcg::DssrMode::Limited;
        else if (dssr == "predefined")
            config.mode = kepcg::DssrMode::Predefined;
        else if (!dssr.empty()) {
            std::cerr << "unknown --dssr: " << dssr << "\n";
            return kExitUsage;
        }
        if (file.alpha) {
            duals.alpha = *file.alpha;
        } else {
            duals = kepcg::DualVector::zeros(g.n);
            config.construction = kepcg::NgConstruction::UniformRandom;
        }
        if (ng_sets == "uniform")
            config.construction = kepcg::NgConstruction::UniformRandom;
        else if (ng_sets == "dual")
            config.construction = kepcg::NgConstruction::DualGuidedNeighborhood;
        else if (!ng_sets.empty()) {
            std::cerr << "unknown --ng-sets: " << ng_sets << "\n";
            return kExitUsage;
        }
        kepcg::NgSolveResult res = kepcg::solve_ng_dssr(g, duals, config);
        std::cout << "NG bound " << res.solution.cost << " elementary "
                  << (res.solution.elementary ? "yes" : "no") << " iterations "
                  << res.iterations << "\n";
    } else {
        std::cerr << "unknown --algo: " << algo << "\n";
        return kExitUsage;
    }

    if (against_oracle && algo != "oracle") print_solution("OPT", *oracle);
    return kExitOk;
}

int cmd_extract(const std::string& instance_path, const kepcg::CgConfig& config,
                const std::string& prefix) {
    kepcg::CompatibilityInstance inst = kepcg::load_instance(instance_path);
    kepcg::ExtractResult res = kepcg::extract_pricing_instances(inst, config, prefix);
    if (res.total_iterations == 0) {
        std::cerr << "no pricing iterations to extract\n";
        return kExitValidation;
    }
    std::cout << "extracted " << res.files.size() << " of " << res.total_iterations
              << " iterations:";
    for (const std::string& f : res.files) std::cout << " " << f;
    std::cout << "\n";
    return kExitOk;
}

int cmd_bench(const kepcg::BenchConfig& config, const std::string& out,
              const std::string& csv) {
    kepcg::BenchReport report = kepcg::run_bench(config);
    if (!out.empty()) kepcg::save_bench(report, out);
    if (!csv.empty()) {
        std::ofstream f(csv);
        f << kepcg::render_csv(report);
    }
    std::cout << kepcg::render_table(report);
    for (const auto& row : report.rows)
        if (row.status == "TimeLimit") return kExitTimeLimit;
    return kExitOk;
}

int cmd_report(const std::string& in, const std::string& csv) {
    kepcg::BenchReport report = kepcg::load_bench(in);
    if (!csv.empty()) {
        std::ofstream f(csv);
        f << kepcg::render_csv(report);
    }
    std::cout << kepcg::render_table(report);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kidney-exchange clearing by column generation"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a random instance file");
    int gen_pairs = 50, gen_k = 3, gen_l = 4;
    double gen_altruists = 0.04;
    std::uint64_t gen_seed = 1;
    std::string gen_weights = "unit", gen_out = "instance.json";
    gen->add_option("--pairs", gen_pairs, "number of incompatible pairs");
    gen->add_option("--altruists", gen_altruists, "altruist fraction of pairs");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--k", gen_k, "max cycle size");
    gen->add_option("--l", gen_l, "max chain size");
    gen->add_option("--weights", gen_weights, "unit | uniform");
    gen->add_option("-o,--output", gen_out, "output file");

    // shared solve flags
    auto add_solve_flags = [](CLI::App* cmd, kepcg::CgConfig& config, bool& no_subpaths) {
        cmd->add_option("--time-limit", config.total_time_limit_s, "total seconds");
        cmd->add_option("--seed", config.seed, "solver seed");
        cmd->add_option("--cc-seconds", config.cc_time_limit_s, "color coding budget per iteration");
        cmd->add_option("--lambda", config.ng_config.lambda, "ng-set size");
        cmd->add_option("--colors", config.colors, "color count (default l+1)");
        cmd->add_flag("--no-subpaths", no_subpaths, "disable subpath expansion");
    };

    // solve
    auto* solve = app.add_subcommand("solve", "run the column-generation solver");
    std::string solve_instance, solve_out = "solution.json", solve_trace = "trace.json";
    std::optional<int> solve_k, solve_l;
    kepcg::CgConfig solve_config;
    bool solve_no_subpaths = false;
    solve->add_option("instance", solve_instance, "instance file")->required();
    solve->add_option("--k", solve_k, "override max cycle size");
    solve->add_option("--l", solve_l, "override max chain size");
    solve->add_option("-o,--output", solve_out, "solution file");
    solve->add_option("--trace", solve_trace, "trace file");
    add_solve_flags(solve, solve_config, solve_no_subpaths);

    // price
    auto* price = app.add_subcommand("price", "run one pricing algorithm on an extracted file");
    std::string price_instance, price_algo = "oracle";
    int price_colors = 0, price_lambda = 0;
    double price_rho = 0.99, price_time = 1.0;
    std::uint64_t price_seed = 0;
    std::string price_dssr, price_ng_sets;
    bool price_oracle = false;
    price->add_option("instance", price_instance, "pricing instance file")->required();
    price->add_option("--algo", price_algo, "oracle | ls | cc | ng");
    price->add_option("--colors", price_colors, "color count (cc)");
    price->add_option("--rho", price_rho, "target probability (cc)");
    price->add_option("--seed", price_seed, "seed");
    price->add_option("--time-limit", price_time, "seconds (ls/cc)");
    price->add_option("--lambda", price_lambda, "ng-set size (ng)");
    price->add_option("--dssr", price_dssr, "none | limited | predefined (ng)");
    price->add_option("--ng-sets", price_ng_sets, "uniform | dual (ng)");
    price->add_flag("--oracle", price_oracle, "also print the exact optimum");

    // extract
    auto* extract = app.add_subcommand("extract", "dump pricing graphs from a CG run");
    std::string extract_instance, extract_prefix = "empplc";
    kepcg::CgConfig extract_config;
    bool extract_no_subpaths = false;
    extract->add_option("instance", extract_instance, "instance file")->required();
    extract->add_option("--prefix", extract_prefix, "output file prefix");
    add_solve_flags(extract, extract_config, extract_no_subpaths);

    // bench
    auto* bench = app.add_subcommand("bench", "run the benchmark matrix");
    kepcg::BenchConfig bench_config;
    std::string bench_out = "bench.json", bench_csv;
    bool bench_no_subpaths = false;
    bench->add_option("--pairs", bench_config.pair_counts, "pair counts");
    bench->add_option("--l", bench_config.l_values, "chain limits");
    bench->add_option("--k", bench_config.k, "max cycle size");
    bench->add_option("--seeds", bench_config.num_seeds, "seeds per cell");
    bench->add_option("--seed-base", bench_config.seed_base, "first seed");
    bench->add_option("--altruists", bench_config.altruist_fraction, "altruist fraction");
    bench->add_option("-o,--output", bench_out, "report file");
    bench->add_option("--csv", bench_csv, "also write CSV");
    add_solve_flags(bench, bench_config.cg, bench_no_subpaths);

    // report
    auto* report = app.add_subcommand("report", "render a benchmark report");
    std::string report_in, report_csv;
    report->add_option("input", report_in, "report file")->required();
    report->add_option("--csv", report_csv, "also write CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed())
            return cmd_generate(gen_pairs, gen_altruists, gen_seed, gen_k, gen_l, gen_weights,
                                gen_out);
        if (solve->parsed()) {
            solve_config.subpath_expansion = !solve_no_subpaths;
            return cmd_solve(solve_instance, solve_k, solve_l, solve_config, solve_out,
                             solve_trace);
        }
        if (price->parsed())
            return cmd_price(price_instance, price_algo, price_colors, price_rho, price_seed,
                             price_time, price_lambda, price_dssr, price_ng_sets,
                             price_oracle);
        if (extract->parsed()) {
            extract_config.subpath_expansion = !extract_no_subpaths;
            return cmd_extract(extract_instance, extract_config, extract_prefix);
        }
        if (bench->parsed()) {
            bench_config.cg.subpath_expansion = !bench_no_subpaths;
            return cmd_bench(bench_config, bench_out, bench_csv);
        }
        if (report->parsed()) return cmd_report(report_in, report_csv);
    } catch (const kepcg::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const kepcg::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const kepcg::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const kepcg::UnsupportedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}

#ifndef KEPCG_BENCH_HPP
#define KEPCG_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kepcg/cg.hpp"
#include "kepcg/errors.hpp"
#include "kepcg/instance.hpp"
#include "kepcg/master.hpp"

namespace kepcg {

struct BenchRow {
    int num_pairs = 0;
    int num_altruists = 0;
    int k = 0;
    int l = 0;
    std::uint64_t seed = 0;
    double lp_ub = 0.0;
    double ip_lb = 0.0;
    double gap = 0.0;
    double runtime_s = 0.0;
    int ng_calls = 0;
    std::string status;
};

struct BenchReport {
    std::vector<BenchRow> rows;

    double mean_gap() const {
        if (rows.empty()) return 0.0;
        double s = 0.0;
        for (const auto& r : rows) s += r.gap;
        return s / rows.size();
    }
    int count_gap_zero() const {
        int c = 0;
        for (const auto& r : rows)
            if (r.gap <= 1e-9) ++c;
        return c;
    }
    std::map<int, double> mean_runtime_per_l() const {
        std::map<int, double> sum, cnt;
        for (const auto& r : rows) {
            sum[r.l] += r.runtime_s;
            cnt[r.l] += 1.0;
        }
        std::map<int, double> out;
        for (auto& [l, s] : sum) out[l] = s / cnt[l];
        return out;
    }
};

struct BenchConfig {
    std::vector<int> pair_counts{50, 100};
    std::vector<int> l_values{4, 7, 13};
    int k = 3;
    int num_seeds = 5;
    std::uint64_t seed_base = 1;
    double altruist_fraction = 0.04;
    CgConfig cg;

    void validate() const {
        if (pair_counts.empty() || l_values.empty()) throw ParameterError("empty bench matrix");
        if (num_seeds < 1) throw ParameterError("need at least one seed");
        cg.validate();
    }
};

inline int bench_worker_count(int rows) {
    int threads = 1;
    if (const char* env = std::getenv("KEPCG_THREADS")) {
        threads = std::atoi(env);
        if (threads < 1) threads = 1;
    }
    return std::min(threads, std::max(1, rows));
}

inline BenchRow run_bench_instance(int pairs, int k, int l, std::uint64_t seed,
                                   double altruist_fraction, const CgConfig& cg) {
    GeneratorParams params;
    params.num_pairs = pairs;
    params.altruist_fraction = altruist_fraction;
    params.seed = seed;
    CompatibilityInstance inst = generate(params, k, l);

    auto t0 = std::chrono::steady_clock::now();
    auto [sol, trace] = solve_kep(inst, cg);
    auto t1 = std::chrono::steady_clock::now();

    BenchRow row;
    row.num_pairs = pairs;
    row.num_altruists = inst.num_altruists();
    row.k = k;
    row.l = l;
    row.seed = seed;
    row.lp_ub = sol.upper_bound;
    row.ip_lb = sol.objective;
    row.gap = sol.gap;
    row.runtime_s = std::chrono::duration<double>(t1 - t0).count();
    row.ng_calls = trace.ng_calls;
    row.status = to_string(sol.status);
    return row;
}

/// Runs the full matrix; rows are sorted by (|P|, L, seed), so the report is
/// deterministic regardless of worker interleaving.
inline BenchReport run_bench(const BenchConfig& config) {
    config.validate();
    struct Job {
        int pairs, l;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int pairs : config.pair_counts)
        for (int l : config.l_values)
            for (int s = 0; s < config.num_seeds; ++s)
                jobs.push_back({pairs, l, config.seed_base + static_cast<std::uint64_t>(s)});

    BenchReport report;
    report.rows.resize(jobs.size());
    const int workers = bench_worker_count(static_cast<int>(jobs.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) break;
            report.rows[j] = run_bench_instance(jobs[j].pairs, config.k, jobs[j].l,
                                                jobs[j].seed, config.altruist_fraction,
                                                config.cg);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::sort(report.rows.begin(), report.rows.end(), [](const BenchRow& a, const BenchRow& b) {
        if (a.num_pairs != b.num_pairs) return a.num_pairs < b.num_pairs;
        if (a.l != b.l) return a.l < b.l;
        return a.seed < b.seed;
    });
    return report;
}

inline std::string render_csv(const BenchReport& report) {
    std::ostringstream out;
    out << "pairs,altruists,k,l,seed,lp_ub,ip_lb,gap,runtime_s,ng_calls,status\n";
    out << std::setprecision(12);
    for (const auto& r : report.rows)
        out << r.num_pairs << ',' << r.num_altruists << ',' << r.k << ',' << r.l << ','
            << r.seed << ',' << r.lp_ub << ',' << r.ip_lb << ',' << r.gap << ','
            << r.runtime_s << ',' << r.ng_calls << ',' << r.status << '\n';
    return out.str();
}

inline std::string render_table(const BenchReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(7) << "pairs" << std::setw(7) << "alts" << std::setw(4)
        << "k" << std::setw(4) << "l" << std::setw(6) << "seed" << std::right
        << std::setw(12) << "lp_ub" << std::setw(12) << "ip_lb" << std::setw(10) << "gap"
        << std::setw(12) << "runtime_s" << std::setw(9) << "ng" << "  status\n";
    out << std::fixed;
    for (const auto& r : report.rows) {
        out << std::left << std::setw(7) << r.num_pairs << std::setw(7) << r.num_altruists
            << std::setw(4) << r.k << std::setw(4) << r.l << std::setw(6) << r.seed
            << std::right << std::setprecision(4) << std::setw(12) << r.lp_ub
            << std::setw(12) << r.ip_lb << std::setw(10) << r.gap << std::setprecision(3)
            << std::setw(12) << r.runtime_s << std::setw(9) << r.ng_calls << "  "
            << r.status << '\n';
    }
    out << '\n';
    out << "instances: " << report.rows.size() << "  mean gap: " << std::setprecision(6)
        << report.mean_gap() << "  gap=0: " << report.count_gap_zero() << "/"
        << report.rows.size() << '\n';
    for (auto& [l, t] : report.mean_runtime_per_l())
        out << "mean runtime (l=" << l << "): " << std::setprecision(3) << t << " s\n";
    return out.str();
}

}  // namespace kepcg

#endif

#ifndef KEPCG_EXTRACT_HPP
#define KEPCG_EXTRACT_HPP

#include <string>
#include <vector>

#include "kepcg/cg.hpp"
#include "kepcg/io.hpp"

namespace kepcg {

struct ExtractResult {
    std::vector<std::string> files;  // first, middle, last (deduplicated)
    int total_iterations = 0;
};

/// Runs the CG solve twice: once to count pricing iterations, once to dump
/// the pricing graphs of the first, middle and last iterations as standalone
/// pricing files (with the duals attached).
inline ExtractResult extract_pricing_instances(const CompatibilityInstance& inst,
                                               const CgConfig& config,
                                               const std::string& prefix) {
    ExtractResult result;
    int total = 0;
    solve_kep(inst, config,
              [&](int, const PricingGraph&, const DualVector&) { ++total; });
    result.total_iterations = total;
    if (total == 0) return result;

    const int first = 0, middle = (total - 1) / 2, last = total - 1;
    solve_kep(inst, config, [&](int it, const PricingGraph& g, const DualVector& duals) {
        auto dump = [&](const char* tag) {
            std::string path = prefix + "_" + tag + ".json";
            save_empplc(g, path, &duals.alpha);
            result.files.push_back(path);
        };
        if (it == first) dump("first");
        if (it == middle && middle != first) dump("middle");
        if (it == last && last != middle && last != first) dump("last");
    });
    return result;
}

}  // namespace kepcg

#endif

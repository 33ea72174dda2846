#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "kepcg/empplc.hpp"
#include "oracle.hpp"

using namespace kepcg;

namespace {

PricingGraph prepared_g1(double alpha_value = 0.0) {
    CompatibilityInstance inst = oracle::g1();
    DualVector duals = DualVector::zeros(inst.n());
    for (double& a : duals.alpha) a = alpha_value;
    return prepare_pricing_graph(inst, duals);
}

}  // namespace

TEST_CASE("exact solver finds the fixture optimum") {
    CompatibilityInstance inst = oracle::g1();
    PricingGraph g = prepared_g1();
    EmpplcInstance pinst(g);
    EmpplcSolution sol = solve_exact(pinst);
    CHECK(sol.cost == Catch::Approx(-3.0));
    CHECK(sol.is_proven_optimal);
    // Lexicographic tie-break picks the path through altruist 1 over 2.
    std::vector<int> expected{inst.index_of(1), inst.index_of(3), inst.index_of(5),
                              inst.index_of(7)};
    CHECK(sol.path == expected);
}

TEST_CASE("exact solver is nonnegative on nonnegative graphs") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        PricingGraph g = oracle::random_pricing(rng, 12, 5);
        for (auto& [v, c] : g.source_arcs) c = pos(rng);
        for (auto& row : g.succ)
            for (auto& [j, c] : row) c = pos(rng);
        prepare(g);
        EmpplcInstance pinst(g);
        CHECK(solve_exact(pinst).cost >= 0.0);
    }
}

TEST_CASE("exact solver agrees with two independent oracles") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 120; ++trial) {
        PricingGraph g = oracle::random_pricing(rng, 20, 7);
        prepare(g);
        EmpplcInstance pinst(g);
        EmpplcSolution sol = solve_exact(pinst);
        oracle::PathRecord ref = oracle::best_path(g);
        CHECK(sol.cost == Catch::Approx(ref.cost).margin(1e-9));
        CHECK(sol.path == ref.path);
        CHECK(sol.cost == Catch::Approx(oracle::held_karp(g)).margin(1e-9));
        if (sol.has_path()) CHECK_NOTHROW(validate_empplc_path(g, sol.path, sol.cost));
    }
}

TEST_CASE("exact solver reports no path with cost 0") {
    PricingGraph g = build_pricing_graph_raw(3, 4, {}, {{0, 1, -1.0}});
    prepare(g);
    EmpplcInstance pinst(g);
    EmpplcSolution sol = solve_exact(pinst);
    CHECK_FALSE(sol.has_path());
    CHECK(sol.cost == 0.0);
    CHECK(sol.is_proven_optimal);
}

TEST_CASE("exact solver honors its node budget") {
    std::mt19937_64 rng(1);
    PricingGraph g = oracle::random_pricing(rng, 15, 7, 0.8);
    prepare(g);
    EmpplcInstance pinst(g);
    CHECK_THROWS_AS(solve_exact(pinst, 5), UnsupportedError);
}

TEST_CASE("local search finds a negative path on the fixture") {
    PricingGraph g = prepared_g1();
    EmpplcInstance pinst(g);
    LocalSearchResult res = solve_local_search(pinst, 0.2);
    CHECK(res.best.cost <= -1.0);
    REQUIRE(res.first_negative.has_value());
    CHECK(res.first_negative->cost < 0.0);
    CHECK(res.best.kind == SolutionKind::Heuristic);
}

TEST_CASE("local search rejects a nonpositive time limit") {
    PricingGraph g = prepared_g1();
    EmpplcInstance pinst(g);
    CHECK_THROWS_AS(solve_local_search(pinst, 0.0), ParameterError);
}

TEST_CASE("local search never beats the exact optimum") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 40; ++trial) {
        PricingGraph g = oracle::random_pricing(rng, 14, 5);
        prepare(g);
        EmpplcInstance pinst(g);
        double exact = solve_exact(pinst).cost;
        LocalSearchResult res = solve_local_search(pinst, 0.02, trial);
        if (res.best.has_path()) {
            CHECK(res.best.cost >= exact - 1e-9);
            CHECK_NOTHROW(validate_empplc_path(g, res.best.path, res.best.cost));
        }
        if (exact >= 0.0) {
            // No negative path exists, so none may be reported.
            CHECK_FALSE(res.first_negative.has_value());
        }
        if (res.first_negative) {
            CHECK(res.first_negative->cost < 0.0);
            CHECK_NOTHROW(validate_empplc_path(g, res.first_negative->path,
                                               res.first_negative->cost));
        }
    }
}

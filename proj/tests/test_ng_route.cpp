#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "kepcg/ng_route.hpp"
#include "oracle.hpp"

using namespace kepcg;

namespace {

PricingGraph prepared_g1(double alpha_value = 0.0) {
    CompatibilityInstance inst = oracle::g1();
    DualVector duals = DualVector::zeros(inst.n());
    for (double& a : duals.alpha) a = alpha_value;
    return prepare_pricing_graph(inst, duals);
}

std::vector<std::vector<int>> full_memory(const PricingGraph& g) {
    std::vector<int> everyone;
    for (int v = 0; v < g.n; ++v)
        if (g.alive[v]) everyone.push_back(v);
    std::vector<std::vector<int>> eta(g.n);
    for (int v = 0; v < g.n; ++v)
        if (g.alive[v]) eta[v] = everyone;
    return eta;
}

}  // namespace

TEST_CASE("ng sets saturate and shrink with lambda") {
    PricingGraph g = prepared_g1();
    DualVector duals = DualVector::zeros(g.n);

    NgSets none = build_ng_sets(g, duals, 0, NgConstruction::DualGuidedNeighborhood);
    for (int i = 0; i < g.n; ++i)
        if (g.alive[i]) CHECK(none.eta[i] == std::vector<int>{i});

    NgSets all = build_ng_sets(g, duals, g.n, NgConstruction::DualGuidedNeighborhood);
    for (int i = 0; i < g.n; ++i) {
        if (!g.alive[i]) continue;
        std::vector<int> expected = g.gamma_pred[i];
        if (!std::binary_search(expected.begin(), expected.end(), i))
            expected.insert(std::lower_bound(expected.begin(), expected.end(), i), i);
        CHECK(all.eta[i] == expected);
    }

    CHECK_THROWS_AS(build_ng_sets(g, duals, -1, NgConstruction::DualGuidedNeighborhood),
                    ParameterError);
}

TEST_CASE("dual-guided sets keep the highest-dual extended predecessors") {
    CompatibilityInstance inst = oracle::g1();
    DualVector duals = DualVector::zeros(inst.n());
    for (int v = 0; v < inst.n(); ++v) duals.alpha[v] = static_cast<double>(inst.id(v));
    PricingGraph g = prepare_pricing_graph(inst, duals);
    NgSets sets = build_ng_sets(g, duals, 2, NgConstruction::DualGuidedNeighborhood);
    std::vector<int> expected{inst.index_of(2), inst.index_of(3), inst.index_of(5)};
    std::sort(expected.begin(), expected.end());
    CHECK(sets.eta[inst.index_of(5)] == expected);
}

TEST_CASE("uniform sets have the requested size and contain the vertex") {
    std::mt19937_64 rng(7);
    PricingGraph g = oracle::random_pricing(rng, 12, 5);
    prepare(g);
    NgSets sets = build_ng_sets(g, DualVector::zeros(g.n), 3,
                                NgConstruction::UniformRandom, 11);
    int alive = 0;
    for (int i = 0; i < g.n; ++i) {
        if (!g.alive[i]) continue;
        ++alive;
        CHECK(std::binary_search(sets.eta[i].begin(), sets.eta[i].end(), i));
        CHECK(static_cast<int>(sets.eta[i].size()) <= 4);
    }
    CHECK(alive > 0);
    NgSets again = build_ng_sets(g, DualVector::zeros(g.n), 3,
                                 NgConstruction::UniformRandom, 11);
    CHECK(again.eta == sets.eta);  // same seed, same sets
}

TEST_CASE("memory projection follows the intersection formula") {
    CompatibilityInstance inst = oracle::g1();
    PricingGraph g = prepared_g1();
    auto idx = [&](VertexId v) { return inst.index_of(v); };

    NgSets sets;
    sets.eta.assign(g.n, {});
    sets.eta[idx(7)] = {idx(7)};
    std::vector<int> pi{idx(3), idx(5)};
    std::sort(pi.begin(), pi.end());
    auto projected = project_memory(pi, idx(7), sets);
    REQUIRE(projected.has_value());
    CHECK(*projected == std::vector<int>{idx(7)});

    // Full memory never forgets.
    sets.eta[idx(7)] = {idx(3), idx(5), idx(7)};
    std::sort(sets.eta[idx(7)].begin(), sets.eta[idx(7)].end());
    projected = project_memory(pi, idx(7), sets);
    std::vector<int> expected{idx(3), idx(5), idx(7)};
    std::sort(expected.begin(), expected.end());
    REQUIRE(projected.has_value());
    CHECK(*projected == expected);

    // Extension into a remembered vertex is forbidden.
    std::vector<int> remembered{idx(5), idx(7)};
    std::sort(remembered.begin(), remembered.end());
    CHECK_FALSE(project_memory(remembered, idx(7), sets).has_value());
}

TEST_CASE("full-memory ng DP reproduces the exact solver") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 60; ++trial) {
        PricingGraph g = oracle::random_pricing(rng, 12, 5);
        prepare(g);
        EmpplcInstance pinst(g);
        double exact = solve_exact(pinst).cost;
        for (NgDirection dir : {NgDirection::Forward, NgDirection::Backward}) {
            NgDpResult res = ng_dp(g, full_memory(g), g.length_limit, dir);
            CHECK(res.bound == Catch::Approx(exact).margin(1e-9));
            if (!res.no_path) CHECK(res.elementary);
        }
    }
}

TEST_CASE("singleton memory equals the hop-limited walk relaxation") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 60; ++trial) {
        PricingGraph g = oracle::random_pricing(rng, 14, 5);
        prepare(g);
        NgSets sets = build_ng_sets(g, DualVector::zeros(g.n), 0,
                                    NgConstruction::DualGuidedNeighborhood);
        double walk = oracle::min_walk(g);
        for (NgDirection dir : {NgDirection::Forward, NgDirection::Backward}) {
            NgDpResult res = ng_dp(g, sets.eta, g.length_limit, dir);
            CHECK(res.bound == Catch::Approx(walk).margin(1e-9));
        }
    }
}

TEST_CASE("fixture ng run is elementary and exact") {
    PricingGraph g = prepared_g1();
    NgSets sets = build_ng_sets(g, DualVector::zeros(g.n), 5,
                                NgConstruction::DualGuidedNeighborhood);
    NgDpResult res = ng_dp(g, sets.eta, g.length_limit, NgDirection::Forward);
    CHECK(res.bound == Catch::Approx(-3.0));
    CHECK(res.elementary);
}

TEST_CASE("ng DP bound never exceeds the exact optimum") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 60; ++trial) {
        PricingGraph g = oracle::random_pricing(rng, 14, 5);
        prepare(g);
        EmpplcInstance pinst(g);
        double exact = solve_exact(pinst).cost;
        int lambda = static_cast<int>(rng() % 4);
        NgSets sets = build_ng_sets(g, DualVector::zeros(g.n), lambda,
                                    NgConstruction::DualGuidedNeighborhood);
        NgDpResult res = ng_dp(g, sets.eta, g.length_limit, NgDirection::Forward);
        CHECK(res.bound <= exact + 1e-9);
        if (res.elementary && !res.no_path)
            CHECK(res.bound == Catch::Approx(exact).margin(1e-9));
    }
}

TEST_CASE("dominance never changes the bound") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 40; ++trial) {
        PricingGraph g = oracle::random_pricing(rng, 12, 5);
        prepare(g);
        NgSets sets = build_ng_sets(g, DualVector::zeros(g.n), 3,
                                    NgConstruction::DualGuidedNeighborhood);
        NgDpOptions with, without;
        without.use_dominance = false;
        NgDpResult a = ng_dp(g, sets.eta, g.length_limit, NgDirection::Forward, with);
        NgDpResult b = ng_dp(g, sets.eta, g.length_limit, NgDirection::Forward, without);
        CHECK(a.bound == Catch::Approx(b.bound).margin(1e-9));
    }
}

TEST_CASE("completion-bound pruning is sound") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 40; ++trial) {
        PricingGraph g = oracle::random_pricing(rng, 12, 5);
        prepare(g);
        NgSets sets = build_ng_sets(g, DualVector::zeros(g.n), 2,
                                    NgConstruction::DualGuidedNeighborhood);
        NgDpResult forward = ng_dp(g, sets.eta, g.length_limit, NgDirection::Forward);
        NgDpResult plain = ng_dp(g, sets.eta, g.length_limit, NgDirection::Backward);
        NgDpOptions opts;
        opts.completion_bounds = &forward.label_costs;
        NgDpResult filtered = ng_dp(g, sets.eta, g.length_limit, NgDirection::Backward, opts);
        if (plain.bound < -1e-9) {
            CHECK(filtered.bound == Catch::Approx(plain.bound).margin(1e-9));
            CHECK_FALSE(filtered.certified_nonnegative);
        } else {
            CHECK((filtered.certified_nonnegative || filtered.bound >= -1e-9));
        }
    }
}

TEST_CASE("oversized memory sets are refused") {
    std::vector<std::pair<int, double>> source{{0, -1.0}};
    std::vector<std::tuple<int, int, double>> arcs;
    for (int v = 0; v + 1 < 25; ++v) arcs.emplace_back(v, v + 1, -0.1);
    PricingGraph g = build_pricing_graph_raw(25, 25, std::move(source), arcs);
    prepare(g);
    std::vector<int> everyone;
    for (int v = 0; v < g.n; ++v)
        if (g.alive[v]) everyone.push_back(v);
    REQUIRE(everyone.size() > 20);
    std::vector<std::vector<int>> eta(g.n, everyone);
    CHECK_THROWS_AS(ng_dp(g, eta, g.length_limit, NgDirection::Forward), UnsupportedError);
}

TEST_CASE("DSSR rejects a nonpositive size limit") {
    PricingGraph g = prepared_g1();
    NgConfig config;
    config.mode = DssrMode::Limited;
    config.size_limit = 0;
    CHECK_THROWS_AS(solve_ng_dssr(g, DualVector::zeros(g.n), config), ParameterError);
}

TEST_CASE("DSSR terminates immediately on the sparse fixture") {
    PricingGraph g = prepared_g1();
    NgConfig config;
    NgSolveResult res = solve_ng_dssr(g, DualVector::zeros(g.n), config);
    CHECK(res.solution.cost == Catch::Approx(-3.0));
    CHECK(res.solution.elementary);
    CHECK(res.solution.is_proven_optimal);
    CHECK(res.iterations == 1);
    CHECK(res.solution.kind == SolutionKind::RelaxationBound);
}

TEST_CASE("DSSR bounds are valid in every mode") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 50; ++trial) {
        PricingGraph g = oracle::random_pricing(rng, 14, 5);
        prepare(g);
        EmpplcInstance pinst(g);
        double exact = solve_exact(pinst).cost;
        for (DssrMode mode : {DssrMode::None, DssrMode::Limited, DssrMode::Predefined,
                              DssrMode::UnlimitedTestOnly}) {
            NgConfig config;
            config.mode = mode;
            config.lambda = 2;
            config.size_limit = 2;
            config.seed = trial;
            NgSolveResult res = solve_ng_dssr(g, DualVector::zeros(g.n), config);
            CHECK(res.solution.cost <= exact + 1e-9);
            if (res.solution.elementary)
                CHECK(res.solution.cost == Catch::Approx(exact).margin(1e-9));
            if (mode == DssrMode::UnlimitedTestOnly) {
                CHECK(res.solution.cost == Catch::Approx(exact).margin(1e-9));
            }
        }
    }
}

TEST_CASE("completion bounds do not change the DSSR answer") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 30; ++trial) {
        PricingGraph g = oracle::random_pricing(rng, 12, 5);
        prepare(g);
        NgConfig with;
        with.mode = DssrMode::UnlimitedTestOnly;
        NgConfig without = with;
        without.use_completion_bounds = false;
        NgSolveResult a = solve_ng_dssr(g, DualVector::zeros(g.n), with);
        NgSolveResult b = solve_ng_dssr(g, DualVector::zeros(g.n), without);
        CHECK(a.solution.cost == Catch::Approx(b.solution.cost).margin(1e-9));
    }
}

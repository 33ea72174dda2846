#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>

#include "kepcg/instance.hpp"
#include "kepcg/io.hpp"
#include "oracle.hpp"

using namespace kepcg;

TEST_CASE("generator produces the requested pool shape") {
    GeneratorParams params;
    params.num_pairs = 50;
    params.altruist_fraction = 0.04;
    params.seed = 1;
    CompatibilityInstance inst = generate(params);
    CHECK(inst.num_pairs() == 50);
    CHECK(inst.num_altruists() == 2);
    for (const Arc& a : inst.arcs()) CHECK_FALSE(inst.is_altruist(inst.index_of(a.to)));
}

TEST_CASE("generator is deterministic per seed") {
    GeneratorParams params;
    params.seed = 42;
    CompatibilityInstance a = generate(params);
    CompatibilityInstance b = generate(params);
    CHECK(instance_to_json(a).dump() == instance_to_json(b).dump());

    params.seed = 43;
    CompatibilityInstance c = generate(params);
    CHECK(instance_to_json(a).dump() != instance_to_json(c).dump());
}

TEST_CASE("weight mode changes weights but not structure") {
    GeneratorParams params;
    params.seed = 9;
    CompatibilityInstance unit = generate(params);
    params.weight_mode = WeightMode::UniformRandom;
    CompatibilityInstance uniform = generate(params);
    REQUIRE(unit.arcs().size() == uniform.arcs().size());
    for (std::size_t i = 0; i < unit.arcs().size(); ++i) {
        CHECK(unit.arcs()[i].from == uniform.arcs()[i].from);
        CHECK(unit.arcs()[i].to == uniform.arcs()[i].to);
        CHECK(unit.arcs()[i].weight == 1.0);
        CHECK(uniform.arcs()[i].weight >= 0.0);
        CHECK(uniform.arcs()[i].weight <= 1.0);
    }
}

TEST_CASE("generated instances satisfy every instance invariant") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pairs(2, 40);
    std::uniform_real_distribution<double> frac(0.0, 0.3);
    for (int trial = 0; trial < 25; ++trial) {
        GeneratorParams params;
        params.num_pairs = pairs(rng);
        params.altruist_fraction = frac(rng);
        params.seed = rng();
        // The constructor revalidates everything; no throw means all
        // invariants hold.
        CompatibilityInstance inst = generate(params);
        CHECK(inst.num_pairs() == params.num_pairs);
    }
}

TEST_CASE("generator calibration: mean out-degree stays in the recorded band") {
    // Band frozen from a 100-seed calibration run with default parameters
    // before the acceptance suite was finalized.
    GeneratorParams params;
    double total_degree = 0.0;
    int total_vertices = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        params.seed = seed;
        CompatibilityInstance inst = generate(params);
        total_degree += static_cast<double>(inst.arcs().size());
        total_vertices += inst.n();
    }
    double mean_out_degree = total_degree / total_vertices;
    CHECK(mean_out_degree >= 15.0);
    CHECK(mean_out_degree <= 26.0);
}

TEST_CASE("invalid generator parameters are rejected") {
    GeneratorParams params;
    params.blood_type_freq = {0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(generate(params), ParameterError);
    params = GeneratorParams{};
    params.altruist_fraction = 1.5;
    CHECK_THROWS_AS(generate(params), ParameterError);
    params = GeneratorParams{};
    params.num_pairs = 0;
    CHECK_THROWS_AS(generate(params), ParameterError);
}

TEST_CASE("instance invariants are enforced") {
    std::vector<std::pair<VertexId, bool>> vs{{0, true}, {1, false}, {2, false}};
    CHECK_THROWS_WITH(
        CompatibilityInstance(vs, {{1, 0, 1.0}}, 3, 4),
        Catch::Matchers::ContainsSubstring("arc into altruist"));
    CHECK_THROWS_AS(CompatibilityInstance(vs, {{1, 1, 1.0}}, 3, 4), ValidationError);
    CHECK_THROWS_AS(CompatibilityInstance(vs, {{1, 2, 1.0}, {1, 2, 2.0}}, 3, 4),
                    ValidationError);
    CHECK_THROWS_AS(CompatibilityInstance(vs, {{1, 2, -1.0}}, 3, 4), ValidationError);
    CHECK_THROWS_AS(CompatibilityInstance(vs, {{1, 2, 1.0}}, 1, 4), ValidationError);
    CHECK_THROWS_AS(CompatibilityInstance(vs, {{1, 2, 1.0}}, 3, 0), ValidationError);
    CHECK_THROWS_AS(
        CompatibilityInstance({{0, true}, {0, false}}, {}, 3, 4), ValidationError);
}

TEST_CASE("instance serialization round-trips") {
    GeneratorParams params;
    params.seed = 7;
    CompatibilityInstance inst = generate(params);
    std::string path = "roundtrip_instance.json";
    save_instance(inst, path);
    CompatibilityInstance loaded = load_instance(path);
    CHECK(instance_to_json(loaded).dump() == instance_to_json(inst).dump());
    std::remove(path.c_str());
}

TEST_CASE("the bundled fixture file matches the worked example") {
    CompatibilityInstance inst = load_instance(std::string(KEPCG_DATA_DIR) + "/g1.json");
    CHECK(inst.num_pairs() == 5);
    CHECK(inst.num_altruists() == 2);
    CHECK(inst.arcs().size() == 8);
    CHECK(instance_to_json(inst).dump() == instance_to_json(oracle::g1()).dump());
}

TEST_CASE("malformed instance files raise parse errors naming the field") {
    nlohmann::json j = instance_to_json(oracle::g1());
    j.erase("k");
    CHECK_THROWS_WITH(instance_from_json(j), Catch::Matchers::ContainsSubstring("\"k\""));

    j = instance_to_json(oracle::g1());
    j["vertices"][0].erase("id");
    CHECK_THROWS_WITH(instance_from_json(j), Catch::Matchers::ContainsSubstring("\"id\""));

    j = instance_to_json(oracle::g1());
    j["format"] = 2;
    CHECK_THROWS_AS(instance_from_json(j), ParseError);

    // Arc into an altruist survives parsing but fails validation.
    j = instance_to_json(oracle::g1());
    j["arcs"].push_back({{"from", 3}, {"to", 1}, {"w", 1.0}});
    CHECK_THROWS_WITH(instance_from_json(j),
                      Catch::Matchers::ContainsSubstring("arc into altruist"));
}

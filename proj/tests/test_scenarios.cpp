#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sfplan/scenarios.hpp"

using namespace sfplan;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("default grid enumerates exactly 672 scenarios") {
    const ScenarioGrid grid = default_grid();
    CHECK(grid.size() == 672);
    const auto specs = generate_grid(grid, 1);
    CHECK(specs.size() == 672);

    // lexicographic enumeration with stable ids
    CHECK(specs[0].scenario_id == "S0000");
    CHECK(specs[671].scenario_id == "S0671");
    CHECK(specs[0].distance_m == grid.distances_m.front());
    CHECK(specs[671].distance_m == grid.distances_m.back());

    for (const auto& spec : specs) CHECK_NOTHROW(spec.validate());
}

TEST_CASE("single-value axes produce a single scenario") {
    ScenarioGrid grid;
    grid.distances_m = {500.0};
    grid.speeds_mps = {0.0};
    grid.environments = {EnvironmentModel{}};
    grid.traffic_profiles = {TrafficProfile{}};
    const auto specs = generate_grid(grid, 9);
    CHECK(specs.size() == 1);
}

TEST_CASE("empty axes are rejected") {
    ScenarioGrid grid = default_grid();
    grid.speeds_mps.clear();
    CHECK_THROWS_AS(generate_grid(grid, 1), InvalidGridError);
}

TEST_CASE("regeneration is deterministic") {
    const auto a = generate_grid(default_grid(), 7);
    const auto b = generate_grid(default_grid(), 7);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].scenario_id == b[i].scenario_id);
        CHECK(a[i].distance_m == b[i].distance_m);
        CHECK(a[i].speed_mps == b[i].speed_mps);
        CHECK(a[i].environment.class_label == b[i].environment.class_label);
    }
}

TEST_CASE("scenario CSV round-trips losslessly") {
    const auto specs = generate_grid(default_grid(), 1);
    const std::string path = temp_path("sfplan_scenarios_roundtrip.csv");
    save_scenarios(specs, path);

    const auto start = std::chrono::steady_clock::now();
    const auto loaded = load_scenarios(path);
    const auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(std::chrono::duration<double>(elapsed).count() < 1.0);

    REQUIRE(loaded.size() == specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        CHECK(loaded[i].scenario_id == specs[i].scenario_id);
        CHECK(loaded[i].distance_m == specs[i].distance_m);
        CHECK(loaded[i].speed_mps == specs[i].speed_mps);
        CHECK(loaded[i].payload_bytes == specs[i].payload_bytes);
        CHECK(loaded[i].packets_per_hour == specs[i].packets_per_hour);
        CHECK(loaded[i].required_throughput_bps == specs[i].required_throughput_bps);
        CHECK(loaded[i].environment.class_label == specs[i].environment.class_label);
        CHECK(loaded[i].environment.path_loss_exponent == specs[i].environment.path_loss_exponent);
        CHECK(loaded[i].environment.reference_loss_1m_db ==
              specs[i].environment.reference_loss_1m_db);
        CHECK(loaded[i].environment.shadowing_sigma_db == specs[i].environment.shadowing_sigma_db);
        CHECK(loaded[i].region.duty_cycle_limit == specs[i].region.duty_cycle_limit);
        CHECK(loaded[i].region.max_tx_power_dbm == specs[i].region.max_tx_power_dbm);
    }
    std::remove(path.c_str());
}

TEST_CASE("malformed rows are rejected with row and column") {
    const auto specs = generate_grid(default_grid(), 1);
    const std::string path = temp_path("sfplan_scenarios_bad.csv");
    save_scenarios({specs[0]}, path);

    // corrupt the distance field of the first data row
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    in.close();
    row.replace(row.find(",100,"), 5, ",-5,");
    std::ofstream out(path);
    out << header << "\n" << row << "\n";
    out.close();

    try {
        load_scenarios(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row == 2);
        CHECK(e.column == "distance_m");
    }
    std::remove(path.c_str());
}

TEST_CASE("single-scenario key-value files load") {
    const std::string path = temp_path("sfplan_scenario.kv");
    std::ofstream out(path);
    out << "# one planning case\n"
        << "distance_m = 500\n"
        << "speed_mps = 5\n"
        << "payload_bytes = 20\n"
        << "packets_per_hour = 60\n";
    out.close();

    const ScenarioSpec spec = load_scenario_kv(path);
    CHECK(spec.distance_m == 500.0);
    CHECK(spec.speed_mps == 5.0);
    CHECK(spec.payload_bytes == 20);
    CHECK(spec.packets_per_hour == 60.0);
    std::remove(path.c_str());
}

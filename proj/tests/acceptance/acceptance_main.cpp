// Acceptance suite: end-to-end checks of the shipped calibration against
// the reference behaviors this project is built to reproduce. Each check
// prints one PASS/FAIL line; the process exits non-zero if any requested
// check fails.
//
// Usage: sfplan_acceptance [1..7|all]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sfplan/config.hpp"
#include "sfplan/evaluator.hpp"
#include "sfplan/linksim.hpp"
#include "sfplan/phy.hpp"
#include "sfplan/scenarios.hpp"
#include "sfplan/selector.hpp"

using namespace sfplan;

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kSeed = 43301;

struct Check {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<ScenarioSpec> reference_scenarios() {
    // Five planning cases: 100/500/1000/1500/1800 m, 20-byte payload,
    // 60 packets/hour, moderate mobility, default line-of-sight channel.
    std::vector<ScenarioSpec> specs;
    int i = 1;
    for (double d : {100.0, 500.0, 1000.0, 1500.0, 1800.0}) {
        ScenarioSpec s;
        s.scenario_id = "R" + std::to_string(i++);
        s.distance_m = d;
        s.speed_mps = 8.0;
        s.payload_bytes = 20;
        s.packets_per_hour = 60.0;
        specs.push_back(std::move(s));
    }
    return specs;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// --------------------------------------------------------------------------
// 1. Reference scenario mapping
// --------------------------------------------------------------------------

Check criterion_1() {
    Check check;
    const auto start = std::chrono::steady_clock::now();

    const AppConfig config;
    const auto specs = reference_scenarios();
    std::vector<int> chosen;
    for (const auto& spec : specs)
        chosen.push_back(select_sf(spec, config.radio, config.weights, config.selector).chosen.value);

    check.require(chosen[0] == 7, "100 m chose SF" + std::to_string(chosen[0]) + " not SF7");
    check.require(chosen[1] == 8, "500 m chose SF" + std::to_string(chosen[1]) + " not SF8");
    check.require(chosen[2] == 9, "1000 m chose SF" + std::to_string(chosen[2]) + " not SF9");
    check.require(chosen[3] == 10 || chosen[3] == 11,
                  "1500 m chose SF" + std::to_string(chosen[3]) + " not SF10/SF11");
    check.require(chosen[4] == 11, "1800 m chose SF" + std::to_string(chosen[4]) + " not SF11");

    const double elapsed = seconds_since(start);
    check.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s exceeds 1 s");
    check.note("chosen = SF" + std::to_string(chosen[0]) + "/SF" + std::to_string(chosen[1]) +
               "/SF" + std::to_string(chosen[2]) + "/SF" + std::to_string(chosen[3]) + "/SF" +
               std::to_string(chosen[4]));
    return check;
}

// --------------------------------------------------------------------------
// 2. Reference PDR bands at the chosen SFs
// --------------------------------------------------------------------------

Check criterion_2() {
    Check check;
    const auto start = std::chrono::steady_clock::now();

    const AppConfig config;
    const auto specs = reference_scenarios();
    const int n_packets = 1000;

    // Reference bands, widened by the +/-5 percentage-point tolerance:
    // >99%, >98%, >95%, 90-95%, 70-80%.
    const double lo[5] = {0.94, 0.93, 0.90, 0.85, 0.65};
    const double hi[5] = {1.00, 1.00, 1.00, 1.00, 0.85};

    std::string pdrs;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto selection =
            select_sf(specs[i], config.radio, config.weights, config.selector);
        const double horizon = scenario_horizon_s(specs[i], n_packets);
        const auto trace = trace_for_scenario(specs[i], horizon);
        const auto outcome =
            simulate_link(specs[i], selection.chosen, config.radio, trace, kSeed, n_packets);

        if (!pdrs.empty()) pdrs += ", ";
        pdrs += fmt(outcome.pdr);
        const std::string tag = "scenario " + std::to_string(i + 1) + " pdr " + fmt(outcome.pdr);
        check.require(outcome.pdr >= lo[i] && outcome.pdr <= hi[i],
                      tag + " outside [" + fmt(lo[i]) + ", " + fmt(hi[i]) + "]");
    }

    const double elapsed = seconds_since(start);
    check.require(elapsed < 10.0, "runtime " + fmt(elapsed) + " s exceeds 10 s");
    check.note("pdr = " + pdrs);
    return check;
}

// --------------------------------------------------------------------------
// 3. Grid accuracy
// --------------------------------------------------------------------------

Check criterion_3() {
    Check check;
    const auto start = std::chrono::steady_clock::now();

    const AppConfig config;
    const auto specs = generate_grid(default_grid(), kSeed);
    check.require(specs.size() == 672, "default grid is not 672 scenarios");

    ValidateParams params;
    params.weights = config.weights;
    params.selector = config.selector;
    params.n_packets = 1000;
    params.seed = kSeed;
    params.jobs = 4;

    const auto report = validate(specs, config.radio, params);
    check.require(report.exact_match_rate >= 0.90,
                  "exact_match_rate " + fmt(report.exact_match_rate) + " below 0.90");
    check.require(report.within_one_sf_rate >= 0.97,
                  "within_one_sf_rate " + fmt(report.within_one_sf_rate) + " below 0.97");

    const double elapsed = seconds_since(start);
    check.require(elapsed < 300.0, "runtime " + fmt(elapsed) + " s exceeds 5 minutes");
    check.note("exact=" + fmt(report.exact_match_rate) +
               " within1=" + fmt(report.within_one_sf_rate) + " infeasible=" +
               std::to_string(report.infeasible.size()) + " runtime=" + fmt(elapsed) + "s");
    return check;
}

// --------------------------------------------------------------------------
// 4. Static selection vs dynamic baseline at high mobility
// --------------------------------------------------------------------------

Check criterion_4() {
    Check check;
    const AppConfig config;
    auto specs = generate_grid(default_grid(), kSeed);
    std::vector<ScenarioSpec> high;
    for (auto& spec : specs)
        if (spec.mobility_class() == MobilityClass::High) high.push_back(std::move(spec));
    check.require(!high.empty(), "no high-mobility scenarios in the grid");

    const auto report = compare_static_vs_dynamic(high, config.radio, config.weights,
                                                  config.selector, config.dynamic, kSeed, 1000);
    check.require(report.mean_static.count(MobilityClass::High) == 1, "missing high-mobility mean");
    if (check.pass) {
        const double mean_s = report.mean_static.at(MobilityClass::High);
        const double mean_d = report.mean_dynamic.at(MobilityClass::High);
        check.require(mean_s > mean_d, "static mean " + fmt(mean_s) +
                                           " does not exceed dynamic mean " + fmt(mean_d));
        check.note("static=" + fmt(mean_s) + " dynamic=" + fmt(mean_d) + " scenarios=" +
                   std::to_string(report.rows.size()));
    }
    return check;
}

// --------------------------------------------------------------------------
// 5. PHY oracle suite
// --------------------------------------------------------------------------

Check criterion_5() {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    const RadioConfig radio;

    // Frozen hand-derived packet durations, 20-byte default framing.
    const double toa7 = time_on_air_s(SpreadingFactor{7}, radio, 20);
    const double toa12 = time_on_air_s(SpreadingFactor{12}, radio, 20);
    check.require(std::abs(toa7 - 0.056576) < 1e-6,
                  "ToA(SF7) " + fmt(toa7 * 1000.0) + " ms not 56.576 ms");
    check.require(std::abs(toa12 - 1.318912) < 1e-6,
                  "ToA(SF12) " + fmt(toa12 * 1000.0) + " ms not 1318.912 ms");

    std::uint64_t state = 8675309;
    int cases = 0;
    for (int i = 0; i < 10000; ++i) {
        state = rng::mix(state);
        EnvironmentModel env;
        env.path_loss_exponent = 1.5 + 2.5 * rng::uniform01(state);
        env.reference_loss_1m_db = 20.0 + 70.0 * rng::uniform01(rng::mix(state ^ 0x11));
        env.shadowing_sigma_db = 0.0;
        const double distance = 1.0 + 4000.0 * rng::uniform01(rng::mix(state ^ 0x22));
        const double fade = 10.0 * rng::uniform01(rng::mix(state ^ 0x33));
        const SpreadingFactor sf{7 + static_cast<int>(rng::uniform01(rng::mix(state ^ 0x44)) * 6)};

        // link budget identity
        const LinkBudget budget = link_budget(sf, radio, distance, env);
        if (budget.link_margin_db != budget.expected_rssi_dbm - budget.sensitivity_dbm) {
            check.require(false, "link margin identity violated");
            break;
        }
        // path loss monotonicity
        if (path_loss(distance * 1.5, env).loss_db <= path_loss(distance, env).loss_db) {
            check.require(false, "path loss not increasing in distance");
            break;
        }
        // sensitivity ordering
        if (sf.value < 12 &&
            sensitivity_dbm(SpreadingFactor{sf.value + 1}, radio.bandwidth_hz) >=
                sensitivity_dbm(sf, radio.bandwidth_hz)) {
            check.require(false, "sensitivity not strictly decreasing");
            break;
        }
        // range inversion round-trip
        const double range = max_reliable_range_m(sf, radio, env, fade);
        if (range >= 1.0) {
            const double margin = link_budget(sf, radio, range, env).link_margin_db;
            if (std::abs(margin - fade) > 1e-6) {
                check.require(false, "range round-trip off by " + fmt(margin - fade) + " dB");
                break;
            }
        }
        cases++;
    }
    check.require(cases == 10000, "property sweep aborted early");

    const double elapsed = seconds_since(start);
    check.require(elapsed < 5.0, "runtime " + fmt(elapsed) + " s exceeds 5 s");
    check.note("10000 randomized cases, runtime " + fmt(elapsed) + "s");
    return check;
}

// --------------------------------------------------------------------------
// 6. Simulator oracle equivalence at zero shadowing
// --------------------------------------------------------------------------

Check criterion_6() {
    Check check;
    const RadioConfig radio;

    std::uint64_t state = 424243;
    for (int rep = 0; rep < 50; ++rep) {
        state = rng::mix(state);
        ScenarioSpec spec;
        spec.scenario_id = "Z" + std::to_string(rep);
        spec.distance_m = 2000.0;
        spec.payload_bytes = 20;
        spec.packets_per_hour = 20.0;  // light traffic: no duty deferrals
        spec.environment.shadowing_sigma_db = 0.0;

        const int n = 500;
        const double horizon = scenario_horizon_s(spec, n);
        const double near = 50.0 + 500.0 * rng::uniform01(state);
        const double far = near + 100.0 + 2500.0 * rng::uniform01(rng::mix(state ^ 0x7));
        const double legs = 2.0 + 6.0 * rng::uniform01(rng::mix(state ^ 0x8));
        const auto trace = out_and_back_trace(near, far, (far - near) * legs / horizon, horizon);
        const SpreadingFactor sf{7 + rep % 6};

        const auto outcome = simulate_link(spec, sf, radio, trace, state, n);

        // Independent recount: scheduled send times against the zero-margin
        // range, trace interpolated in the same piecewise-linear way.
        const double limit = max_reliable_range_m(sf, radio, spec.environment, 0.0);
        int in_range = 0;
        for (int i = 0; i < n; ++i) {
            const double t = (i + 0.5) * horizon / n;
            in_range += trace.distance_at(t) <= limit ? 1 : 0;
        }
        const double expected = static_cast<double>(in_range) / n;
        if (outcome.pdr != expected) {
            check.require(false, "trace " + std::to_string(rep) + ": pdr " + fmt(outcome.pdr) +
                                     " != analytic " + fmt(expected));
            break;
        }
    }
    check.note("50 randomized zero-shadowing traces matched exactly");
    return check;
}

// --------------------------------------------------------------------------
// 7. Byte-identical validation reruns
// --------------------------------------------------------------------------

std::string file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Check criterion_7() {
    Check check;
    const AppConfig config;

    // A grid slice keeps the double run quick while exercising the full
    // file pipeline.
    auto grid = default_grid();
    grid.distances_m = {100, 440, 900, 1340, 1780};
    const auto specs = generate_grid(grid, kSeed);

    ValidateParams params;
    params.weights = config.weights;
    params.selector = config.selector;
    params.n_packets = 500;
    params.seed = kSeed;

    const auto dir = fs::temp_directory_path() / "sfplan_acceptance_7";
    fs::create_directories(dir / "a");
    fs::create_directories(dir / "b");

    for (const char* run : {"a", "b"}) {
        const auto report = validate(specs, config.radio, params);
        write_report_csv(report, (dir / run / "report.csv").string());
        write_confusion_csv(report.confusion, (dir / run / "confusion.csv").string());
    }

    check.require(file_bytes(dir / "a" / "report.csv") == file_bytes(dir / "b" / "report.csv"),
                  "report.csv differs between reruns");
    check.require(
        file_bytes(dir / "a" / "confusion.csv") == file_bytes(dir / "b" / "confusion.csv"),
        "confusion.csv differs between reruns");
    check.note("report.csv and confusion.csv byte-identical across reruns");
    fs::remove_all(dir);
    return check;
}

const char* kNames[7] = {
    "reference scenario mapping (select)",
    "reference PDR bands (simulate)",
    "672-scenario grid accuracy (validate)",
    "static vs dynamic at high mobility (compare)",
    "PHY oracle suite",
    "simulator analytic-oracle equivalence",
    "byte-identical validation reruns",
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    if (argc < 2 || std::strcmp(argv[1], "all") == 0) {
        for (int i = 1; i <= 7; ++i) wanted.push_back(i);
    } else {
        const int n = std::atoi(argv[1]);
        if (n < 1 || n > 7) {
            std::fprintf(stderr, "usage: %s [1..7|all]\n", argv[0]);
            return 2;
        }
        wanted.push_back(n);
    }

    Check (*criteria[7])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                              criterion_5, criterion_6, criterion_7};

    bool all_pass = true;
    for (int n : wanted) {
        Check check;
        try {
            check = criteria[n - 1]();
        } catch (const std::exception& e) {
            check.pass = false;
            check.detail = std::string("exception: ") + e.what();
        }
        std::printf("CRITERION %d [%s]: %s%s%s\n", n, kNames[n - 1],
                    check.pass ? "PASS" : "FAIL", check.detail.empty() ? "" : " — ",
                    check.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && check.pass;
    }
    return all_pass ? 0 : 1;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sfplan/linksim.hpp"
#include "sfplan/phy.hpp"

using namespace sfplan;

namespace {

ScenarioSpec scenario_at(double distance_m, double speed_mps = 0.0, double pph = 60.0) {
    ScenarioSpec s;
    s.scenario_id = "simtest";
    s.distance_m = distance_m;
    s.speed_mps = speed_mps;
    s.payload_bytes = 20;
    s.packets_per_hour = pph;
    return s;
}

// Independent reimplementation of the packet schedule + trace lookup used
// by the zero-shadowing equivalence checks. Deliberately kept separate
// from the simulator internals.
double analytic_in_range_fraction(const ScenarioSpec& spec, SpreadingFactor sf,
                                  const RadioConfig& config, const MobilityTrace& trace,
                                  int n_packets) {
    const double horizon = scenario_horizon_s(spec, n_packets);
    const double limit = max_reliable_range_m(sf, config, spec.environment, 0.0);
    int in_range = 0;
    for (int i = 0; i < n_packets; ++i) {
        const double t = (i + 0.5) * horizon / n_packets;
        // linear interpolation, written out independently
        double distance = trace.samples.back().distance_m;
        for (std::size_t k = 1; k < trace.samples.size(); ++k) {
            if (t <= trace.samples[k].t_s) {
                const auto& lo = trace.samples[k - 1];
                const auto& hi = trace.samples[k];
                distance = lo.distance_m +
                           (t - lo.t_s) / (hi.t_s - lo.t_s) * (hi.distance_m - lo.distance_m);
                break;
            }
        }
        if (distance <= limit) in_range++;
    }
    return static_cast<double>(in_range) / n_packets;
}

}  // namespace

TEST_CASE("trace validation catches malformed inputs") {
    MobilityTrace trace;
    CHECK_THROWS_AS(trace.validate(10.0), InvalidTraceError);

    trace.samples = {{0.0, 100.0}, {5.0, 200.0}};
    CHECK_THROWS_AS(trace.validate(10.0), InvalidTraceError);  // does not cover horizon
    trace.samples = {{0.0, 100.0}, {20.0, 200.0}};
    CHECK_NOTHROW(trace.validate(10.0));

    trace.samples = {{0.0, 100.0}, {0.0, 200.0}, {20.0, 100.0}};
    CHECK_THROWS_AS(trace.validate(10.0), InvalidTraceError);  // non-increasing time
    trace.samples = {{0.0, 100.0}, {5.0, -3.0}, {20.0, 100.0}};
    CHECK_THROWS_AS(trace.validate(10.0), InvalidTraceError);  // non-positive distance
}

TEST_CASE("trace interpolation is linear between samples") {
    MobilityTrace trace;
    trace.samples = {{0.0, 100.0}, {10.0, 200.0}, {30.0, 100.0}};
    CHECK(trace.distance_at(-5.0) == 100.0);
    CHECK(trace.distance_at(5.0) == doctest::Approx(150.0));
    CHECK(trace.distance_at(10.0) == doctest::Approx(200.0));
    CHECK(trace.distance_at(20.0) == doctest::Approx(150.0));
    CHECK(trace.distance_at(99.0) == 100.0);
}

TEST_CASE("trace generators cover the horizon") {
    const auto fixed = fixed_trace(500.0, 3600.0);
    CHECK(fixed.distance_at(1800.0) == 500.0);
    CHECK(fixed.end_time_s() >= 3600.0);

    const auto pass = linear_pass_trace(100.0, 900.0, 10.0, 3600.0);
    CHECK(pass.distance_at(0.0) == doctest::Approx(100.0));
    CHECK(pass.distance_at(40.0) == doctest::Approx(500.0));
    CHECK(pass.distance_at(80.0) == doctest::Approx(900.0));
    CHECK(pass.distance_at(3000.0) == doctest::Approx(900.0));  // holds after the pass

    const auto shuttle = out_and_back_trace(200.0, 800.0, 10.0, 3600.0);
    CHECK(shuttle.end_time_s() >= 3600.0);
    CHECK(shuttle.distance_at(0.0) == doctest::Approx(200.0));
    CHECK(shuttle.distance_at(60.0) == doctest::Approx(800.0));
    CHECK(shuttle.distance_at(120.0) == doctest::Approx(200.0));
}

TEST_CASE("deterministic deliveries with zero shadowing") {
    const RadioConfig config;
    ScenarioSpec spec = scenario_at(300.0);
    spec.environment.shadowing_sigma_db = 0.0;

    const double horizon = scenario_horizon_s(spec, 200);

    SUBCASE("all within range: pdr exactly 1") {
        const auto outcome =
            simulate_link(spec, SpreadingFactor{8}, config, fixed_trace(300.0, horizon), 5, 200);
        CHECK(outcome.pdr == 1.0);
        CHECK(outcome.packets_sent == 200);
        CHECK(outcome.packets_delivered == 200);
    }

    SUBCASE("beyond zero-margin range: pdr exactly 0") {
        spec.distance_m = 5000.0;
        const auto outcome =
            simulate_link(spec, SpreadingFactor{7}, config, fixed_trace(5000.0, horizon), 5, 200);
        CHECK(outcome.pdr == 0.0);
    }
}

TEST_CASE("zero-shadowing pdr equals the analytic in-range fraction") {
    const RadioConfig config;
    ScenarioSpec spec = scenario_at(600.0, 0.0, 20.0);
    spec.environment.shadowing_sigma_db = 0.0;

    SUBCASE("hand-built 40 percent out-of-range pass") {
        const SpreadingFactor sf{7};
        const double limit = max_reliable_range_m(sf, config, spec.environment, 0.0);
        const int n = 1000;
        const double horizon = scenario_horizon_s(spec, n);
        // linear sweep placed so exactly 40% of sends fall beyond the limit
        const double span = 400.0;
        const auto trace =
            linear_pass_trace(limit - 0.6 * span, limit + 0.4 * span, span / horizon, horizon);
        const auto outcome = simulate_link(spec, sf, config, trace, 11, n);
        CHECK(outcome.pdr == doctest::Approx(0.60).epsilon(1e-9));
    }

    SUBCASE("randomized traces, exact equivalence") {
        std::uint64_t state = 2024;
        for (int rep = 0; rep < 25; ++rep) {
            state = rng::mix(state);
            const double near = 100.0 + 400.0 * rng::uniform01(state);
            const double far = near + 200.0 + 1500.0 * rng::uniform01(rng::mix(state ^ 5));
            const int n = 400;
            const double horizon = scenario_horizon_s(spec, n);
            const double speed = (far - near) / (horizon / (3.0 + rep % 5));
            const auto trace = out_and_back_trace(near, far, speed, horizon);
            const SpreadingFactor sf{7 + rep % 6};

            const auto outcome = simulate_link(spec, sf, config, trace, state, n);
            const double expected = analytic_in_range_fraction(spec, sf, config, trace, n);
            CHECK(outcome.pdr == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("duty-cycle gate defers and accounts airtime") {
    const RadioConfig config;
    ScenarioSpec spec = scenario_at(200.0, 0.0, 3600.0);  // aggressive traffic
    spec.environment.shadowing_sigma_db = 0.0;
    spec.region.duty_cycle_limit = 0.01;

    const int n = 400;
    const double horizon = scenario_horizon_s(spec, n);
    const auto outcome =
        simulate_link(spec, SpreadingFactor{12}, config, fixed_trace(200.0, horizon), 3, n);

    // SF12 at 3600 pkt/h wants ~528 s of airtime against a 36 s hourly
    // allowance: nearly every packet defers past the horizon and counts
    // as sent-and-lost.
    CHECK(outcome.packets_sent == n);
    CHECK(outcome.pdr < 0.15);
    CHECK(outcome.pdr > 0.03);
    CHECK(outcome.airtime_used_s <= spec.region.airtime_budget_per_hour_s() + 1e-9);

    // light traffic never defers
    ScenarioSpec light = scenario_at(200.0, 0.0, 20.0);
    light.environment.shadowing_sigma_db = 0.0;
    const double lh = scenario_horizon_s(light, n);
    const auto ok = simulate_link(light, SpreadingFactor{12}, config, fixed_trace(200.0, lh), 3, n);
    CHECK(ok.pdr == 1.0);
}

TEST_CASE("brute force picks the expected best SF") {
    const RadioConfig config;

    SUBCASE("short range: SF7 wins on the low-SF tie-break") {
        const auto spec = scenario_at(100.0);
        const double horizon = scenario_horizon_s(spec, 1000);
        const auto result =
            brute_force_best_sf(spec, config, trace_for_scenario(spec, horizon), 7, 1000);
        CHECK(result.best.value == 7);
        CHECK(result.outcomes[0].pdr > 0.99);
        CHECK_FALSE(result.degenerate);
    }

    SUBCASE("1800 m: SF11 beats both the margin-starved SF10 and duty-throttled SF12") {
        const auto spec = scenario_at(1800.0);
        const double horizon = scenario_horizon_s(spec, 1000);
        const auto result =
            brute_force_best_sf(spec, config, fixed_trace(1800.0, horizon), 7, 1000);
        CHECK(result.best.value == 11);
        CHECK(result.outcomes[4].pdr > result.outcomes[3].pdr);
        CHECK(result.outcomes[4].pdr > result.outcomes[5].pdr);
    }

    SUBCASE("absurd distance: everything dead, SF7 by tie-break, flagged") {
        const auto spec = scenario_at(80000.0);
        const double horizon = scenario_horizon_s(spec, 200);
        const auto result =
            brute_force_best_sf(spec, config, fixed_trace(80000.0, horizon), 7, 200);
        CHECK(result.best.value == 7);
        CHECK(result.degenerate);
        for (const auto& o : result.outcomes) CHECK(o.pdr == 0.0);
    }
}

TEST_CASE("simulation outcomes are bit-reproducible and seed-stable") {
    const RadioConfig config;
    const auto spec = scenario_at(1700.0, 8.0);
    const double horizon = scenario_horizon_s(spec, 1000);
    const auto trace = trace_for_scenario(spec, horizon);

    const auto a = simulate_link(spec, SpreadingFactor{10}, config, trace, 99, 1000);
    const auto b = simulate_link(spec, SpreadingFactor{10}, config, trace, 99, 1000);
    CHECK(a.packets_delivered == b.packets_delivered);
    CHECK(a.pdr == b.pdr);
    CHECK(a.airtime_used_s == b.airtime_used_s);

    // different seed moves the estimate by at most the binomial width
    const auto c = simulate_link(spec, SpreadingFactor{10}, config, trace, 100, 1000);
    CHECK(std::abs(c.pdr - a.pdr) < 0.10);
}

TEST_CASE("pdr is monotone non-increasing in distance for a fixed SF") {
    const RadioConfig config;
    double prev = 1.1;
    for (double d = 100.0; d <= 1800.0; d += 100.0) {
        const auto spec = scenario_at(d);
        const double horizon = scenario_horizon_s(spec, 1000);
        const auto outcome =
            simulate_link(spec, SpreadingFactor{9}, config, fixed_trace(d, horizon), 17, 1000);
        CHECK(outcome.pdr <= prev + 0.03);  // statistical slack
        prev = outcome.pdr;
    }
}

TEST_CASE("dynamic baseline equals the static link when it never switches") {
    const RadioConfig config;
    ScenarioSpec spec = scenario_at(300.0, 0.0, 30.0);
    spec.environment.shadowing_sigma_db = 0.0;

    DynamicProtocolConfig dyn;
    dyn.margin_low_threshold_db = -1000.0;  // wide hysteresis: no switching
    dyn.margin_high_threshold_db = 1000.0;

    const int n = 500;
    const double horizon = scenario_horizon_s(spec, n);
    const auto trace = fixed_trace(300.0, horizon);

    const auto dynamic = simulate_dynamic_protocol(spec, config, dyn, trace, 21, n);
    const auto fixed = simulate_link(spec, SpreadingFactor{12}, config, trace, 21, n);
    CHECK(dynamic.sf.value == 12);  // entered at the most robust SF, stayed
    CHECK(dynamic.pdr == doctest::Approx(fixed.pdr));
    CHECK(dynamic.pdr == 1.0);
}

TEST_CASE("dynamic baseline trails the brute-force best under high mobility") {
    const RadioConfig config;
    const auto spec = scenario_at(1160.0, 15.0);
    const double horizon = scenario_horizon_s(spec, 1000);
    const auto trace = trace_for_scenario(spec, horizon);

    const auto brute = brute_force_best_sf(spec, config, trace, 31, 1000);
    const auto dynamic = simulate_dynamic_protocol(spec, config, DynamicProtocolConfig{}, trace,
                                                   31, 1000);
    CHECK(dynamic.pdr < brute.outcomes[brute.best.index()].pdr);
}

TEST_CASE("overhead-free dynamic baseline approaches the static link") {
    const RadioConfig config;
    const auto spec = scenario_at(800.0, 3.0);  // slow mobility

    DynamicProtocolConfig dyn;
    dyn.sf_switch_dwell_s = 0.0;
    dyn.control_packet_bytes = 1;
    dyn.beacon_interval_s = 100000.0;

    const int n = 1000;
    const double horizon = scenario_horizon_s(spec, n);
    const auto trace = trace_for_scenario(spec, horizon);

    const auto dynamic = simulate_dynamic_protocol(spec, config, dyn, trace, 41, n);
    const auto brute = brute_force_best_sf(spec, config, trace, 41, n);
    CHECK(dynamic.pdr >= brute.outcomes[brute.best.index()].pdr - 0.02);
}

TEST_CASE("airtime accounting stays within the duty budget") {
    const RadioConfig config;
    for (double pph : {20.0, 60.0, 90.0, 600.0}) {
        const auto spec = scenario_at(400.0, 0.0, pph);
        const int n = 500;
        const double horizon = scenario_horizon_s(spec, n);
        const auto outcome =
            simulate_link(spec, SpreadingFactor{11}, config, fixed_trace(400.0, horizon), 53, n);
        CHECK(outcome.airtime_used_s <=
              spec.region.duty_cycle_limit * std::max(horizon, 3600.0) + 1e-9);
    }
}

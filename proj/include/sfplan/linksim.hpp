#pragma once

// Seeded Monte-Carlo link simulator. Packets are scheduled uniformly over
// the horizon, gated by a rolling one-hour duty-cycle budget, and delivered
// when the shadowed received power clears the receiver sensitivity. Also
// hosts the dynamic SF-switching baseline used for protocol comparisons.
//
// Every run owns its random stream (derived from the caller's seed), so
// simulations are bit-reproducible and safe to run in parallel.

#include <cstdint>
#include <vector>

#include "sfplan/selector.hpp"
#include "sfplan/types.hpp"

namespace sfplan {

// ---------------------------------------------------------------------------
// Mobility traces
// ---------------------------------------------------------------------------

struct TracePoint {
    double t_s = 0.0;
    double distance_m = 0.0;
};

/// Piecewise-linear gateway-to-node distance over time. Times must be
/// strictly increasing, distances positive, and the trace must cover the
/// full simulation horizon.
struct MobilityTrace {
    std::vector<TracePoint> samples;

    void validate(double horizon_s) const;

    /// Linear interpolation between samples; clamps outside the span.
    double distance_at(double t_s) const;

    double end_time_s() const { return samples.empty() ? 0.0 : samples.back().t_s; }
};

/// Constant distance for the whole horizon.
MobilityTrace fixed_trace(double distance_m, double horizon_s);

/// One pass from `from_m` to `to_m` at `speed_mps`, then holding position.
MobilityTrace linear_pass_trace(double from_m, double to_m, double speed_mps, double horizon_s);

/// Repeated shuttle between `near_m` and `far_m` at `speed_mps` (triangle
/// wave in distance), covering the horizon.
MobilityTrace out_and_back_trace(double near_m, double far_m, double speed_mps, double horizon_s);

/// Trace implied by a scenario: static scenarios hold the planning
/// distance; mobile ones shuttle between one third of the planning
/// distance and the planning distance (which stays the trace maximum).
MobilityTrace trace_for_scenario(const ScenarioSpec& scenario, double horizon_s);

/// Horizon implied by the scenario's traffic rate: n_packets sent at
/// packets_per_hour.
double scenario_horizon_s(const ScenarioSpec& scenario, int n_packets);

// ---------------------------------------------------------------------------
// Outcomes
// ---------------------------------------------------------------------------

struct SimOutcome {
    SpreadingFactor sf;
    int packets_sent = 0;
    int packets_delivered = 0;
    double pdr = 0.0;  // delivered / sent, 0 when nothing was sent
    double airtime_used_s = 0.0;
    std::uint64_t seed = 0;
};

/// Simulates one (scenario, SF) run: uniform schedule, duty gating,
/// threshold-on-received-power delivery with log-normal shadowing.
/// A packet whose start would break the rolling one-hour airtime budget is
/// deferred; deferral past the horizon counts as sent-and-lost.
SimOutcome simulate_link(const ScenarioSpec& scenario, SpreadingFactor sf,
                         const RadioConfig& config, const MobilityTrace& trace,
                         std::uint64_t seed, int n_packets);

struct BruteForceResult {
    SpreadingFactor best;
    std::vector<SimOutcome> outcomes;  // one per SF, ascending
    bool degenerate = false;           // every SF delivered nothing
};

/// Runs simulate_link for all six SFs on independent substreams and picks
/// the highest PDR; ties break to the lower SF.
BruteForceResult brute_force_best_sf(const ScenarioSpec& scenario, const RadioConfig& config,
                                     const MobilityTrace& trace, std::uint64_t seed,
                                     int n_packets);

// ---------------------------------------------------------------------------
// Dynamic SF-switching baseline
// ---------------------------------------------------------------------------

/// Timing and hysteresis parameters of the beacon/response/data baseline.
struct DynamicProtocolConfig {
    double beacon_interval_s = 300.0;
    double margin_low_threshold_db = 3.0;
    double margin_high_threshold_db = 10.0;
    double sf_switch_dwell_s = 2.0;
    int control_packet_bytes = 8;
    /// Consecutive data losses that trigger a blind step up in SF.
    int losses_before_step_up = 3;

    void validate() const {
        if (margin_high_threshold_db <= margin_low_threshold_db)
            throw InvalidConfigError("margin_high_threshold_db must exceed margin_low_threshold_db");
        if (sf_switch_dwell_s < 0) throw InvalidConfigError("sf_switch_dwell_s must be >= 0");
        if (beacon_interval_s <= 0) throw InvalidConfigError("beacon_interval_s must be > 0");
        if (control_packet_bytes < 1 || control_packet_bytes > 255)
            throw InvalidConfigError("control_packet_bytes must be in 1..255");
        if (losses_before_step_up < 1)
            throw InvalidConfigError("losses_before_step_up must be >= 1");
    }
};

/// Baseline state machine: the gateway beacons on zone entry, end nodes
/// answer with link metrics, and delivered data packets drive hysteresis
/// steps of the spreading factor. Every switch costs dwell time (data sent
/// during it is lost) plus one control packet of airtime; beacons and
/// control packets consume the shared duty budget. Counts data packets
/// only.
SimOutcome simulate_dynamic_protocol(const ScenarioSpec& scenario, const RadioConfig& config,
                                     const DynamicProtocolConfig& dyn, const MobilityTrace& trace,
                                     std::uint64_t seed, int n_packets);

// ---------------------------------------------------------------------------
// Deterministic random streams
// ---------------------------------------------------------------------------

namespace rng {

/// SplitMix64 step; the workhorse behind all per-packet substreams.
std::uint64_t mix(std::uint64_t x);

/// Uniform draw in (0, 1), never exactly 0.
double uniform01(std::uint64_t x);

/// Standard normal via Box-Muller on two counter-derived uniforms.
double gaussian(std::uint64_t stream, std::uint64_t counter);

}  // namespace rng

}  // namespace sfplan

#pragma once

// Two-phase static spreading-factor selection: rule-based exclusion of
// candidates that violate hard constraints, followed by weighted scoring
// of the survivors.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfplan/types.hpp"

namespace sfplan {

// ---------------------------------------------------------------------------
// Scenario description
// ---------------------------------------------------------------------------

enum class MobilityClass { Static, Low, Moderate, High };

/// Speed thresholds: static < 0.5, low < 5, moderate < 10, high >= 10 m/s.
MobilityClass mobility_class_from_speed(double speed_mps);
std::string to_string(MobilityClass mc);

/// One planning case: where the gateway operates, how fast it moves, and
/// what traffic it must carry. `distance_m` is the representative planning
/// distance — the maximum distance of the mobility trace.
struct ScenarioSpec {
    std::string scenario_id;
    double distance_m = 100.0;
    double speed_mps = 0.0;
    int payload_bytes = 20;
    double packets_per_hour = 60.0;
    std::optional<double> required_throughput_bps;
    EnvironmentModel environment;
    RegionProfile region;

    MobilityClass mobility_class() const { return mobility_class_from_speed(speed_mps); }

    void validate() const {
        if (distance_m <= 0) throw InvalidConfigError("distance_m must be > 0");
        if (speed_mps < 0) throw InvalidConfigError("speed_mps must be >= 0");
        if (packets_per_hour < 1) throw InvalidConfigError("packets_per_hour must be >= 1");
        if (payload_bytes < 1 || payload_bytes > 255)
            throw InvalidConfigError("payload_bytes must be in 1..255");
        if (required_throughput_bps && *required_throughput_bps <= 0)
            throw InvalidConfigError("required_throughput_bps must be > 0 when set");
        environment.validate();
        region.validate();
    }
};

// ---------------------------------------------------------------------------
// Phase 1: exclusion
// ---------------------------------------------------------------------------

enum class ExclusionReason { Distance, LinkMargin, DutyCycle, DataRate, Doppler };
std::string to_string(ExclusionReason reason);

/// Per-SF metrics plus the exclusion verdict. `excluded` is true exactly
/// when `reasons` is non-empty.
struct SFEvaluation {
    SpreadingFactor sf;
    double toa_s = 0.0;
    double data_rate_bps = 0.0;
    double energy_j_per_hour = 0.0;
    double link_margin_db = 0.0;
    double hourly_airtime_s = 0.0;
    bool excluded = false;
    std::vector<ExclusionReason> reasons;

    bool has_reason(ExclusionReason r) const;
};

/// Planner knobs that are policy rather than scenario data.
struct SelectorOptions {
    /// Required link margin at the planning distance. The 2 dB default is
    /// the shipped calibration (see config docs).
    double fade_margin_db = 2.0;
    /// When no candidate survives, retry with the data-rate rule disabled
    /// and pick the maximum-margin survivor.
    bool relaxed = false;
};

/// Applies all five exclusion rules to every candidate SF7..SF12:
///   1. distance beyond the SF's zero-margin reliable range
///   2. link margin below the required fade margin
///   3. hourly airtime above the regional duty-cycle budget
///   4. effective data rate below the required throughput (when set)
///   5. Doppler shift beyond the SF's frequency tolerance
/// Exclusion is data, not failure: always returns six evaluations.
std::vector<SFEvaluation> evaluate_candidates(const ScenarioSpec& scenario,
                                              const RadioConfig& config,
                                              const SelectorOptions& options = {});

// ---------------------------------------------------------------------------
// Phase 2: scoring
// ---------------------------------------------------------------------------

/// Non-negative factor weights, normalized to sum 1 via normalized().
struct ScoreWeights {
    double toa = 0.3;
    double energy = 0.3;
    double data_rate = 0.2;
    double link_margin = 0.2;

    ScoreWeights normalized() const;
};

struct FactorScores {
    double toa = 0.0;
    double energy = 0.0;
    double data_rate = 0.0;
    double link_margin = 0.0;
    double total = 0.0;
};

/// Raised when every candidate is excluded; the message breaks the failure
/// down per rule.
struct NoFeasibleSfError : Error {
    NoFeasibleSfError(std::string message, std::map<ExclusionReason, int> rule_failures)
        : Error(std::move(message)), rule_failures(std::move(rule_failures)) {}
    std::map<ExclusionReason, int> rule_failures;
};

/// Min-max normalizes each factor across the non-excluded candidates
/// (time-on-air and energy inverted so that lower is better) and combines
/// them with the given weights. A factor that is constant across the
/// survivors contributes its full weight to each of them, so a single
/// survivor scores exactly 1.
std::map<int, FactorScores> phase2_score(const std::vector<SFEvaluation>& evaluations,
                                         const ScoreWeights& weights);

// ---------------------------------------------------------------------------
// Combined selection
// ---------------------------------------------------------------------------

struct SelectionResult {
    SpreadingFactor chosen;
    std::map<int, FactorScores> scores;  // keyed by SF value, survivors only
    std::vector<SFEvaluation> evaluations;
    std::vector<std::string> decision_trace;
};

/// Phase 1 then phase 2; the highest-scoring survivor wins, ties break to
/// the lowest SF. Throws NoFeasibleSfError when nothing survives (unless
/// options.relaxed recovers a candidate).
SelectionResult select_sf(const ScenarioSpec& scenario, const RadioConfig& config,
                          const ScoreWeights& weights, const SelectorOptions& options = {});

}  // namespace sfplan

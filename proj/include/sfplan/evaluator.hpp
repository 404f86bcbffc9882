#pragma once

// Validation pipeline: algorithm prediction vs brute-force best SF per
// scenario, accuracy aggregation, confusion matrix, and the static-vs-
// dynamic protocol comparison.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfplan/linksim.hpp"
#include "sfplan/scenarios.hpp"

namespace sfplan {

// ---------------------------------------------------------------------------
// Confusion matrix
// ---------------------------------------------------------------------------

/// 6x6 counts, rows = predicted SF, columns = actual best SF.
struct ConfusionMatrix {
    std::array<std::array<std::int64_t, kSfCount>, kSfCount> counts{};

    void add(SpreadingFactor predicted, SpreadingFactor actual) {
        counts[predicted.index()][actual.index()]++;
    }
    std::int64_t total() const;
    std::int64_t diagonal() const;
    std::int64_t within_one() const;
    double exact_match_rate() const;
    double within_one_sf_rate() const;
};

/// Builds the matrix from (predicted, actual) SF value pairs; values must
/// be in 7..12.
ConfusionMatrix confusion_matrix(const std::vector<std::pair<int, int>>& pairs);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ScenarioRecord {
    std::string scenario_id;
    int predicted_sf = 0;
    int actual_sf = 0;  // best-by-simulation, tie resolved toward the prediction
    double pdr_at_predicted = 0.0;
    double pdr_at_actual = 0.0;
};

struct InfeasibleRecord {
    std::string scenario_id;
    std::string message;
};

struct ValidationReport {
    std::size_t total_scenarios = 0;
    double exact_match_rate = 0.0;
    double within_one_sf_rate = 0.0;
    ConfusionMatrix confusion;
    std::vector<ScenarioRecord> rows;         // ordered by scenario_id
    std::vector<InfeasibleRecord> infeasible;  // reported, never dropped
};

struct ValidateParams {
    ScoreWeights weights;
    SelectorOptions selector;
    int n_packets = 1000;
    std::uint64_t seed = 1;
    int jobs = 1;
    /// PDRs within this many percentage points of the maximum count as
    /// tied; the prediction matches if it hits any tied SF.
    double tie_pp = 0.5;
};

/// For each scenario: predicted = select_sf(...), actual = brute-force best
/// by simulation. Infeasible scenarios are tallied separately and excluded
/// from the rates. Output order follows the input order regardless of the
/// worker count.
ValidationReport validate(const std::vector<ScenarioSpec>& specs, const RadioConfig& config,
                          const ValidateParams& params);

// ---------------------------------------------------------------------------
// Static vs dynamic comparison
// ---------------------------------------------------------------------------

struct CompareRow {
    std::string scenario_id;
    MobilityClass mobility = MobilityClass::Static;
    int static_sf = 0;
    double pdr_static = 0.0;
    double pdr_dynamic = 0.0;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    std::map<MobilityClass, double> mean_static;
    std::map<MobilityClass, double> mean_dynamic;
    std::string notice;  // set when the mobile subset is empty
};

/// Simulates each mobile scenario twice: once at the statically selected
/// SF, once under the dynamic baseline, and aggregates means per mobility
/// class.
CompareReport compare_static_vs_dynamic(const std::vector<ScenarioSpec>& specs,
                                        const RadioConfig& config, const ScoreWeights& weights,
                                        const SelectorOptions& selector,
                                        const DynamicProtocolConfig& dyn, std::uint64_t seed,
                                        int n_packets);

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

void write_report_csv(const ValidationReport& report, const std::string& path);
void write_confusion_csv(const ConfusionMatrix& confusion, const std::string& path);
void write_summary(const ValidationReport& report, const std::string& path);
void write_compare_csv(const CompareReport& report, const std::string& path);

/// Self-contained vector figures; no external renderer involved.
std::string confusion_svg(const ConfusionMatrix& confusion);
std::string compare_svg(const CompareReport& report);

}  // namespace sfplan

#include "sfplan/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

namespace sfplan {

// ---------------------------------------------------------------------------
// Confusion matrix
// ---------------------------------------------------------------------------

std::int64_t ConfusionMatrix::total() const {
    std::int64_t n = 0;
    for (const auto& row : counts)
        for (std::int64_t c : row) n += c;
    return n;
}

std::int64_t ConfusionMatrix::diagonal() const {
    std::int64_t n = 0;
    for (int i = 0; i < kSfCount; ++i) n += counts[i][i];
    return n;
}

std::int64_t ConfusionMatrix::within_one() const {
    std::int64_t n = 0;
    for (int p = 0; p < kSfCount; ++p)
        for (int a = 0; a < kSfCount; ++a)
            if (std::abs(p - a) <= 1) n += counts[p][a];
    return n;
}

double ConfusionMatrix::exact_match_rate() const {
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(diagonal()) / static_cast<double>(n);
}

double ConfusionMatrix::within_one_sf_rate() const {
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(within_one()) / static_cast<double>(n);
}

ConfusionMatrix confusion_matrix(const std::vector<std::pair<int, int>>& pairs) {
    ConfusionMatrix matrix;
    for (const auto& [predicted, actual] : pairs) {
        if (predicted < kMinSf || predicted > kMaxSf || actual < kMinSf || actual > kMaxSf)
            throw InvalidConfigError("confusion pair outside SF7..SF12");
        matrix.add(SpreadingFactor{predicted}, SpreadingFactor{actual});
    }
    return matrix;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

struct ScenarioVerdict {
    bool infeasible = false;
    std::string message;
    ScenarioRecord record;
};

ScenarioVerdict evaluate_scenario(const ScenarioSpec& spec, const RadioConfig& config,
                                  const ValidateParams& params) {
    ScenarioVerdict verdict;
    verdict.record.scenario_id = spec.scenario_id;

    SelectionResult selection;
    try {
        selection = select_sf(spec, config, params.weights, params.selector);
    } catch (const NoFeasibleSfError& e) {
        verdict.infeasible = true;
        verdict.message = e.what();
        return verdict;
    }

    const double horizon = scenario_horizon_s(spec, params.n_packets);
    const MobilityTrace trace = trace_for_scenario(spec, horizon);
    // Per-scenario substream: scenario ids are stable, so the whole report
    // is reproducible regardless of evaluation order.
    std::uint64_t scenario_seed = params.seed;
    for (char c : spec.scenario_id)
        scenario_seed = rng::mix(scenario_seed ^ static_cast<std::uint64_t>(c));

    const BruteForceResult brute =
        brute_force_best_sf(spec, config, trace, scenario_seed, params.n_packets);

    const double best_pdr = brute.outcomes[brute.best.index()].pdr;
    const double tie_cut = best_pdr - params.tie_pp / 100.0;

    // Best-by-simulation with ties resolved toward the prediction: if the
    // predicted SF performs within tie_pp of the maximum it counts as the
    // actual best, otherwise the lowest tied SF does.
    SpreadingFactor actual = brute.best;
    for (const auto& outcome : brute.outcomes) {
        if (outcome.pdr >= tie_cut) {
            actual = outcome.sf;  // lowest SF inside the tie band
            break;
        }
    }
    const double predicted_pdr = brute.outcomes[selection.chosen.index()].pdr;
    if (predicted_pdr >= tie_cut) actual = selection.chosen;

    verdict.record.predicted_sf = selection.chosen.value;
    verdict.record.actual_sf = actual.value;
    verdict.record.pdr_at_predicted = predicted_pdr;
    verdict.record.pdr_at_actual = brute.outcomes[actual.index()].pdr;
    return verdict;
}

}  // namespace

ValidationReport validate(const std::vector<ScenarioSpec>& specs, const RadioConfig& config,
                          const ValidateParams& params) {
    if (specs.empty()) throw InvalidConfigError("validate needs at least one scenario");

    std::vector<ScenarioVerdict> verdicts(specs.size());
    const int jobs = std::max(1, params.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < specs.size(); ++i)
            verdicts[i] = evaluate_scenario(specs[i], config, params);
    } else {
        std::vector<std::future<void>> workers;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < jobs; ++w) {
            workers.push_back(std::async(std::launch::async, [&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= specs.size()) return;
                    verdicts[i] = evaluate_scenario(specs[i], config, params);
                }
            }));
        }
        for (auto& worker : workers) worker.get();
    }

    ValidationReport report;
    report.total_scenarios = specs.size();
    for (auto& verdict : verdicts) {
        if (verdict.infeasible) {
            report.infeasible.push_back({verdict.record.scenario_id, verdict.message});
            continue;
        }
        report.confusion.add(SpreadingFactor{verdict.record.predicted_sf},
                             SpreadingFactor{verdict.record.actual_sf});
        report.rows.push_back(std::move(verdict.record));
    }
    // Output order is by scenario id, whatever the input or completion order.
    std::sort(report.rows.begin(), report.rows.end(),
              [](const ScenarioRecord& a, const ScenarioRecord& b) {
                  return a.scenario_id < b.scenario_id;
              });
    std::sort(report.infeasible.begin(), report.infeasible.end(),
              [](const InfeasibleRecord& a, const InfeasibleRecord& b) {
                  return a.scenario_id < b.scenario_id;
              });
    report.exact_match_rate = report.confusion.exact_match_rate();
    report.within_one_sf_rate = report.confusion.within_one_sf_rate();
    return report;
}

// ---------------------------------------------------------------------------
// Static vs dynamic
// ---------------------------------------------------------------------------

CompareReport compare_static_vs_dynamic(const std::vector<ScenarioSpec>& specs,
                                        const RadioConfig& config, const ScoreWeights& weights,
                                        const SelectorOptions& selector,
                                        const DynamicProtocolConfig& dyn, std::uint64_t seed,
                                        int n_packets) {
    CompareReport report;
    std::map<MobilityClass, std::pair<double, int>> static_acc, dynamic_acc;

    for (const auto& spec : specs) {
        if (spec.mobility_class() == MobilityClass::Static) continue;

        SelectionResult selection;
        try {
            selection = select_sf(spec, config, weights, selector);
        } catch (const NoFeasibleSfError&) {
            continue;
        }

        const double horizon = scenario_horizon_s(spec, n_packets);
        const MobilityTrace trace = trace_for_scenario(spec, horizon);
        std::uint64_t scenario_seed = seed;
        for (char c : spec.scenario_id)
            scenario_seed = rng::mix(scenario_seed ^ static_cast<std::uint64_t>(c));

        CompareRow row;
        row.scenario_id = spec.scenario_id;
        row.mobility = spec.mobility_class();
        row.static_sf = selection.chosen.value;
        row.pdr_static =
            simulate_link(spec, selection.chosen, config, trace, scenario_seed, n_packets).pdr;
        row.pdr_dynamic =
            simulate_dynamic_protocol(spec, config, dyn, trace, scenario_seed, n_packets).pdr;

        static_acc[row.mobility].first += row.pdr_static;
        static_acc[row.mobility].second++;
        dynamic_acc[row.mobility].first += row.pdr_dynamic;
        dynamic_acc[row.mobility].second++;
        report.rows.push_back(std::move(row));
    }

    if (report.rows.empty()) {
        report.notice = "no mobile scenarios (speed > 0) in the input set";
        return report;
    }
    for (const auto& [mc, acc] : static_acc) report.mean_static[mc] = acc.first / acc.second;
    for (const auto& [mc, acc] : dynamic_acc) report.mean_dynamic[mc] = acc.first / acc.second;
    return report;
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

void write_report_csv(const ValidationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "scenario_id,predicted_sf,actual_sf,pdr_at_predicted,pdr_at_actual\n";
    for (const auto& row : report.rows)
        out << row.scenario_id << ',' << row.predicted_sf << ',' << row.actual_sf << ','
            << fmt(row.pdr_at_predicted) << ',' << fmt(row.pdr_at_actual) << "\n";
    // Infeasible scenarios stay visible in the canonical output.
    for (const auto& inf : report.infeasible)
        out << inf.scenario_id << ",none,none,," << "\n";
}

void write_confusion_csv(const ConfusionMatrix& confusion, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "predicted\\actual,SF7,SF8,SF9,SF10,SF11,SF12\n";
    for (int p = 0; p < kSfCount; ++p) {
        out << "SF" << (p + kMinSf);
        for (int a = 0; a < kSfCount; ++a) out << ',' << confusion.counts[p][a];
        out << "\n";
    }
}

void write_summary(const ValidationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "total_scenarios " << report.total_scenarios << "\n";
    out << "rated_scenarios " << report.confusion.total() << "\n";
    out << "infeasible " << report.infeasible.size() << "\n";
    out << "exact=" << fmt(report.exact_match_rate)
        << " within1=" << fmt(report.within_one_sf_rate) << "\n";
    for (const auto& inf : report.infeasible)
        out << "infeasible " << inf.scenario_id << ": " << inf.message << "\n";
}

void write_compare_csv(const CompareReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "scenario_id,mobility_class,static_sf,pdr_static,pdr_dynamic\n";
    for (const auto& row : report.rows)
        out << row.scenario_id << ',' << to_string(row.mobility) << ',' << row.static_sf << ','
            << fmt(row.pdr_static) << ',' << fmt(row.pdr_dynamic) << "\n";
    if (!report.notice.empty()) out << "# " << report.notice << "\n";
}

// ---------------------------------------------------------------------------
// SVG figures
// ---------------------------------------------------------------------------

std::string confusion_svg(const ConfusionMatrix& confusion) {
    constexpr int cell = 56;
    constexpr int margin = 70;
    const int size = margin + kSfCount * cell + 20;

    std::int64_t max_count = 1;
    for (const auto& row : confusion.counts)
        for (std::int64_t c : row) max_count = std::max(max_count, c);

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << size << "' height='" << size
        << "' font-family='sans-serif' font-size='12'>\n";
    svg << "<text x='" << margin + kSfCount * cell / 2
        << "' y='18' text-anchor='middle'>Predicted vs actual best SF</text>\n";
    for (int p = 0; p < kSfCount; ++p) {
        svg << "<text x='" << margin - 8 << "' y='" << margin + p * cell + cell / 2 + 4
            << "' text-anchor='end'>SF" << (p + kMinSf) << "</text>\n";
        svg << "<text x='" << margin + p * cell + cell / 2 << "' y='" << margin - 8
            << "' text-anchor='middle'>SF" << (p + kMinSf) << "</text>\n";
        for (int a = 0; a < kSfCount; ++a) {
            const double shade = static_cast<double>(confusion.counts[p][a]) / max_count;
            const int green = 255 - static_cast<int>(185 * shade);
            svg << "<rect x='" << margin + a * cell << "' y='" << margin + p * cell << "' width='"
                << cell << "' height='" << cell << "' fill='rgb(" << (255 - green / 4) << ','
                << green << ",120)' stroke='white'/>\n";
            svg << "<text x='" << margin + a * cell + cell / 2 << "' y='"
                << margin + p * cell + cell / 2 + 4 << "' text-anchor='middle'>"
                << confusion.counts[p][a] << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string compare_svg(const CompareReport& report) {
    constexpr int bar = 44;
    constexpr int group = 130;
    constexpr int height = 260;
    constexpr int base = 210;
    const int width = 80 + group * static_cast<int>(report.mean_static.size());

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' font-family='sans-serif' font-size='12'>\n";
    svg << "<text x='" << width / 2
        << "' y='18' text-anchor='middle'>Mean PDR: static selection vs dynamic protocol"
        << "</text>\n";
    int x = 60;
    for (const auto& [mc, mean_s] : report.mean_static) {
        const double mean_d = report.mean_dynamic.at(mc);
        const int hs = static_cast<int>(mean_s * 160);
        const int hd = static_cast<int>(mean_d * 160);
        svg << "<rect x='" << x << "' y='" << base - hs << "' width='" << bar << "' height='" << hs
            << "' fill='rgb(70,130,180)'/>\n";
        svg << "<rect x='" << x + bar + 6 << "' y='" << base - hd << "' width='" << bar
            << "' height='" << hd << "' fill='rgb(205,133,63)'/>\n";
        svg << "<text x='" << x + bar << "' y='" << base + 16 << "' text-anchor='middle'>"
            << to_string(mc) << "</text>\n";
        svg << "<text x='" << x + bar / 2 << "' y='" << base - hs - 4
            << "' text-anchor='middle'>" << fmt(mean_s) << "</text>\n";
        svg << "<text x='" << x + bar + 6 + bar / 2 << "' y='" << base - hd - 4
            << "' text-anchor='middle'>" << fmt(mean_d) << "</text>\n";
        x += group;
    }
    svg << "<text x='60' y='" << base + 36 << "'>blue = static selection, orange = dynamic"
        << " baseline</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace sfplan

#include "sfplan/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sfplan/phy.hpp"

namespace sfplan {

MobilityClass mobility_class_from_speed(double speed_mps) {
    if (speed_mps < 0.5) return MobilityClass::Static;
    if (speed_mps < 5.0) return MobilityClass::Low;
    if (speed_mps < 10.0) return MobilityClass::Moderate;
    return MobilityClass::High;
}

std::string to_string(MobilityClass mc) {
    switch (mc) {
        case MobilityClass::Static: return "static";
        case MobilityClass::Low: return "low";
        case MobilityClass::Moderate: return "moderate";
        case MobilityClass::High: return "high";
    }
    return "?";
}

std::string to_string(ExclusionReason reason) {
    switch (reason) {
        case ExclusionReason::Distance: return "distance";
        case ExclusionReason::LinkMargin: return "link-margin";
        case ExclusionReason::DutyCycle: return "duty-cycle";
        case ExclusionReason::DataRate: return "data-rate";
        case ExclusionReason::Doppler: return "doppler";
    }
    return "?";
}

bool SFEvaluation::has_reason(ExclusionReason r) const {
    return std::find(reasons.begin(), reasons.end(), r) != reasons.end();
}

ScoreWeights ScoreWeights::normalized() const {
    if (toa < 0 || energy < 0 || data_rate < 0 || link_margin < 0)
        throw InvalidConfigError("score weights must be non-negative");
    const double sum = toa + energy + data_rate + link_margin;
    if (sum <= 0) throw InvalidConfigError("score weights must not all be zero");
    return {toa / sum, energy / sum, data_rate / sum, link_margin / sum};
}

std::vector<SFEvaluation> evaluate_candidates(const ScenarioSpec& scenario,
                                              const RadioConfig& config,
                                              const SelectorOptions& options) {
    scenario.validate();
    validate_radio_in_region(config, scenario.region);

    std::vector<SFEvaluation> evaluations;
    evaluations.reserve(kSfCount);

    for (SpreadingFactor sf : all_spreading_factors()) {
        SFEvaluation ev;
        ev.sf = sf;
        ev.toa_s = time_on_air_s(sf, config, scenario.payload_bytes);
        ev.data_rate_bps = effective_data_rate_bps(sf, config, scenario.payload_bytes);
        ev.energy_j_per_hour =
            energy_per_hour_j(sf, config, scenario.payload_bytes, scenario.packets_per_hour).joules;
        ev.link_margin_db =
            link_budget(sf, config, scenario.distance_m, scenario.environment).link_margin_db;
        ev.hourly_airtime_s = ev.toa_s * scenario.packets_per_hour;

        // Rule 1: beyond the zero-margin reliable range the link cannot
        // close at all, not even without fading headroom.
        if (scenario.distance_m >
            max_reliable_range_m(sf, config, scenario.environment, 0.0))
            ev.reasons.push_back(ExclusionReason::Distance);

        // Rule 2: fade margin requirement at the planning distance.
        if (ev.link_margin_db < options.fade_margin_db)
            ev.reasons.push_back(ExclusionReason::LinkMargin);

        // Rule 3: hourly airtime against the regional duty-cycle budget.
        if (ev.hourly_airtime_s > scenario.region.airtime_budget_per_hour_s())
            ev.reasons.push_back(ExclusionReason::DutyCycle);

        // Rule 4: application throughput requirement, when stated.
        if (scenario.required_throughput_bps &&
            ev.data_rate_bps < *scenario.required_throughput_bps)
            ev.reasons.push_back(ExclusionReason::DataRate);

        // Rule 5: Doppler tolerance at the gateway's peak speed.
        if (doppler_excluded(sf, config, scenario.speed_mps))
            ev.reasons.push_back(ExclusionReason::Doppler);

        ev.excluded = !ev.reasons.empty();
        evaluations.push_back(std::move(ev));
    }
    return evaluations;
}

namespace {

struct FactorRange {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void include(double v) {
        min = std::min(min, v);
        max = std::max(max, v);
    }

    // 0/0 convention: a constant factor scores 1 for every candidate.
    double score_higher_better(double v) const {
        if (max == min) return 1.0;
        return (v - min) / (max - min);
    }
    double score_lower_better(double v) const {
        if (max == min) return 1.0;
        return (max - v) / (max - min);
    }
};

std::map<ExclusionReason, int> count_rule_failures(const std::vector<SFEvaluation>& evaluations) {
    std::map<ExclusionReason, int> counts;
    for (const auto& ev : evaluations)
        for (ExclusionReason r : ev.reasons) counts[r]++;
    return counts;
}

}  // namespace

std::map<int, FactorScores> phase2_score(const std::vector<SFEvaluation>& evaluations,
                                         const ScoreWeights& weights) {
    const ScoreWeights w = weights.normalized();

    FactorRange toa, energy, rate, margin;
    int survivors = 0;
    for (const auto& ev : evaluations) {
        if (ev.excluded) continue;
        survivors++;
        toa.include(ev.toa_s);
        energy.include(ev.energy_j_per_hour);
        rate.include(ev.data_rate_bps);
        margin.include(ev.link_margin_db);
    }
    if (survivors == 0) {
        auto counts = count_rule_failures(evaluations);
        std::ostringstream msg;
        msg << "no feasible spreading factor; exclusions:";
        for (const auto& [reason, n] : counts) msg << " " << to_string(reason) << "=" << n;
        throw NoFeasibleSfError(msg.str(), std::move(counts));
    }

    std::map<int, FactorScores> scores;
    for (const auto& ev : evaluations) {
        if (ev.excluded) continue;
        FactorScores s;
        s.toa = toa.score_lower_better(ev.toa_s);
        s.energy = energy.score_lower_better(ev.energy_j_per_hour);
        s.data_rate = rate.score_higher_better(ev.data_rate_bps);
        s.link_margin = margin.score_higher_better(ev.link_margin_db);
        s.total = w.toa * s.toa + w.energy * s.energy + w.data_rate * s.data_rate +
                  w.link_margin * s.link_margin;
        scores[ev.sf.value] = s;
    }
    return scores;
}

SelectionResult select_sf(const ScenarioSpec& scenario, const RadioConfig& config,
                          const ScoreWeights& weights, const SelectorOptions& options) {
    SelectionResult result;
    result.evaluations = evaluate_candidates(scenario, config, options);

    for (const auto& ev : result.evaluations) {
        if (!ev.excluded) continue;
        std::ostringstream line;
        line << to_string(ev.sf) << " excluded:";
        for (ExclusionReason r : ev.reasons) line << " " << to_string(r);
        result.decision_trace.push_back(line.str());
    }

    try {
        result.scores = phase2_score(result.evaluations, weights);
    } catch (const NoFeasibleSfError&) {
        if (!options.relaxed) throw;
        // Relaxed fallback: drop the data-rate rule and pick the candidate
        // with the highest link margin among those that still survive.
        auto relaxed_evals = result.evaluations;
        for (auto& ev : relaxed_evals) {
            std::erase(ev.reasons, ExclusionReason::DataRate);
            ev.excluded = !ev.reasons.empty();
        }
        const SFEvaluation* best = nullptr;
        for (const auto& ev : relaxed_evals)
            if (!ev.excluded && (!best || ev.link_margin_db > best->link_margin_db)) best = &ev;
        if (!best) throw;
        result.decision_trace.push_back(
            "relaxed mode: data-rate rule waived, selecting maximum link margin");
        result.chosen = best->sf;
        result.decision_trace.push_back(to_string(best->sf) + " chosen (relaxed, margin " +
                                        std::to_string(best->link_margin_db) + " dB)");
        return result;
    }

    bool have_choice = false;
    SpreadingFactor chosen{};
    double best_total = -1.0;
    for (const auto& [sf_value, s] : result.scores) {  // ascending SF: ties keep the lowest
        std::ostringstream line;
        line << "SF" << sf_value << " scored " << s.total << " (toa " << s.toa << ", energy "
             << s.energy << ", rate " << s.data_rate << ", margin " << s.link_margin << ")";
        result.decision_trace.push_back(line.str());
        if (s.total > best_total) {
            best_total = s.total;
            chosen = SpreadingFactor{sf_value};
            have_choice = true;
        }
    }
    (void)have_choice;  // survivors >= 1 guaranteed by phase2_score

    result.chosen = chosen;
    result.decision_trace.push_back(to_string(chosen) + " chosen with score " +
                                    std::to_string(best_total));
    return result;
}

}  // namespace sfplan

// sfplan command-line tool: static spreading-factor planning, link
// simulation and validation runs for single-channel LoRa gateways.
//
// Subcommands: select, simulate, generate, validate, compare, report.
// All runs are reproducible: a fixed config and seed produce identical
// output files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfplan/config.hpp"
#include "sfplan/evaluator.hpp"
#include "sfplan/linksim.hpp"
#include "sfplan/phy.hpp"
#include "sfplan/scenarios.hpp"
#include "sfplan/selector.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct GlobalArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
};

sfplan::AppConfig load_config(const GlobalArgs& args) {
    if (args.config_path.empty()) return sfplan::AppConfig{};
    return sfplan::load_app_config(args.config_path);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw sfplan::Error("cannot write " + path);
    out << content;
}

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// ---------------------------------------------------------------------------
// select
// ---------------------------------------------------------------------------

struct SelectArgs {
    std::optional<double> distance;
    std::optional<double> speed;
    std::optional<int> payload;
    std::optional<double> rate;
    std::optional<double> throughput;
    std::string scenario_file;
    std::string json_out;
    bool relaxed = false;
};

ordered_json selection_to_json(const sfplan::SelectionResult& result) {
    ordered_json j;
    j["chosen"] = result.chosen.value;
    ordered_json scores = ordered_json::object();
    for (const auto& [sf, s] : result.scores) {
        scores["SF" + std::to_string(sf)] = {{"total", s.total},
                                             {"toa", s.toa},
                                             {"energy", s.energy},
                                             {"data_rate", s.data_rate},
                                             {"link_margin", s.link_margin}};
    }
    j["scores"] = scores;
    ordered_json evals = ordered_json::array();
    for (const auto& ev : result.evaluations) {
        ordered_json e;
        e["sf"] = ev.sf.value;
        e["toa_s"] = ev.toa_s;
        e["data_rate_bps"] = ev.data_rate_bps;
        e["energy_j_per_hour"] = ev.energy_j_per_hour;
        e["link_margin_db"] = ev.link_margin_db;
        e["hourly_airtime_s"] = ev.hourly_airtime_s;
        e["excluded"] = ev.excluded;
        ordered_json reasons = ordered_json::array();
        for (auto r : ev.reasons) reasons.push_back(sfplan::to_string(r));
        e["exclusion_reasons"] = reasons;
        evals.push_back(e);
    }
    j["evaluations"] = evals;
    j["decision_trace"] = result.decision_trace;
    return j;
}

void print_selection(const sfplan::SelectionResult& result) {
    std::printf("%-5s %12s %12s %12s %10s %10s  %s\n", "SF", "ToA[ms]", "rate[bps]", "E[J/h]",
                "margin[dB]", "air[s/h]", "status");
    for (const auto& ev : result.evaluations) {
        std::string status;
        if (ev.excluded) {
            status = "excluded:";
            for (auto r : ev.reasons) status += " " + sfplan::to_string(r);
        } else {
            status = "score " + fmt(result.scores.at(ev.sf.value).total, "%.4f");
        }
        std::printf("SF%-3d %12.3f %12.1f %12.4f %10.2f %10.2f  %s\n", ev.sf.value,
                    ev.toa_s * 1000.0, ev.data_rate_bps, ev.energy_j_per_hour, ev.link_margin_db,
                    ev.hourly_airtime_s, status.c_str());
    }
    std::printf("\ndecision trace:\n");
    for (const auto& line : result.decision_trace) std::printf("  %s\n", line.c_str());
    std::printf("\nchosen: SF%d\n", result.chosen.value);
}

int run_select(const GlobalArgs& global, const SelectArgs& args) {
    if (args.scenario_file.empty() && !args.distance) {
        std::fprintf(stderr, "error: select needs --distance or --scenario-file\n");
        return 2;
    }
    const sfplan::AppConfig config = load_config(global);

    sfplan::ScenarioSpec scenario;
    if (!args.scenario_file.empty()) {
        scenario = sfplan::load_scenario_kv(args.scenario_file);
    } else {
        scenario.scenario_id = "inline";
        scenario.environment = config.environment;
        scenario.region = config.region;
    }
    if (args.distance) scenario.distance_m = *args.distance;
    if (args.speed) scenario.speed_mps = *args.speed;
    if (args.payload) scenario.payload_bytes = *args.payload;
    if (args.rate) scenario.packets_per_hour = *args.rate;
    if (args.throughput) scenario.required_throughput_bps = *args.throughput;
    if (args.scenario_file.empty()) {
        scenario.environment = config.environment;
        scenario.region = config.region;
    }

    sfplan::SelectorOptions options = config.selector;
    options.relaxed = options.relaxed || args.relaxed;

    try {
        const sfplan::SelectionResult result =
            sfplan::select_sf(scenario, config.radio, config.weights, options);
        print_selection(result);
        if (!args.json_out.empty()) write_text(args.json_out, selection_to_json(result).dump(2) + "\n");
        return 0;
    } catch (const sfplan::NoFeasibleSfError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::optional<double> distance;
    std::optional<double> speed;
    std::optional<int> payload;
    std::optional<double> rate;
    std::string scenario_file;
    std::string sf_choice = "all";
    std::optional<int> packets;
    std::string csv_out;
};

int run_simulate(const GlobalArgs& global, const SimulateArgs& args) {
    const sfplan::AppConfig config = load_config(global);
    const std::uint64_t seed = sfplan::resolve_seed(config, global.seed);

    sfplan::ScenarioSpec scenario;
    if (!args.scenario_file.empty()) scenario = sfplan::load_scenario_kv(args.scenario_file);
    else {
        scenario.scenario_id = "inline";
        scenario.environment = config.environment;
        scenario.region = config.region;
    }
    if (args.distance) scenario.distance_m = *args.distance;
    if (args.speed) scenario.speed_mps = *args.speed;
    if (args.payload) scenario.payload_bytes = *args.payload;
    if (args.rate) scenario.packets_per_hour = *args.rate;
    if (config.simulator.shadowing_sigma_override_db)
        scenario.environment.shadowing_sigma_db = *config.simulator.shadowing_sigma_override_db;

    const int n_packets = args.packets.value_or(config.simulator.n_packets);
    const double horizon = sfplan::scenario_horizon_s(scenario, n_packets);
    const sfplan::MobilityTrace trace = sfplan::trace_for_scenario(scenario, horizon);

    std::vector<sfplan::SimOutcome> outcomes;
    if (args.sf_choice == "all") {
        outcomes = sfplan::brute_force_best_sf(scenario, config.radio, trace, seed, n_packets)
                       .outcomes;
    } else {
        const int sf_value = std::stoi(args.sf_choice);
        outcomes.push_back(sfplan::simulate_link(scenario, sfplan::sf_from_int(sf_value),
                                                 config.radio, trace, seed, n_packets));
    }

    std::printf("%-5s %8s %10s %8s %12s\n", "SF", "sent", "delivered", "pdr", "airtime[s]");
    std::string csv = "scenario_id,sf,sent,delivered,pdr,airtime_s,seed\n";
    for (const auto& o : outcomes) {
        std::printf("SF%-3d %8d %10d %8.4f %12.2f\n", o.sf.value, o.packets_sent,
                    o.packets_delivered, o.pdr, o.airtime_used_s);
        csv += scenario.scenario_id + "," + std::to_string(o.sf.value) + "," +
               std::to_string(o.packets_sent) + "," + std::to_string(o.packets_delivered) + "," +
               fmt(o.pdr) + "," + fmt(o.airtime_used_s, "%.3f") + "," + std::to_string(seed) +
               "\n";
    }
    if (!args.csv_out.empty()) write_text(args.csv_out, csv);
    return 0;
}

// ---------------------------------------------------------------------------
// generate / validate / compare / report
// ---------------------------------------------------------------------------

int run_generate(const GlobalArgs& global, bool default_grid_flag, const std::string& out_path) {
    sfplan::AppConfig config = load_config(global);
    const std::uint64_t seed = sfplan::resolve_seed(config, global.seed);
    const sfplan::ScenarioGrid grid = default_grid_flag ? sfplan::default_grid() : config.grid;
    const auto specs = sfplan::generate_grid(grid, seed);
    sfplan::save_scenarios(specs, out_path);
    std::printf("wrote %zu scenarios to %s\n", specs.size(), out_path.c_str());
    return 0;
}

int run_validate(const GlobalArgs& global, const std::string& scenarios_path,
                 const std::string& out_dir, int jobs) {
    const sfplan::AppConfig config = load_config(global);
    const auto specs = sfplan::load_scenarios(scenarios_path);

    sfplan::ValidateParams params;
    params.weights = config.weights;
    params.selector = config.selector;
    params.n_packets = config.simulator.n_packets;
    params.seed = sfplan::resolve_seed(config, global.seed);
    params.jobs = jobs;

    const sfplan::ValidationReport report = sfplan::validate(specs, config.radio, params);

    fs::create_directories(out_dir);
    sfplan::write_report_csv(report, out_dir + "/report.csv");
    sfplan::write_confusion_csv(report.confusion, out_dir + "/confusion.csv");
    sfplan::write_summary(report, out_dir + "/summary.txt");
    write_text(out_dir + "/confusion.svg", sfplan::confusion_svg(report.confusion));

    std::printf("scenarios=%zu rated=%lld infeasible=%zu\n", report.total_scenarios,
                static_cast<long long>(report.confusion.total()), report.infeasible.size());
    std::printf("exact=%.3f within1=%.3f\n", report.exact_match_rate, report.within_one_sf_rate);
    return 0;
}

int run_compare(const GlobalArgs& global, const std::string& scenarios_path,
                const std::string& out_dir) {
    const sfplan::AppConfig config = load_config(global);
    const auto specs = sfplan::load_scenarios(scenarios_path);
    const std::uint64_t seed = sfplan::resolve_seed(config, global.seed);

    const sfplan::CompareReport report = sfplan::compare_static_vs_dynamic(
        specs, config.radio, config.weights, config.selector, config.dynamic, seed,
        config.simulator.n_packets);

    fs::create_directories(out_dir);
    sfplan::write_compare_csv(report, out_dir + "/pdr_compare.csv");
    write_text(out_dir + "/pdr_compare.svg", sfplan::compare_svg(report));

    if (!report.notice.empty()) {
        std::printf("%s\n", report.notice.c_str());
        return 0;
    }
    std::printf("%-10s %12s %12s\n", "mobility", "static", "dynamic");
    for (const auto& [mc, mean_s] : report.mean_static)
        std::printf("%-10s %12.4f %12.4f\n", sfplan::to_string(mc).c_str(), mean_s,
                    report.mean_dynamic.at(mc));
    return 0;
}

int run_report(const std::string& report_csv, const std::string& out_dir) {
    // Rebuilds the summary and figure from an existing per-scenario report.
    std::ifstream in(report_csv);
    if (!in) throw sfplan::Error("cannot read " + report_csv);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::pair<int, int>> pairs;
    std::size_t infeasible = 0;
    std::size_t row_count = 0;
    while (std::getline(in, line)) {
        row_count++;
        std::istringstream stream(line);
        std::string id, predicted, actual;
        std::getline(stream, id, ',');
        std::getline(stream, predicted, ',');
        std::getline(stream, actual, ',');
        if (predicted == "none") {
            infeasible++;
            continue;
        }
        pairs.emplace_back(std::stoi(predicted), std::stoi(actual));
    }
    const sfplan::ConfusionMatrix confusion = sfplan::confusion_matrix(pairs);

    fs::create_directories(out_dir);
    sfplan::write_confusion_csv(confusion, out_dir + "/confusion.csv");
    write_text(out_dir + "/confusion.svg", sfplan::confusion_svg(confusion));

    std::printf("rows=%zu rated=%zu infeasible=%zu\n", row_count, pairs.size(), infeasible);
    std::printf("exact=%.3f within1=%.3f\n", confusion.exact_match_rate(),
                confusion.within_one_sf_rate());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Static spreading-factor planning for single-channel LoRa gateways"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs global;
    app.add_option("--config", global.config_path, "Configuration file (key-value or JSON)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Random seed (overrides SFPLAN_SEED)");

    SelectArgs select_args;
    auto* select = app.add_subcommand("select", "Pick the optimal fixed SF for one scenario");
    double sel_distance = 0, sel_speed = 0, sel_rate = 0, sel_throughput = 0;
    int sel_payload = 0;
    auto* sd = select->add_option("--distance", sel_distance, "Planning distance [m]");
    auto* ss = select->add_option("--speed", sel_speed, "Peak gateway speed [m/s]");
    auto* sp = select->add_option("--payload", sel_payload, "Payload size [bytes]");
    auto* sr = select->add_option("--rate", sel_rate, "Packets per hour");
    auto* st = select->add_option("--throughput", sel_throughput, "Required throughput [bps]");
    select->add_option("--scenario-file", select_args.scenario_file, "Scenario key-value file");
    select->add_option("--json", select_args.json_out, "Write the result as JSON");
    select->add_flag("--relaxed", select_args.relaxed,
                     "Fall back to max link margin when nothing is feasible");

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo PDR for one scenario");
    double sim_distance = 0, sim_speed = 0, sim_rate = 0;
    int sim_payload = 0, sim_packets = 0;
    auto* md = simulate->add_option("--distance", sim_distance, "Distance [m]");
    auto* ms = simulate->add_option("--speed", sim_speed, "Gateway speed [m/s]");
    auto* mp = simulate->add_option("--payload", sim_payload, "Payload size [bytes]");
    auto* mr = simulate->add_option("--rate", sim_rate, "Packets per hour");
    auto* mn = simulate->add_option("--packets", sim_packets, "Packets per run");
    simulate->add_option("--scenario-file", sim_args.scenario_file, "Scenario key-value file");
    simulate->add_option("--sf", sim_args.sf_choice, "Spreading factor 7..12 or 'all'");
    simulate->add_option("--csv", sim_args.csv_out, "Write outcomes as CSV");

    bool gen_default_grid = false;
    std::string gen_out = "scenarios.csv";
    auto* generate = app.add_subcommand("generate", "Write the validation scenario grid");
    generate->add_flag("--default-grid", gen_default_grid, "Use the built-in default grid");
    generate->add_option("--out", gen_out, "Output CSV path");

    std::string val_scenarios, val_out_dir = ".";
    int val_jobs = 1;
    auto* validate_cmd = app.add_subcommand("validate", "Prediction accuracy vs brute force");
    validate_cmd->add_option("--scenarios", val_scenarios, "Scenario CSV")->required();
    validate_cmd->add_option("--out-dir", val_out_dir, "Output directory");
    validate_cmd->add_option("--jobs", val_jobs, "Worker threads");

    std::string cmp_scenarios, cmp_out_dir = ".";
    auto* compare = app.add_subcommand("compare", "Static selection vs dynamic baseline");
    compare->add_option("--scenarios", cmp_scenarios, "Scenario CSV")->required();
    compare->add_option("--out-dir", cmp_out_dir, "Output directory");

    std::string rep_in, rep_out_dir = ".";
    auto* report = app.add_subcommand("report", "Re-derive summary and figures from report.csv");
    report->add_option("--in", rep_in, "Per-scenario report CSV")->required();
    report->add_option("--out-dir", rep_out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*seed_opt) global.seed = seed_value;
    if (*sd) select_args.distance = sel_distance;
    if (*ss) select_args.speed = sel_speed;
    if (*sp) select_args.payload = sel_payload;
    if (*sr) select_args.rate = sel_rate;
    if (*st) select_args.throughput = sel_throughput;
    if (*md) sim_args.distance = sim_distance;
    if (*ms) sim_args.speed = sim_speed;
    if (*mp) sim_args.payload = sim_payload;
    if (*mr) sim_args.rate = sim_rate;
    if (*mn) sim_args.packets = sim_packets;

    try {
        if (select->parsed()) return run_select(global, select_args);
        if (simulate->parsed()) return run_simulate(global, sim_args);
        if (generate->parsed()) return run_generate(global, gen_default_grid, gen_out);
        if (validate_cmd->parsed()) return run_validate(global, val_scenarios, val_out_dir, val_jobs);
        if (compare->parsed()) return run_compare(global, cmp_scenarios, cmp_out_dir);
        if (report->parsed()) return run_report(rep_in, rep_out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

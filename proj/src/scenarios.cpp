#include "sfplan/scenarios.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sfplan {

ScenarioGrid default_grid() {
    ScenarioGrid grid;
    grid.distances_m = {100, 190, 280, 370, 440, 560, 640, 800, 900, 1160, 1250, 1340, 1620, 1780};
    grid.speeds_mps = {0, 3, 8, 15};
    grid.environments = {
        {1.9, 83.85, 0.60, "open-los"},
        {1.9, 84.05, 0.50, "semi-rural-los"},
        {1.9, 84.25, 0.45, "coastal-los"},
        {1.9, 84.45, 1.00, "obstructed-los"},
    };
    grid.traffic_profiles = {
        {20, 20.0, std::nullopt},
        {20, 60.0, std::nullopt},
        {20, 90.0, std::nullopt},
    };
    grid.region = RegionProfile{};
    return grid;
}

std::vector<ScenarioSpec> generate_grid(const ScenarioGrid& grid, std::uint64_t /*seed*/) {
    if (grid.distances_m.empty() || grid.speeds_mps.empty() || grid.environments.empty() ||
        grid.traffic_profiles.empty())
        throw InvalidGridError("every grid axis needs at least one value");

    std::vector<ScenarioSpec> specs;
    specs.reserve(grid.size());
    std::size_t index = 0;
    for (double distance : grid.distances_m) {
        for (double speed : grid.speeds_mps) {
            for (const auto& env : grid.environments) {
                for (const auto& traffic : grid.traffic_profiles) {
                    ScenarioSpec spec;
                    char id[16];
                    std::snprintf(id, sizeof(id), "S%04zu", index++);
                    spec.scenario_id = id;
                    spec.distance_m = distance;
                    spec.speed_mps = speed;
                    spec.payload_bytes = traffic.payload_bytes;
                    spec.packets_per_hour = traffic.packets_per_hour;
                    spec.required_throughput_bps = traffic.required_throughput_bps;
                    spec.environment = env;
                    spec.region = grid.region;
                    spec.validate();
                    specs.push_back(std::move(spec));
                }
            }
        }
    }
    return specs;
}

// ---------------------------------------------------------------------------
// CSV persistence
// ---------------------------------------------------------------------------

namespace {

const char* kHeader =
    "scenario_id,distance_m,speed_mps,mobility_class,payload_bytes,packets_per_hour,"
    "required_throughput_bps,env_label,path_loss_exponent,reference_loss_1m_db,"
    "shadowing_sigma_db,duty_cycle_limit,max_tx_power_dbm,band_low_hz,band_high_hz";

const std::vector<std::string> kColumns = {
    "scenario_id",      "distance_m",        "speed_mps",
    "mobility_class",   "payload_bytes",     "packets_per_hour",
    "required_throughput_bps", "env_label",  "path_loss_exponent",
    "reference_loss_1m_db", "shadowing_sigma_db", "duty_cycle_limit",
    "max_tx_power_dbm", "band_low_hz",       "band_high_hz"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& text, std::size_t row, const std::string& column) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError(row, column, "not a number: '" + text + "'");
    return value;
}

void require_non_negative(double v, std::size_t row, const std::string& column) {
    if (v < 0) throw ParseError(row, column, "must be >= 0");
}

}  // namespace

void save_scenarios(const std::vector<ScenarioSpec>& specs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << kHeader << "\n";
    for (const auto& s : specs) {
        out << s.scenario_id << ',' << fmt(s.distance_m) << ',' << fmt(s.speed_mps) << ','
            << to_string(s.mobility_class()) << ',' << s.payload_bytes << ','
            << fmt(s.packets_per_hour) << ','
            << (s.required_throughput_bps ? fmt(*s.required_throughput_bps) : std::string()) << ','
            << s.environment.class_label << ',' << fmt(s.environment.path_loss_exponent) << ','
            << fmt(s.environment.reference_loss_1m_db) << ','
            << fmt(s.environment.shadowing_sigma_db) << ',' << fmt(s.region.duty_cycle_limit)
            << ',' << fmt(s.region.max_tx_power_dbm) << ',' << fmt(s.region.band_low_hz) << ','
            << fmt(s.region.band_high_hz) << "\n";
    }
}

std::vector<ScenarioSpec> load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "scenario_id", "empty file");
    if (split_csv(line) != kColumns) throw ParseError(1, "scenario_id", "unexpected CSV header");

    std::vector<ScenarioSpec> specs;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        row++;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != kColumns.size())
            throw ParseError(row, "scenario_id",
                             "expected " + std::to_string(kColumns.size()) + " fields, got " +
                                 std::to_string(fields.size()));

        ScenarioSpec s;
        s.scenario_id = fields[0];
        s.distance_m = parse_double(fields[1], row, "distance_m");
        if (s.distance_m <= 0) throw ParseError(row, "distance_m", "must be > 0");
        s.speed_mps = parse_double(fields[2], row, "speed_mps");
        require_non_negative(s.speed_mps, row, "speed_mps");
        // fields[3] (mobility_class) is derived; ignored on load.
        s.payload_bytes = static_cast<int>(parse_double(fields[4], row, "payload_bytes"));
        if (s.payload_bytes < 1 || s.payload_bytes > 255)
            throw ParseError(row, "payload_bytes", "must be in 1..255");
        s.packets_per_hour = parse_double(fields[5], row, "packets_per_hour");
        if (s.packets_per_hour < 1) throw ParseError(row, "packets_per_hour", "must be >= 1");
        if (!fields[6].empty())
            s.required_throughput_bps = parse_double(fields[6], row, "required_throughput_bps");
        s.environment.class_label = fields[7];
        s.environment.path_loss_exponent =
            parse_double(fields[8], row, "path_loss_exponent");
        s.environment.reference_loss_1m_db =
            parse_double(fields[9], row, "reference_loss_1m_db");
        s.environment.shadowing_sigma_db =
            parse_double(fields[10], row, "shadowing_sigma_db");
        s.region.duty_cycle_limit = parse_double(fields[11], row, "duty_cycle_limit");
        s.region.max_tx_power_dbm = parse_double(fields[12], row, "max_tx_power_dbm");
        s.region.band_low_hz = parse_double(fields[13], row, "band_low_hz");
        s.region.band_high_hz = parse_double(fields[14], row, "band_high_hz");

        try {
            s.validate();
        } catch (const InvalidConfigError& e) {
            throw ParseError(row, "scenario_id", e.what());
        }
        specs.push_back(std::move(s));
    }
    return specs;
}

ScenarioSpec load_scenario_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);

    ScenarioSpec s;
    s.scenario_id = "inline";
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        row++;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string text) {
            const auto begin = text.find_first_not_of(" \t\r");
            const auto end = text.find_last_not_of(" \t\r");
            return begin == std::string::npos ? std::string() : text.substr(begin, end - begin + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) continue;

        if (key == "scenario_id") s.scenario_id = value;
        else if (key == "distance_m") s.distance_m = parse_double(value, row, key);
        else if (key == "speed_mps") s.speed_mps = parse_double(value, row, key);
        else if (key == "payload_bytes")
            s.payload_bytes = static_cast<int>(parse_double(value, row, key));
        else if (key == "packets_per_hour") s.packets_per_hour = parse_double(value, row, key);
        else if (key == "required_throughput_bps")
            s.required_throughput_bps = parse_double(value, row, key);
        else if (key == "env_label") s.environment.class_label = value;
        else if (key == "path_loss_exponent")
            s.environment.path_loss_exponent = parse_double(value, row, key);
        else if (key == "reference_loss_1m_db")
            s.environment.reference_loss_1m_db = parse_double(value, row, key);
        else if (key == "shadowing_sigma_db")
            s.environment.shadowing_sigma_db = parse_double(value, row, key);
        else if (key == "duty_cycle_limit")
            s.region.duty_cycle_limit = parse_double(value, row, key);
        else if (key == "max_tx_power_dbm")
            s.region.max_tx_power_dbm = parse_double(value, row, key);
        else throw ParseError(row, key, "unknown scenario key");
    }
    s.validate();
    return s;
}

}  // namespace sfplan

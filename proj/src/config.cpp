#include "sfplan/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sfplan {

void AppConfig::validate() const {
    validate_radio_in_region(radio, region);
    environment.validate();
    weights.normalized();
    dynamic.validate();
    if (simulator.n_packets < 1) throw InvalidConfigError("simulator.n_packets must be >= 1");
    if (selector.fade_margin_db < 0)
        throw InvalidConfigError("selector.fade_margin_db must be >= 0");
    if (simulator.shadowing_sigma_override_db && *simulator.shadowing_sigma_override_db < 0)
        throw InvalidConfigError("simulator.shadowing_sigma_override_db must be >= 0");
}

namespace {

double to_double(const std::string& value, std::size_t row, const std::string& key) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ParseError(row, key, "not a number: '" + value + "'");
    return out;
}

bool to_bool(const std::string& value, std::size_t row, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ParseError(row, key, "expected true/false");
}

std::vector<double> to_doubles(const std::string& value, std::size_t row, const std::string& key) {
    std::vector<double> out;
    std::istringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ' '))
        if (!item.empty()) out.push_back(to_double(item, row, key));
    if (out.empty()) throw ParseError(row, key, "expected a space-separated list of numbers");
    return out;
}

// Grid environments and traffic profiles are only configurable through the
// JSON form; the key-value form covers the scalar settings.
void apply_kv(AppConfig& config, const std::string& key, const std::string& value,
              std::size_t row) {
    if (key == "radio.carrier_frequency_hz") config.radio.carrier_frequency_hz = to_double(value, row, key);
    else if (key == "radio.bandwidth_hz") config.radio.bandwidth_hz = to_double(value, row, key);
    else if (key == "radio.coding_rate") config.radio.coding_rate = static_cast<int>(to_double(value, row, key));
    else if (key == "radio.preamble_symbols") config.radio.preamble_symbols = static_cast<int>(to_double(value, row, key));
    else if (key == "radio.explicit_header") config.radio.explicit_header = to_bool(value, row, key);
    else if (key == "radio.crc_enabled") config.radio.crc_enabled = to_bool(value, row, key);
    else if (key == "radio.tx_power_dbm") config.radio.tx_power_dbm = to_double(value, row, key);
    else if (key == "radio.tx_antenna_gain_dbi") config.radio.tx_antenna_gain_dbi = to_double(value, row, key);
    else if (key == "radio.rx_antenna_gain_dbi") config.radio.rx_antenna_gain_dbi = to_double(value, row, key);
    else if (key == "radio.supply_voltage_v") config.radio.supply_voltage_v = to_double(value, row, key);
    else if (key == "environment.path_loss_exponent") config.environment.path_loss_exponent = to_double(value, row, key);
    else if (key == "environment.reference_loss_1m_db") config.environment.reference_loss_1m_db = to_double(value, row, key);
    else if (key == "environment.shadowing_sigma_db") config.environment.shadowing_sigma_db = to_double(value, row, key);
    else if (key == "environment.class_label") config.environment.class_label = value;
    else if (key == "region.duty_cycle_limit") config.region.duty_cycle_limit = to_double(value, row, key);
    else if (key == "region.max_tx_power_dbm") config.region.max_tx_power_dbm = to_double(value, row, key);
    else if (key == "region.band_low_hz") config.region.band_low_hz = to_double(value, row, key);
    else if (key == "region.band_high_hz") config.region.band_high_hz = to_double(value, row, key);
    else if (key == "weights.toa") config.weights.toa = to_double(value, row, key);
    else if (key == "weights.energy") config.weights.energy = to_double(value, row, key);
    else if (key == "weights.data_rate") config.weights.data_rate = to_double(value, row, key);
    else if (key == "weights.link_margin") config.weights.link_margin = to_double(value, row, key);
    else if (key == "selector.fade_margin_db") config.selector.fade_margin_db = to_double(value, row, key);
    else if (key == "selector.relaxed") config.selector.relaxed = to_bool(value, row, key);
    else if (key == "simulator.n_packets") config.simulator.n_packets = static_cast<int>(to_double(value, row, key));
    else if (key == "simulator.shadowing_sigma_override_db") config.simulator.shadowing_sigma_override_db = to_double(value, row, key);
    else if (key == "dynamic.beacon_interval_s") config.dynamic.beacon_interval_s = to_double(value, row, key);
    else if (key == "dynamic.margin_low_threshold_db") config.dynamic.margin_low_threshold_db = to_double(value, row, key);
    else if (key == "dynamic.margin_high_threshold_db") config.dynamic.margin_high_threshold_db = to_double(value, row, key);
    else if (key == "dynamic.sf_switch_dwell_s") config.dynamic.sf_switch_dwell_s = to_double(value, row, key);
    else if (key == "dynamic.control_packet_bytes") config.dynamic.control_packet_bytes = static_cast<int>(to_double(value, row, key));
    else if (key == "dynamic.losses_before_step_up") config.dynamic.losses_before_step_up = static_cast<int>(to_double(value, row, key));
    else if (key == "grid.distances_m") config.grid.distances_m = to_doubles(value, row, key);
    else if (key == "grid.speeds_mps") config.grid.speeds_mps = to_doubles(value, row, key);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(to_double(value, row, key));
    else throw ParseError(row, key, "unknown configuration key");
}

AppConfig load_kv(std::istream& in) {
    AppConfig config;
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
        if (key.empty()) continue;
        apply_kv(config, key, value, row);
    }
    return config;
}

EnvironmentModel env_from_json(const nlohmann::json& j) {
    EnvironmentModel env;
    env.path_loss_exponent = j.value("path_loss_exponent", env.path_loss_exponent);
    env.reference_loss_1m_db = j.value("reference_loss_1m_db", env.reference_loss_1m_db);
    env.shadowing_sigma_db = j.value("shadowing_sigma_db", env.shadowing_sigma_db);
    env.class_label = j.value("class_label", env.class_label);
    return env;
}

AppConfig load_json(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in);
    AppConfig config;

    if (j.contains("radio")) {
        const auto& r = j["radio"];
        config.radio.carrier_frequency_hz = r.value("carrier_frequency_hz", config.radio.carrier_frequency_hz);
        config.radio.bandwidth_hz = r.value("bandwidth_hz", config.radio.bandwidth_hz);
        config.radio.coding_rate = r.value("coding_rate", config.radio.coding_rate);
        config.radio.preamble_symbols = r.value("preamble_symbols", config.radio.preamble_symbols);
        config.radio.explicit_header = r.value("explicit_header", config.radio.explicit_header);
        config.radio.crc_enabled = r.value("crc_enabled", config.radio.crc_enabled);
        config.radio.tx_power_dbm = r.value("tx_power_dbm", config.radio.tx_power_dbm);
        config.radio.tx_antenna_gain_dbi = r.value("tx_antenna_gain_dbi", config.radio.tx_antenna_gain_dbi);
        config.radio.rx_antenna_gain_dbi = r.value("rx_antenna_gain_dbi", config.radio.rx_antenna_gain_dbi);
        config.radio.supply_voltage_v = r.value("supply_voltage_v", config.radio.supply_voltage_v);
        if (r.contains("tx_current_ma_by_power_dbm")) {
            config.radio.tx_current_ma_by_power_dbm.clear();
            for (const auto& [power, ma] : r["tx_current_ma_by_power_dbm"].items())
                config.radio.tx_current_ma_by_power_dbm[std::stod(power)] = ma.get<double>();
        }
    }
    if (j.contains("environment")) config.environment = env_from_json(j["environment"]);
    if (j.contains("region")) {
        const auto& r = j["region"];
        config.region.duty_cycle_limit = r.value("duty_cycle_limit", config.region.duty_cycle_limit);
        config.region.max_tx_power_dbm = r.value("max_tx_power_dbm", config.region.max_tx_power_dbm);
        config.region.band_low_hz = r.value("band_low_hz", config.region.band_low_hz);
        config.region.band_high_hz = r.value("band_high_hz", config.region.band_high_hz);
    }
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        config.weights.toa = w.value("toa", config.weights.toa);
        config.weights.energy = w.value("energy", config.weights.energy);
        config.weights.data_rate = w.value("data_rate", config.weights.data_rate);
        config.weights.link_margin = w.value("link_margin", config.weights.link_margin);
    }
    if (j.contains("selector")) {
        const auto& s = j["selector"];
        config.selector.fade_margin_db = s.value("fade_margin_db", config.selector.fade_margin_db);
        config.selector.relaxed = s.value("relaxed", config.selector.relaxed);
    }
    if (j.contains("simulator")) {
        const auto& s = j["simulator"];
        config.simulator.n_packets = s.value("n_packets", config.simulator.n_packets);
        if (s.contains("shadowing_sigma_override_db"))
            config.simulator.shadowing_sigma_override_db =
                s["shadowing_sigma_override_db"].get<double>();
    }
    if (j.contains("dynamic")) {
        const auto& d = j["dynamic"];
        config.dynamic.beacon_interval_s = d.value("beacon_interval_s", config.dynamic.beacon_interval_s);
        config.dynamic.margin_low_threshold_db = d.value("margin_low_threshold_db", config.dynamic.margin_low_threshold_db);
        config.dynamic.margin_high_threshold_db = d.value("margin_high_threshold_db", config.dynamic.margin_high_threshold_db);
        config.dynamic.sf_switch_dwell_s = d.value("sf_switch_dwell_s", config.dynamic.sf_switch_dwell_s);
        config.dynamic.control_packet_bytes = d.value("control_packet_bytes", config.dynamic.control_packet_bytes);
        config.dynamic.losses_before_step_up = d.value("losses_before_step_up", config.dynamic.losses_before_step_up);
    }
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (g.contains("distances_m")) config.grid.distances_m = g["distances_m"].get<std::vector<double>>();
        if (g.contains("speeds_mps")) config.grid.speeds_mps = g["speeds_mps"].get<std::vector<double>>();
        if (g.contains("environments")) {
            config.grid.environments.clear();
            for (const auto& env : g["environments"])
                config.grid.environments.push_back(env_from_json(env));
        }
        if (g.contains("traffic_profiles")) {
            config.grid.traffic_profiles.clear();
            for (const auto& t : g["traffic_profiles"]) {
                TrafficProfile profile;
                profile.payload_bytes = t.value("payload_bytes", profile.payload_bytes);
                profile.packets_per_hour = t.value("packets_per_hour", profile.packets_per_hour);
                if (t.contains("required_throughput_bps"))
                    profile.required_throughput_bps = t["required_throughput_bps"].get<double>();
                config.grid.traffic_profiles.push_back(profile);
            }
        }
    }
    config.seed = j.value("seed", config.seed);
    return config;
}

}  // namespace

AppConfig load_app_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config " + path);

    char first = 0;
    while (in.get(first) && (first == ' ' || first == '\n' || first == '\t' || first == '\r')) {
    }
    in.clear();
    in.seekg(0);

    AppConfig config = (first == '{') ? load_json(in) : load_kv(in);
    config.grid.region = config.region;
    config.validate();
    return config;
}

std::uint64_t resolve_seed(const AppConfig& config, std::optional<std::uint64_t> cli_seed) {
    if (cli_seed) return *cli_seed;
    if (const char* env = std::getenv("SFPLAN_SEED")) {
        char* end = nullptr;
        const unsigned long long value = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return value;
        throw InvalidConfigError("SFPLAN_SEED is not an integer");
    }
    return config.seed;
}

}  // namespace sfplan

#include "sfplan/phy.hpp"

#include <algorithm>
#include <cmath>

namespace sfplan {

namespace {

constexpr double kSpeedOfLightMps = 299'792'458.0;

// SX1276-class sensitivities (dBm) per bandwidth. 125 kHz column is the
// datasheet table; 250/500 kHz add ~3 dB per bandwidth doubling.
constexpr std::array<double, kSfCount> kSensitivity125k = {-123.0, -126.0, -129.0,
                                                           -132.0, -134.5, -137.0};
constexpr std::array<double, kSfCount> kSensitivity250k = {-120.0, -123.0, -126.0,
                                                           -129.0, -131.5, -134.0};
constexpr std::array<double, kSfCount> kSensitivity500k = {-117.0, -120.0, -123.0,
                                                           -126.0, -128.5, -131.0};

}  // namespace

double symbol_duration_s(SpreadingFactor sf, double bandwidth_hz) {
    if (bandwidth_hz <= 0) throw InvalidConfigError("bandwidth_hz must be > 0");
    return static_cast<double>(1 << sf.value) / bandwidth_hz;
}

bool low_data_rate_optimized(SpreadingFactor sf, double bandwidth_hz) {
    return symbol_duration_s(sf, bandwidth_hz) > 16.0e-3;
}

double time_on_air_s(SpreadingFactor sf, const RadioConfig& config, int payload_bytes) {
    config.validate();
    if (payload_bytes < 1) throw InvalidPayloadError("payload must be at least 1 byte");
    if (payload_bytes > 255) throw InvalidPayloadError("payload exceeds 255 bytes");

    const double t_symbol = symbol_duration_s(sf, config.bandwidth_hz);
    const int de = low_data_rate_optimized(sf, config.bandwidth_hz) ? 1 : 0;
    const int ih = config.explicit_header ? 0 : 1;
    const int crc = config.crc_enabled ? 1 : 0;
    const int cr_code = config.coding_rate - 4;  // 1..4

    const double numerator = 8.0 * payload_bytes - 4.0 * sf.value + 28.0 + 16.0 * crc - 20.0 * ih;
    const double denominator = 4.0 * (sf.value - 2 * de);
    const double payload_symbols =
        8.0 + std::max(std::ceil(numerator / denominator) * (cr_code + 4), 0.0);

    const double preamble_symbols = config.preamble_symbols + 4.25;
    return (preamble_symbols + payload_symbols) * t_symbol;
}

double effective_data_rate_bps(SpreadingFactor sf, const RadioConfig& config, int payload_bytes) {
    return payload_bytes * 8.0 / time_on_air_s(sf, config, payload_bytes);
}

double sensitivity_dbm(SpreadingFactor sf, double bandwidth_hz) {
    if (bandwidth_hz == 125000.0) return kSensitivity125k[sf.index()];
    if (bandwidth_hz == 250000.0) return kSensitivity250k[sf.index()];
    if (bandwidth_hz == 500000.0) return kSensitivity500k[sf.index()];
    throw InvalidConfigError("no sensitivity table for bandwidth " + std::to_string(bandwidth_hz) +
                             " Hz (supported: 125000, 250000, 500000)");
}

PathLossResult path_loss(double distance_m, const EnvironmentModel& env) {
    env.validate();
    PathLossResult result;
    if (distance_m < 1.0) {
        distance_m = 1.0;
        result.clamped = true;
    }
    result.loss_db = env.reference_loss_1m_db + 10.0 * env.path_loss_exponent * std::log10(distance_m);
    return result;
}

LinkBudget link_budget(SpreadingFactor sf, const RadioConfig& config, double distance_m,
                       const EnvironmentModel& env) {
    LinkBudget budget;
    budget.path_loss_db = path_loss(distance_m, env).loss_db;
    budget.expected_rssi_dbm = config.tx_power_dbm + config.tx_antenna_gain_dbi +
                               config.rx_antenna_gain_dbi - budget.path_loss_db;
    budget.sensitivity_dbm = sensitivity_dbm(sf, config.bandwidth_hz);
    budget.link_margin_db = budget.expected_rssi_dbm - budget.sensitivity_dbm;
    return budget;
}

double max_reliable_range_m(SpreadingFactor sf, const RadioConfig& config,
                            const EnvironmentModel& env, double fade_margin_db) {
    if (fade_margin_db < 0) throw InvalidConfigError("fade_margin_db must be >= 0");
    env.validate();
    config.validate();
    const double headroom = config.tx_power_dbm + config.tx_antenna_gain_dbi +
                            config.rx_antenna_gain_dbi - env.reference_loss_1m_db -
                            sensitivity_dbm(sf, config.bandwidth_hz) - fade_margin_db;
    return std::pow(10.0, headroom / (10.0 * env.path_loss_exponent));
}

EnergyResult energy_per_hour_j(SpreadingFactor sf, const RadioConfig& config, int payload_bytes,
                               double packets_per_hour) {
    if (packets_per_hour < 0) throw InvalidConfigError("packets_per_hour must be >= 0");
    config.validate();

    EnergyResult result;
    const auto& table = config.tx_current_ma_by_power_dbm;
    auto it = table.find(config.tx_power_dbm);
    double current_ma = 0.0;
    if (it != table.end()) {
        current_ma = it->second;
    } else {
        // Nearest entry; ties resolve toward the lower power.
        double best_delta = -1.0;
        for (const auto& [power, ma] : table) {
            const double delta = std::abs(power - config.tx_power_dbm);
            if (best_delta < 0 || delta < best_delta) {
                best_delta = delta;
                current_ma = ma;
            }
        }
        result.approximated_current = true;
    }

    if (packets_per_hour == 0) {
        result.joules = 0.0;
        return result;
    }
    const double toa = time_on_air_s(sf, config, payload_bytes);
    result.joules = config.supply_voltage_v * (current_ma / 1000.0) * toa * packets_per_hour;
    return result;
}

double doppler_shift_hz(const RadioConfig& config, double speed_mps) {
    if (speed_mps < 0) throw InvalidConfigError("speed_mps must be >= 0");
    return speed_mps * config.carrier_frequency_hz / kSpeedOfLightMps;
}

double doppler_tolerance_hz(SpreadingFactor sf, const RadioConfig& config) {
    return config.bandwidth_hz / static_cast<double>(1 << (sf.value + 1));
}

bool doppler_excluded(SpreadingFactor sf, const RadioConfig& config, double speed_mps) {
    return doppler_shift_hz(config, speed_mps) > doppler_tolerance_hz(sf, config);
}

}  // namespace sfplan

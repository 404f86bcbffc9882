#pragma once

// Core domain types shared by every sfplan component: spreading factors,
// radio configuration, propagation environments and regulatory profiles.

#include <array>
#include <compare>
#include <map>
#include <stdexcept>
#include <string>

namespace sfplan {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidConfigError : Error {
    using Error::Error;
};

struct InvalidPayloadError : Error {
    using Error::Error;
};

struct InvalidTraceError : Error {
    using Error::Error;
};

struct InvalidGridError : Error {
    using Error::Error;
};

/// CSV / config parse failure. Carries the 1-based row and the offending
/// column name so callers can point at the exact cell.
struct ParseError : Error {
    ParseError(std::size_t row, std::string column, const std::string& what)
        : Error("row " + std::to_string(row) + ", column '" + column + "': " + what),
          row(row),
          column(std::move(column)) {}

    std::size_t row;
    std::string column;
};

// ---------------------------------------------------------------------------
// Spreading factor
// ---------------------------------------------------------------------------

/// LoRa spreading factor, restricted to the SX127x range SF7..SF12.
/// Ordering is total: SF7 < SF8 < ... < SF12.
struct SpreadingFactor {
    int value = 7;

    auto operator<=>(const SpreadingFactor&) const = default;

    /// Zero-based index into per-SF tables (SF7 -> 0, SF12 -> 5).
    int index() const { return value - 7; }
};

inline constexpr int kMinSf = 7;
inline constexpr int kMaxSf = 12;
inline constexpr int kSfCount = 6;

inline constexpr std::array<SpreadingFactor, kSfCount> all_spreading_factors() {
    return {SpreadingFactor{7},  SpreadingFactor{8},  SpreadingFactor{9},
            SpreadingFactor{10}, SpreadingFactor{11}, SpreadingFactor{12}};
}

inline SpreadingFactor sf_from_int(int value) {
    if (value < kMinSf || value > kMaxSf) {
        throw InvalidConfigError("spreading factor " + std::to_string(value) +
                                 " outside supported range 7..12");
    }
    return SpreadingFactor{value};
}

inline std::string to_string(SpreadingFactor sf) { return "SF" + std::to_string(sf.value); }

// ---------------------------------------------------------------------------
// Radio configuration
// ---------------------------------------------------------------------------

/// Transceiver settings. Defaults model an SX1278-class module on the
/// 433 MHz band: 125 kHz bandwidth, CR 4/5, 8-symbol preamble, explicit
/// header, CRC on, 14 dBm transmit power.
struct RadioConfig {
    double carrier_frequency_hz = 433.175e6;
    double bandwidth_hz = 125000.0;
    /// Denominator-style coding rate: 5..8 meaning 4/5 .. 4/8.
    int coding_rate = 5;
    int preamble_symbols = 8;
    bool explicit_header = true;
    bool crc_enabled = true;
    double tx_power_dbm = 14.0;
    double tx_antenna_gain_dbi = 0.0;
    double rx_antenna_gain_dbi = 0.0;
    double supply_voltage_v = 3.3;
    /// Transmit current draw (mA) keyed by output power (dBm). Missing
    /// powers resolve to the nearest entry with a warning flag.
    std::map<double, double> tx_current_ma_by_power_dbm = {
        {2.0, 24.0}, {5.0, 27.0}, {8.0, 31.0}, {11.0, 38.0},
        {14.0, 45.0}, {17.0, 90.0}, {20.0, 120.0}};

    void validate() const {
        if (carrier_frequency_hz <= 0) throw InvalidConfigError("carrier_frequency_hz must be > 0");
        if (bandwidth_hz <= 0) throw InvalidConfigError("bandwidth_hz must be > 0");
        if (coding_rate < 5 || coding_rate > 8)
            throw InvalidConfigError("coding_rate must be in 5..8 (4/5 .. 4/8)");
        if (preamble_symbols < 1) throw InvalidConfigError("preamble_symbols must be >= 1");
        if (supply_voltage_v <= 0) throw InvalidConfigError("supply_voltage_v must be > 0");
        if (tx_current_ma_by_power_dbm.empty())
            throw InvalidConfigError("tx_current_ma_by_power_dbm must not be empty");
    }
};

// ---------------------------------------------------------------------------
// Propagation environment
// ---------------------------------------------------------------------------

/// Log-distance channel: path_loss(d) = reference_loss_1m_db
/// + 10 * path_loss_exponent * log10(d), plus zero-mean log-normal
/// shadowing with the given sigma.
///
/// The default "open-los" parameters are a calibrated fit for near-ground
/// 433 MHz line-of-sight links: a sub-2 slope (ground-reflection gain below
/// the breakpoint distance) paired with a large 1 m intercept that absorbs
/// antenna deployment and clutter losses.
struct EnvironmentModel {
    double path_loss_exponent = 1.9;
    double reference_loss_1m_db = 83.85;
    double shadowing_sigma_db = 0.6;
    std::string class_label = "open-los";

    void validate() const {
        // Fitted exponents below free space occur on LoS links before the
        // two-ray breakpoint; anything under 1.5 is treated as a typo.
        if (path_loss_exponent < 1.5)
            throw InvalidConfigError("path_loss_exponent must be >= 1.5");
        if (shadowing_sigma_db < 0)
            throw InvalidConfigError("shadowing_sigma_db must be >= 0");
        if (reference_loss_1m_db < 0)
            throw InvalidConfigError("reference_loss_1m_db must be >= 0");
    }
};

// ---------------------------------------------------------------------------
// Regulatory profile
// ---------------------------------------------------------------------------

/// Regional limits applied by the duty-cycle rule and power validation.
/// Defaults reconstruct a 433 MHz ISM deployment: the 1.5 % duty budget is
/// the calibrated compromise between the 1 % planning folklore and the 10 %
/// ETSI sub-band cap.
struct RegionProfile {
    double duty_cycle_limit = 0.015;
    double max_tx_power_dbm = 14.0;
    double band_low_hz = 433.05e6;
    double band_high_hz = 434.79e6;

    /// Transmit airtime allowance per rolling hour, in seconds.
    double airtime_budget_per_hour_s() const { return duty_cycle_limit * 3600.0; }

    void validate() const {
        if (duty_cycle_limit <= 0 || duty_cycle_limit > 1)
            throw InvalidConfigError("duty_cycle_limit must be in (0, 1]");
        if (band_low_hz >= band_high_hz)
            throw InvalidConfigError("allowed band range is empty");
    }
};

/// Cross-checks a radio against a region (power cap, band membership).
inline void validate_radio_in_region(const RadioConfig& radio, const RegionProfile& region) {
    radio.validate();
    region.validate();
    if (radio.tx_power_dbm > region.max_tx_power_dbm)
        throw InvalidConfigError("tx_power_dbm exceeds regional limit");
    if (radio.carrier_frequency_hz < region.band_low_hz ||
        radio.carrier_frequency_hz > region.band_high_hz)
        throw InvalidConfigError("carrier_frequency_hz outside allowed band");
}

// ---------------------------------------------------------------------------
// Link budget
// ---------------------------------------------------------------------------

struct LinkBudget {
    double expected_rssi_dbm = 0.0;
    double sensitivity_dbm = 0.0;
    double link_margin_db = 0.0;  // always expected_rssi - sensitivity
    double path_loss_db = 0.0;
};

}  // namespace sfplan

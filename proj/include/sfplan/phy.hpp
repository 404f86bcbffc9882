#pragma once

// Pure LoRa physical-layer math: chirp timing, packet time-on-air,
// receiver sensitivity, log-distance path loss, link budgets and the
// derived planning quantities (maximum reliable range, transmit energy,
// Doppler tolerance).
//
// Every function here is a pure function of its arguments; identical
// inputs produce bit-identical outputs.

#include "sfplan/types.hpp"

namespace sfplan {

/// Duration of one chirp symbol: 2^sf / bandwidth.
double symbol_duration_s(SpreadingFactor sf, double bandwidth_hz);

/// Low-data-rate optimization is mandatory once the symbol duration
/// exceeds 16 ms (SF11/SF12 at 125 kHz).
bool low_data_rate_optimized(SpreadingFactor sf, double bandwidth_hz);

/// Total packet duration per the SX127x packet formula: preamble
/// (preamble_symbols + 4.25 symbols) plus coded payload symbols.
/// Throws InvalidPayloadError unless 1 <= payload_bytes <= 255.
double time_on_air_s(SpreadingFactor sf, const RadioConfig& config, int payload_bytes);

/// Application throughput if the whole airtime carried this payload:
/// payload_bytes * 8 / time_on_air.
double effective_data_rate_bps(SpreadingFactor sf, const RadioConfig& config, int payload_bytes);

/// Receiver sensitivity lookup (SX1276-class, dBm). Supported bandwidths:
/// 125, 250 and 500 kHz.
double sensitivity_dbm(SpreadingFactor sf, double bandwidth_hz);

struct PathLossResult {
    double loss_db = 0.0;
    bool clamped = false;  // distance below the 1 m reference was clamped
};

/// Log-distance path loss. Distances below 1 m are clamped to the
/// reference distance and flagged.
PathLossResult path_loss(double distance_m, const EnvironmentModel& env);

/// Expected RSSI, sensitivity and margin for one SF at one distance.
LinkBudget link_budget(SpreadingFactor sf, const RadioConfig& config, double distance_m,
                       const EnvironmentModel& env);

/// Largest distance at which the link margin still meets fade_margin_db,
/// from the closed-form inversion of the log-distance model.
double max_reliable_range_m(SpreadingFactor sf, const RadioConfig& config,
                            const EnvironmentModel& env, double fade_margin_db);

struct EnergyResult {
    double joules = 0.0;
    bool approximated_current = false;  // tx power missing from the current table
};

/// Transmit energy per hour: V * I(tx_power) * ToA * packets_per_hour.
/// Receive and sleep currents are out of scope; only the transmit cost
/// differs between spreading factors.
EnergyResult energy_per_hour_j(SpreadingFactor sf, const RadioConfig& config, int payload_bytes,
                               double packets_per_hour);

/// Doppler shift of the carrier at the given relative speed.
double doppler_shift_hz(const RadioConfig& config, double speed_mps);

/// Frequency error tolerance of the demodulator, shrinking with SF:
/// bandwidth / 2^(sf + 1).
double doppler_tolerance_hz(SpreadingFactor sf, const RadioConfig& config);

/// True when the Doppler shift at this speed exceeds the SF's tolerance
/// (the exclusion test used for high-mobility planning).
bool doppler_excluded(SpreadingFactor sf, const RadioConfig& config, double speed_mps);

}  // namespace sfplan

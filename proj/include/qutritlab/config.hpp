#pragma once

#include <string>

#include <json.hpp>

#include "qutritlab/device.hpp"
#include "qutritlab/noise.hpp"
#include "qutritlab/readout.hpp"

namespace qutritlab {

// Configuration problems exit the CLI with code 2; numerical failures with 3.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    DeviceParams device;
    NoiseParams noise;

    // Readout block.
    double readout_duration_us = 0.15;
    double ringdown_us = 0.30;
    std::optional<double> drive_frequency_mhz;  // default: bare cavity
    std::optional<double> drive_amplitude;      // default: auto-calibrated
    double window_us = 1.2;
    double record_sigma = 0.0;
    double snr_threshold = 5.0;
    SweetSpotMode pulls_mode = SweetSpotMode::second_order;

    std::uint64_t seed = 1;
    std::string out_dir = "out";
    nlohmann::json experiment = nlohmann::json::object();

    // The fully resolved configuration this run used, for hashing and replay.
    nlohmann::json resolved = nlohmann::json::object();
};

// Parse and validate; unknown keys are rejected at every level.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig default_config();

// Read a numeric experiment parameter, enforcing the allowed key set at call
// sites via validate_keys.
void validate_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                   const std::string& context);

// FNV-1a of the canonical serialization.
std::string config_hash(const nlohmann::json& resolved);

}  // namespace qutritlab

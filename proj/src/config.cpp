#include "qutritlab/config.hpp"

#include <algorithm>

#include "qutritlab/presets.hpp"

namespace qutritlab {

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& key, double fallback,
                      bool* present = nullptr) {
    if (!j.contains(key)) {
        if (present) *present = false;
        return fallback;
    }
    if (present) *present = true;
    if (!j.at(key).is_number()) {
        throw config_error("config: '" + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

DeviceParams parse_device(const json& j) {
    validate_keys(j,
                  {"preset", "f_r_mhz", "g_mhz", "kappa_mhz", "f01_mhz", "alpha_mhz",
                   "n_qutrit_levels", "n_photons", "transmon"},
                  "device");
    DeviceParams p = device_preset(
        j.contains("preset") ? j.at("preset").get<std::string>() : "default");
    p.f_r_mhz = require_number(j, "f_r_mhz", p.f_r_mhz);
    p.g_mhz = require_number(j, "g_mhz", p.g_mhz);
    p.kappa_mhz = require_number(j, "kappa_mhz", p.kappa_mhz);
    if (j.contains("n_qutrit_levels")) {
        p.n_qutrit_levels = j.at("n_qutrit_levels").get<int>();
    }
    if (j.contains("n_photons")) p.n_photons = j.at("n_photons").get<int>();
    if (j.contains("transmon")) {
        const json& t = j.at("transmon");
        validate_keys(t, {"ej_mhz", "ec_mhz", "ng", "charge_cutoff"}, "device.transmon");
        TransmonSpec spec;
        spec.ej_mhz = require_number(t, "ej_mhz", 0.0);
        spec.ec_mhz = require_number(t, "ec_mhz", 0.0);
        spec.ng = require_number(t, "ng", 0.0);
        if (t.contains("charge_cutoff")) {
            spec.charge_cutoff = t.at("charge_cutoff").get<int>();
        }
        spec.validate();
        p.levels = spec;
    } else {
        QutritLevels base = std::get<QutritLevels>(p.levels);
        double f01 = require_number(j, "f01_mhz", base.f01_mhz);
        double alpha = require_number(j, "alpha_mhz", base.alpha_mhz);
        p.levels = QutritLevels::ladder(f01, alpha, p.n_qutrit_levels);
    }
    p.validate();
    return p;
}

NoiseParams parse_noise(const json& j) {
    validate_keys(j,
                  {"preset", "t1_01_us", "t2_01_us", "t2_12_us", "n_th", "t1_12_us",
                   "t2_02_us"},
                  "noise");
    NoiseParams p = noise_preset(
        j.contains("preset") ? j.at("preset").get<std::string>() : "default");
    p.t1_01_us = require_number(j, "t1_01_us", p.t1_01_us);
    p.t2_01_us = require_number(j, "t2_01_us", p.t2_01_us);
    p.t2_12_us = require_number(j, "t2_12_us", p.t2_12_us);
    p.n_th = require_number(j, "n_th", p.n_th);
    if (j.contains("t1_12_us")) p.t1_12_us = j.at("t1_12_us").get<double>();
    if (j.contains("t2_02_us")) p.t2_02_us = j.at("t2_02_us").get<double>();
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return p;
}

}  // namespace

void validate_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                   const std::string& context) {
    if (!j.is_object()) {
        throw config_error("config: '" + context + "' must be an object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            throw config_error("config: unknown key '" + it.key() + "' in " + context);
        }
    }
}

ExperimentConfig parse_config(const nlohmann::json& j) {
    validate_keys(j, {"device", "noise", "readout", "experiment", "seed", "out"},
                  "top level");
    ExperimentConfig cfg;
    try {
        cfg.device = parse_device(j.value("device", nlohmann::json::object()));
        cfg.noise = parse_noise(j.value("noise", nlohmann::json::object()));
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }

    nlohmann::json r = j.value("readout", nlohmann::json::object());
    validate_keys(r,
                  {"duration_us", "ringdown_us", "drive_frequency_mhz",
                   "drive_amplitude", "window_us", "sigma", "snr_threshold", "pulls"},
                  "readout");
    cfg.readout_duration_us = require_number(r, "duration_us", cfg.readout_duration_us);
    cfg.ringdown_us = require_number(r, "ringdown_us", cfg.ringdown_us);
    if (r.contains("drive_frequency_mhz")) {
        cfg.drive_frequency_mhz = r.at("drive_frequency_mhz").get<double>();
    }
    if (r.contains("drive_amplitude")) {
        if (r.at("drive_amplitude").is_string()) {
            if (r.at("drive_amplitude").get<std::string>() != "auto") {
                throw config_error("config: drive_amplitude must be a number or 'auto'");
            }
        } else {
            cfg.drive_amplitude = r.at("drive_amplitude").get<double>();
        }
    }
    cfg.window_us = require_number(r, "window_us", cfg.window_us);
    cfg.record_sigma = require_number(r, "sigma", cfg.record_sigma);
    cfg.snr_threshold = require_number(r, "snr_threshold", cfg.snr_threshold);
    if (r.contains("pulls")) {
        std::string mode = r.at("pulls").get<std::string>();
        if (mode == "second_order") {
            cfg.pulls_mode = SweetSpotMode::second_order;
        } else if (mode == "exact") {
            cfg.pulls_mode = SweetSpotMode::exact;
        } else {
            throw config_error("config: pulls must be 'second_order' or 'exact'");
        }
    }

    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    cfg.experiment = j.value("experiment", nlohmann::json::object());
    if (cfg.experiment.is_null()) cfg.experiment = nlohmann::json::object();

    // Canonical resolved form for hashing.
    nlohmann::json resolved;
    const QutritLevels levels = cfg.device.resolved_levels();
    resolved["device"] = {
        {"f_r_mhz", cfg.device.f_r_mhz},       {"g_mhz", cfg.device.g_mhz},
        {"kappa_mhz", cfg.device.kappa_mhz},   {"f01_mhz", levels.f01_mhz},
        {"alpha_mhz", levels.alpha_mhz},       {"n_qutrit_levels", cfg.device.n_qutrit_levels},
        {"n_photons", cfg.device.n_photons}};
    resolved["noise"] = {{"t1_01_us", cfg.noise.t1_01_us},
                         {"t2_01_us", cfg.noise.t2_01_us},
                         {"t2_12_us", cfg.noise.t2_12_us},
                         {"n_th", cfg.noise.n_th},
                         {"t1_12_us", cfg.noise.resolved_t1_12()}};
    if (cfg.noise.t2_02_us) resolved["noise"]["t2_02_us"] = *cfg.noise.t2_02_us;
    resolved["readout"] = {
        {"duration_us", cfg.readout_duration_us},
        {"ringdown_us", cfg.ringdown_us},
        {"window_us", cfg.window_us},
        {"sigma", cfg.record_sigma},
        {"snr_threshold", cfg.snr_threshold},
        {"pulls", cfg.pulls_mode == SweetSpotMode::exact ? "exact" : "second_order"}};
    if (cfg.drive_frequency_mhz) {
        resolved["readout"]["drive_frequency_mhz"] = *cfg.drive_frequency_mhz;
    }
    if (cfg.drive_amplitude) {
        resolved["readout"]["drive_amplitude"] = *cfg.drive_amplitude;
    }
    resolved["seed"] = cfg.seed;
    resolved["experiment"] = cfg.experiment;
    cfg.resolved = std::move(resolved);
    return cfg;
}

ExperimentConfig default_config() {
    return parse_config(nlohmann::json::object());
}

std::string config_hash(const nlohmann::json& resolved) {
    const std::string dump = resolved.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace qutritlab

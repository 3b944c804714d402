#include "qutritlab/presets.hpp"

namespace qutritlab {

namespace {

constexpr double kCavityMhz = 7182.0;
constexpr double kCouplingMhz = 20.0;
constexpr double kKappaMhz = kCavityMhz / 4200.0;  // from the output Q

DeviceParams make_device(double f01, double alpha) {
    DeviceParams p;
    p.f_r_mhz = kCavityMhz;
    p.g_mhz = kCouplingMhz;
    p.kappa_mhz = kKappaMhz;
    p.levels = QutritLevels::ladder(f01, alpha, p.n_qutrit_levels);
    return p;
}

}  // namespace

DeviceParams device_preset(const std::string& name) {
    if (name == "default" || name == "alpha310") {
        return make_device(kCavityMhz - 310.0, -310.0);
    }
    if (name == "alpha300") return make_device(kCavityMhz - 300.0, -300.0);
    if (name == "alpha314") return make_device(kCavityMhz - 314.0, -314.0);
    if (name == "f01_6901") return make_device(6901.0, -314.0);
    if (name == "f01_6906") return make_device(6906.0, -310.0);
    if (name == "offspot_6750") return make_device(6750.0, -310.0);
    throw std::invalid_argument("device_preset: unknown preset '" + name + "'");
}

NoiseParams noise_preset(const std::string& name) {
    NoiseParams p;
    p.t1_01_us = 15.0;
    p.t2_01_us = 11.2;
    p.t2_12_us = 5.78;
    p.n_th = 0.078;
    if (name == "default") return p;
    if (name == "t2_12_577") {
        p.t2_12_us = 5.77;
        return p;
    }
    throw std::invalid_argument("noise_preset: unknown preset '" + name + "'");
}

std::vector<std::string> device_preset_names() {
    return {"default", "alpha300", "alpha310", "alpha314",
            "f01_6901", "f01_6906", "offspot_6750"};
}

std::vector<std::string> noise_preset_names() {
    return {"default", "t2_12_577"};
}

}  // namespace qutritlab

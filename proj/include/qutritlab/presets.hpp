#pragma once

#include <string>

#include "qutritlab/device.hpp"
#include "qutritlab/noise.hpp"

namespace qutritlab {

// Bundled reference-device parameters: a 3D copper cavity at f_r = 7182 MHz
// with Q_out = 4200 (kappa = f_r/Q ~ 1.71 MHz) coupled at g = 20 MHz to a
// transmon-style qutrit. Anharmonicity variants -300/-310/-314 MHz and the
// two spectroscopy-fit qutrit frequencies 6901/6906 MHz ship as named
// presets; "default" sits at the second-order sweet spot f01 = f_r + alpha
// with alpha = -310 MHz.
DeviceParams device_preset(const std::string& name);

// Reference coherence set: T1_01 = 15.0 us, T2_01 = 11.2 us,
// T2_12 = 5.78 us, thermal occupation 0.078. "t2_12_577" carries the
// alternative 5.77 us value.
NoiseParams noise_preset(const std::string& name);

std::vector<std::string> device_preset_names();
std::vector<std::string> noise_preset_names();

}  // namespace qutritlab

#pragma once

#include "qutritlab/config.hpp"
#include "qutritlab/contextuality.hpp"
#include "qutritlab/report.hpp"

namespace qutritlab {

// Per-run resolved context: pulls for the configured working point and the
// calibrated drive.
struct RunContext {
    ExperimentConfig cfg;
    std::array<double, 3> pulls_mhz{};
    double drive_frequency_mhz = 0.0;
    double drive_amplitude = 0.0;
    std::string hash;
};

// chi_i per qutrit state at a given detuning, by the chosen route.
std::array<double, 3> state_pulls(const DeviceParams& dev, double delta_mhz,
                                  SweetSpotMode mode);

// Scale the drive so the 0-1 coherence factor of a 150 ns (duration_us)
// pulse equals 0.01. Exact one-shot solve: the decoherence exponent is
// quadratic in the amplitude.
double calibrate_drive_amplitude(ReadoutConfig base, double target_d01 = 0.01);

RunContext prepare_run(const ExperimentConfig& cfg);
ReadoutConfig readout_config(const RunContext& ctx);

// The back-action of one readout window (drive + ringdown) combined with the
// intrinsic decoherence over the same wall time.
KrausChannel readout_window_channel(const RunContext& ctx);

RunReport exp_chi_curve(const ExperimentConfig& cfg);
RunReport exp_spectroscopy(const ExperimentConfig& cfg);
RunReport exp_spiral(const ExperimentConfig& cfg);
RunReport exp_ramsey(const ExperimentConfig& cfg);
RunReport exp_state_tomo(const ExperimentConfig& cfg);
RunReport exp_process_tomo(const ExperimentConfig& cfg);
RunReport exp_contextuality(const ExperimentConfig& cfg);
RunReport exp_sweet_spot(const ExperimentConfig& cfg);

// Dispatch by CLI name: chi-curve, spectroscopy, spiral, ramsey, state-tomo,
// process-tomo, contextuality, sweet-spot.
RunReport run_experiment(const std::string& name, const ExperimentConfig& cfg);
std::vector<std::string> experiment_names();

}  // namespace qutritlab

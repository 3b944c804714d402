#pragma once

#include <array>
#include <iosfwd>

#include "qutritlab/channel.hpp"
#include "qutritlab/noise.hpp"

namespace qutritlab {

// Dispersive readout drive. Frequencies in MHz, times in us. The cavity
// resonance for qutrit state i sits at nu_r + chi_i (pulls from the device
// module); the pointer equation uses this sign convention throughout.
struct ReadoutConfig {
    double cavity_frequency_mhz;
    double drive_frequency_mhz;
    double drive_amplitude;        // epsilon in the pointer ODE, amplitude/us
    double duration_us;            // driven window
    double ringdown_us = 0.0;      // undriven tail, included in the channel
    double kappa_mhz;
    std::array<double, 3> pulls_mhz{};  // chi_i per qutrit state
    double window_us = 1.2;        // record integration window
    double noise_sigma = 0.0;      // additive record noise
    double snr_threshold = 5.0;    // integrated 0-vs-rest separation for projection
    int n_samples = 400;           // trajectory export grid

    void validate() const;
};

enum class ReadoutMode { general, ideal_binary, ideal_ternary };

struct PointerTrajectory {
    std::vector<double> time_us;
    std::array<std::vector<Complex>, 3> amplitude;  // per qutrit state
};

// Closed-form solution of d(alpha_i)/dt =
//   -i 2pi (chi_i - Delta_d) alpha_i - pi kappa alpha_i + epsilon,
// sampled over drive plus ringdown from a cold cavity.
PointerTrajectory pointer_trajectories(const ReadoutConfig& cfg);

// Exact coherence bookkeeping for the pointer model. coherence_factor(i,j)
// multiplies rho_ij; its magnitude factors into the end-point coherent-state
// overlap times the cavity-decay contribution.
struct PointerAnalysis {
    Matrix coherence_factor;    // F_ij = D_ij exp(i phi_ij)
    Matrix end_overlap_abs;     // |<alpha_j(T)|alpha_i(T)>|
    Matrix kappa_decay;         // exp(-(kappa~/2) int |alpha_i - alpha_j|^2 dt)
    std::array<Complex, 3> steady_amplitude{};
    std::array<Complex, 3> end_amplitude{};
    double separation01 = 0.0;  // kappa~ int |alpha_0 - alpha_1|^2 dt
    double separation02 = 0.0;
    bool projective = false;    // min separation >= snr_threshold
};

PointerAnalysis analyze_pointers(const ReadoutConfig& cfg);

// The measurement back-action channel. ideal_binary is {|0><0|, I - |0><0|}
// with outcomes +1/-1; ideal_ternary resolves all three levels with outcomes
// {+1, -1, -1}. general derives dephasing and phase from the pointer overlap
// integrals and projects onto the {0} vs {1,2} grouping once the integrated
// pointer separation clears the threshold; below it the channel is pure
// dephasing with no outcome record.
KrausChannel measurement_channel(const ReadoutConfig& cfg, ReadoutMode mode);

struct MeasurementRecord {
    double outcome_label;
    double amplitude;
    std::uint64_t shot_index;
};

struct SampledOutcome {
    MeasurementRecord record;
    DensityMatrix post_state;
};

// Draw an outcome with Born probabilities; force_outcome postselects the
// group with that label instead, and requesting a zero-probability branch
// is an error.
SampledOutcome sample_outcome(const ReadoutConfig& cfg, ReadoutMode mode,
                              const DensityMatrix& rho, Rng& rng,
                              std::uint64_t shot_index = 0,
                              std::optional<double> force_outcome = std::nullopt);

struct SpectrumPoint {
    double drive_frequency_mhz;
    Complex steady_amplitude;  // prepared state, no relaxation
    double mean_abs;           // decay-weighted amplitude over the window
};

// Steady-state transmission versus drive frequency for a qutrit prepared in
// state `prepared`. With relaxation the response mixes in lower-state
// Lorentzians weighted by the time each level is occupied during the window.
std::vector<SpectrumPoint> transmission_spectrum(
    const ReadoutConfig& cfg, int prepared, const std::vector<double>& freqs_mhz,
    bool include_relaxation = false,
    const std::optional<NoiseParams>& noise = std::nullopt);

// CSV columns: time_or_freq, then re, im, abs per state or curve.
void write_trajectory_csv(std::ostream& os, const PointerTrajectory& traj);
void write_spectrum_csv(std::ostream& os,
                        const std::vector<std::vector<SpectrumPoint>>& curves);

}  // namespace qutritlab

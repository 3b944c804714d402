#pragma once

#include <variant>

#include "qutritlab/channel.hpp"

namespace qutritlab {

// Intrinsic qutrit decoherence. Times in us, n_th dimensionless.
// T1_12 and T2_02 are model choices when not given:
//   T1_12 = T1_01 / 2 (matrix-element scaling of the decay rate), and
//   1/T2_02 = 1/T2_01 + 1/T2_12 - 1/(2 T1_01), floored at
//   max(1/T2_01, 1/T2_12). The implied pure-dephasing rate of rho_02 is then
//   clamped into the interval realizable by diagonal dephasing generators so
//   the channel stays completely positive for every valid parameter set.
struct NoiseParams {
    double t1_01_us;
    double t2_01_us;
    double t2_12_us;
    double n_th = 0.0;
    std::optional<double> t1_12_us;   // default t1_01 / 2
    std::optional<double> t2_02_us;   // default per the rule above

    void validate() const;
    double resolved_t1_12() const;
};

// Rotating-frame free evolution for a given duration. delta01/delta12 are the
// frame detunings of the two transitions in MHz; rho_02 precesses at their sum.
struct EvolutionSpec {
    double duration_us;
    double delta01_mhz = 0.0;
    double delta12_mhz = 0.0;
};

struct NoiseRates {
    double gamma10;  // 1 -> 0 decay, 1/us
    double gamma01;  // 0 -> 1 thermal excitation, 1/us
    double gamma21;  // 2 -> 1 decay, 1/us
    double phi01;    // pure dephasing of rho_01, 1/us
    double phi12;
    double phi02;
    double total02;  // full decay rate of rho_02 after clamping
};

NoiseRates noise_rates(const NoiseParams& p);

// Lindblad generator on column-major vec(rho), 9x9.
Matrix free_evolution_generator(const NoiseParams& p, double delta01_mhz,
                                double delta12_mhz);

Matrix free_evolution_superoperator(const NoiseParams& p, const EvolutionSpec& e);

KrausChannel free_evolution_channel(const NoiseParams& p, const EvolutionSpec& e);

// Generic Lindblad superoperator builder: -i[H, .] plus dissipators.
Matrix lindblad_superoperator(const Matrix& hamiltonian,
                              const std::vector<Matrix>& jump_ops);

struct TimelineStep {
    std::variant<KrausChannel, UnitaryMatrix> op;
    double duration_us = 0.0;
};

struct Timeline {
    KrausChannel channel;
    double total_duration_us;
};

// Left-to-right composition of the steps; first entry acts first.
Timeline interleave(const std::vector<TimelineStep>& steps, int dim = 3);

}  // namespace qutritlab

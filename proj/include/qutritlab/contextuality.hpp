#pragma once

#include "qutritlab/control.hpp"
#include "qutritlab/tomography.hpp"

namespace qutritlab {

// A_v = 2|v><v| - I, the +-1 observable of "is the system in |v>?".
struct BinaryObservable {
    Vector ray;
    Observable observable;

    static BinaryObservable from_ray(const Vector& v);
};

// A realizable measurement: unitary before, labeled device channel, unitary
// after. The effective channel conjugates every Kraus operator.
struct MeasurementProcedure {
    UnitaryMatrix pre;
    KrausChannel device;
    UnitaryMatrix post;
    std::optional<Vector> target_ray;  // the ray the procedure is meant to test

    KrausChannel effective() const;
};

// Degenerate projective measurement of |v> realized by sandwiching the
// ground-state binary measurement.
MeasurementProcedure ideal_binary_procedure(const Vector& v);

// Fully resolving ternary readout, relabeled to +-1 and sandwiched so that
// outcome +1 marks |v>.
MeasurementProcedure ternary_procedure(const Vector& v);

// Sandwich an arbitrary device channel (labels required) to test |v>.
MeasurementProcedure procedure_from_channel(const Vector& v, KrausChannel device);

enum class RecordWhich { record_first, record_second, record_product };

// Exact Born-rule expectation of the recorded value over both measurement
// branches; no sampling.
double sequential_expectation(const MeasurementProcedure& first,
                              const MeasurementProcedure& second,
                              const DensityMatrix& rho_b, RecordWhich which);

double sequential_expectation_sampled(const MeasurementProcedure& first,
                                      const MeasurementProcedure& second,
                                      const DensityMatrix& rho_b, RecordWhich which,
                                      std::uint64_t shots, Rng& rng);

struct EpsilonReport {
    double epsilon;
    int arg_state;          // index of the maximizing state, -1 in exact mode
    bool rays_orthogonal;   // precondition <u|v> = 0; violation is a warning
};

// max over the state set of
// |<A_u | A_u A_v> - <A_u | A_v A_u>|  (Born-rule enumeration).
EpsilonReport epsilon_uv(const MeasurementProcedure& u,
                         const MeasurementProcedure& v,
                         const std::vector<DensityMatrix>& state_set);

// The default ensemble: the nine preparation states plus seeded Haar samples.
std::vector<DensityMatrix> default_epsilon_ensemble(std::uint64_t seed,
                                                    int haar_samples = 1000);

// Global maximum over all states: spectral radius of the difference
// observable A_u^eff - E_v^dag(A_u^eff).
double epsilon_exact(const MeasurementProcedure& u, const MeasurementProcedure& v);

// Compatibility defect from a reconstructed process matrix, assuming perfect
// control pulses and perfect readout contrast: the recorded observables are
// the ideal A_u, only the back-action channel comes from chi.
EpsilonReport epsilon_from_process(const ProcessMatrix& chi_meas, const Vector& u_ray,
                                   const Vector& v_ray,
                                   const std::vector<DensityMatrix>& state_set);
double epsilon_from_process_exact(const ProcessMatrix& chi_meas, const Vector& u_ray,
                                  const Vector& v_ray);

}  // namespace qutritlab

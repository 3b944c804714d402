#pragma once

#include <variant>

#include "qutritlab/linalg.hpp"

namespace qutritlab {

// All frequencies are ordinary frequencies in MHz; times in us.

struct TransmonSpec {
    double ej_mhz;        // Josephson energy / h
    double ec_mhz;        // charging energy / h
    double ng = 0.0;      // offset charge
    int charge_cutoff = 20;  // basis |-N> .. |N>

    void validate() const;
};

struct QutritLevels {
    std::vector<double> omega_mhz;  // level frequencies, omega[0] = 0
    double alpha_mhz;               // anharmonicity, signed
    double f01_mhz;                 // primary transition

    // Constant-anharmonicity ladder omega_i = i f01 + alpha i(i-1)/2.
    static QutritLevels ladder(double f01_mhz, double alpha_mhz, int n_levels);
    static QutritLevels from_spectrum(std::vector<double> omega_mhz);
};

struct DeviceParams {
    double f_r_mhz;   // bare cavity frequency
    double g_mhz;     // coupling g01; g_{i,i+1} = sqrt(i+1) g
    std::variant<QutritLevels, TransmonSpec> levels;
    double kappa_mhz; // cavity linewidth
    int n_qutrit_levels = 6;
    int n_photons = 6;

    void validate() const;
    QutritLevels resolved_levels() const;
};

struct DispersiveShifts {
    std::vector<double> chi_partial_mhz;  // chi_{01}, chi_{12}, chi_{23}
    std::vector<double> stark_mhz;        // S_0, S_1, S_2
    double chi01_mhz;                     // (S_1 - S_0)/2
    double chi12_mhz;                     // (S_2 - S_1)/2
    double delta_mhz;
    bool dispersive_regime;               // |g/delta| < 0.3
};

// Charge-basis transmon diagonalization, shifted so omega_0 = 0. The cutoff
// is doubled until omega_2 moves by less than 1 kHz.
QutritLevels transmon_levels(const TransmonSpec& spec, int n_levels);

// Inverse problem: find (E_J, E_C) reproducing (f01, alpha) to 0.1 MHz.
TransmonSpec fit_transmon(double f01_mhz, double alpha_mhz);

// Second-order shifts: chi_{i,i+1} = (i+1) g^2 / (delta + i alpha).
DispersiveShifts dispersive_shifts_2nd_order(double g_mhz, double delta_mhz,
                                             double alpha_mhz);

// Factored closed form of the same quantity 2*chi12; used as the independent
// cross-check of the S-coefficient route.
double chi12_closed_form(double g_mhz, double delta_mhz, double alpha_mhz);

// Generalized Jaynes-Cummings Hamiltonian in the |i> (x) |n> basis,
// in MHz. Couplings g_{i,i+1} sqrt(n+1) between |i,n+1> and |i+1,n>.
Matrix jc_hamiltonian(const DeviceParams& params);

struct DressedPulls {
    std::vector<double> pull_mhz;  // per qutrit state i = 0..2
    double chi01_mhz;              // (pull_1 - pull_0)/2
    double chi12_mhz;              // (pull_2 - pull_1)/2
};

// Exact per-state cavity pulls from the dressed spectrum, labeled by
// maximum-overlap assignment to the bare basis.
DressedPulls dressed_cavity_pull(const DeviceParams& params);

enum class SweetSpotMode { second_order, exact };

struct SweetSpot {
    double delta_mhz;
    double f01_mhz;
};

// Root of chi12(delta) over the bracket. Second-order mode returns
// delta = alpha analytically.
SweetSpot find_sweet_spot(const DeviceParams& params, double delta_lo_mhz,
                          double delta_hi_mhz,
                          SweetSpotMode mode = SweetSpotMode::exact,
                          double tol_mhz = 1e-9);

// chi12 at a given detuning with the device's alpha, either route.
double chi12_at_detuning(const DeviceParams& params, double delta_mhz,
                         SweetSpotMode mode);

}  // namespace qutritlab

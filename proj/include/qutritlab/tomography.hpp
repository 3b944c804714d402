#pragma once

#include "qutritlab/channel.hpp"
#include "qutritlab/control.hpp"

namespace qutritlab {

// Orthonormal Hermitian operator basis under the Hilbert-Schmidt inner
// product: index 0 is I/sqrt(d), then for each pair j < k the symmetric and
// antisymmetric (Gell-Mann style) elements, then the d-1 diagonal elements.
std::vector<Matrix> hermitian_basis(int dim);

// Real expansion coefficients of a Hermitian matrix in that basis.
RealVector hermitian_coeffs(const Matrix& m, const std::vector<Matrix>& basis);
Matrix from_hermitian_coeffs(const RealVector& c, const std::vector<Matrix>& basis);

// Measurement design for state tomography. Row k is the basis expansion of
// the effect U_k O U_k^dag: the k-th measurement rotates the target basis
// state onto the readout axis (the applied pulse sequence is the inverse of
// the basis-defining sequence) and reads out O.
struct TomographyDesign {
    TomographySet sequences;
    std::vector<Matrix> effects;
    RealMatrix matrix;  // rows x d^2
    int rank;
    double rank_threshold;
};

TomographyDesign build_design(const TomographySet& set, const Observable& obs);
// POVM variant: one row per (sequence, effect).
TomographyDesign build_design(const TomographySet& set,
                              const std::vector<Observable>& effects);

struct Completeness {
    bool complete;
    int rank;
    std::vector<Matrix> null_witnesses;  // span of the unobservable subspace
};

Completeness completeness(const TomographyDesign& design);

struct MleOptions {
    int max_iterations = 10000;
    double grad_tol = 1e-8;
    bool binomial = false;        // binomial likelihood in +-1 outcome counts
    double shots_per_row = 0.0;   // required for binomial mode
    bool fit_scale_offset = false;  // co-fit record scale and offset
};

struct MleResult {
    DensityMatrix state;
    double residual;      // rms record misfit at the optimum
    int iterations;
    bool converged;       // gradient mapping below tolerance (else the
                          // iteration cap stopped the run)
    double scale = 1.0;   // fitted nuisance parameters when enabled
    double offset = 0.0;
};

// Maximum-likelihood state reconstruction by projected gradient over
// {rho PSD, tr rho = 1}. Gaussian likelihood in the averaged record by
// default.
MleResult mle_state(const TomographyDesign& design, const RealVector& records,
                    const MleOptions& opts = MleOptions{});

// Process matrix in the hermitian_basis(dim) ordering.
struct ProcessMatrix {
    Matrix chi;  // d^2 x d^2, Hermitian PSD, trace d for a TP channel
    int dim;
};

ProcessMatrix ideal_process_matrix(const KrausChannel& ch);
KrausChannel channel_from_process(const ProcessMatrix& chi);

DensityMatrix apply_process(const ProcessMatrix& chi, const DensityMatrix& rho);
// Heisenberg picture: A -> sum_mn chi_mn B_n^dag A B_m.
Matrix apply_process_adjoint(const ProcessMatrix& chi, const Matrix& a);

struct ProcessMleResult {
    ProcessMatrix chi;
    double residual;
    int iterations;
};

// Reconstruct chi from per-preparation tomography records.
// records(p, k) is the averaged record of design row k on the channel output
// for preparation p. PSD and trace preservation are enforced by alternating
// projections inside the gradient loop.
ProcessMleResult mle_process(const std::vector<DensityMatrix>& preps,
                             const TomographyDesign& design,
                             const RealMatrix& records,
                             const MleOptions& opts = MleOptions{});

// Variant fitting already-reconstructed channel outputs.
ProcessMleResult mle_process_from_outputs(const std::vector<DensityMatrix>& preps,
                                          const std::vector<DensityMatrix>& outputs,
                                          const MleOptions& opts = MleOptions{});

// F = (1/d^2) [Tr sqrt(sqrt(chi_a) chi_b sqrt(chi_a))]^2.
double process_fidelity(const ProcessMatrix& a, const ProcessMatrix& b);

}  // namespace qutritlab

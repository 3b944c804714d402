#pragma once

#include <optional>

#include "qutritlab/states.hpp"

namespace qutritlab {

// Completely positive trace-preserving map given by Kraus operators.
// Optional outcome labels attach a recorded value to each operator;
// operators sharing a label form one outcome group.
class KrausChannel {
public:
    explicit KrausChannel(std::vector<Matrix> ops,
                          std::optional<std::vector<double>> labels = std::nullopt);

    static KrausChannel identity(int dim);

    int dim() const { return dim_; }
    const std::vector<Matrix>& kraus_ops() const { return ops_; }
    bool has_labels() const { return labels_.has_value(); }
    const std::vector<double>& labels() const;

    struct OutcomeGroup {
        double label;
        std::vector<int> op_indices;
    };
    // Groups in first-appearance order; a single unlabeled group otherwise.
    std::vector<OutcomeGroup> outcome_groups() const;

private:
    int dim_;
    std::vector<Matrix> ops_;
    std::optional<std::vector<double>> labels_;
};

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho);

struct MeasurementBranch {
    double label;
    double probability;
    Matrix post_state;  // normalized when probability > 1e-15, zero otherwise
};

// Born probabilities and conditional post states, one entry per outcome group.
std::vector<MeasurementBranch> measure_branches(const KrausChannel& ch,
                                                const DensityMatrix& rho);

// Heisenberg-picture observable Sum_g label_g Sum_{i in g} K_i^dag A K_i for
// the trivial A = I, i.e. the operator whose expectation is the mean recorded
// value. Requires labels.
Matrix recorded_observable(const KrausChannel& ch);

// Superoperator acting on column-major vec(rho).
Matrix superoperator(const KrausChannel& ch);
Matrix superoperator_of_unitary(const Matrix& u);

Matrix choi_matrix(const KrausChannel& ch);
Matrix choi_from_superoperator(const Matrix& s, int dim);
std::vector<Matrix> kraus_from_choi(const Matrix& choi, double clip_tol = 1e-12);
KrausChannel channel_from_superoperator(const Matrix& s, int dim);

// later(earlier(rho))
KrausChannel compose(const KrausChannel& later, const KrausChannel& earlier);

// later(earlier(rho)) with the earlier channel's outcome labels distributed
// over the product operators, so per-outcome branches survive composition.
KrausChannel compose_keep_labels(const KrausChannel& later,
                                 const KrausChannel& earlier);

// CP (Choi PSD to psd_tol) and TP (to kTracePreservingTol).
bool is_cptp(const KrausChannel& ch, double psd_tol = 1e-9);

}  // namespace qutritlab

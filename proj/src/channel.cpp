#include "qutritlab/channel.hpp"

#include <algorithm>
#include <cmath>

namespace qutritlab {

KrausChannel::KrausChannel(std::vector<Matrix> ops,
                           std::optional<std::vector<double>> labels)
    : ops_(std::move(ops)), labels_(std::move(labels)) {
    if (ops_.empty()) {
        throw std::invalid_argument("KrausChannel: no Kraus operators");
    }
    dim_ = static_cast<int>(ops_.front().cols());
    for (const Matrix& k : ops_) {
        if (k.rows() != dim_ || k.cols() != dim_) {
            throw std::invalid_argument("KrausChannel: inconsistent operator shape");
        }
    }
    Matrix sum = Matrix::Zero(dim_, dim_);
    for (const Matrix& k : ops_) sum += k.adjoint() * k;
    if (!approx_equal(sum, Matrix::Identity(dim_, dim_), kTracePreservingTol)) {
        throw std::invalid_argument(
            "KrausChannel: sum K^dag K deviates from identity beyond tolerance");
    }
    if (labels_ && labels_->size() != ops_.size()) {
        throw std::invalid_argument("KrausChannel: one label per operator required");
    }
}

KrausChannel KrausChannel::identity(int dim) {
    return KrausChannel({Matrix::Identity(dim, dim)});
}

const std::vector<double>& KrausChannel::labels() const {
    if (!labels_) throw std::logic_error("KrausChannel: no outcome labels set");
    return *labels_;
}

std::vector<KrausChannel::OutcomeGroup> KrausChannel::outcome_groups() const {
    std::vector<OutcomeGroup> groups;
    if (!labels_) {
        OutcomeGroup g{0.0, {}};
        for (int i = 0; i < static_cast<int>(ops_.size()); ++i) {
            g.op_indices.push_back(i);
        }
        groups.push_back(std::move(g));
        return groups;
    }
    for (int i = 0; i < static_cast<int>(ops_.size()); ++i) {
        double label = (*labels_)[i];
        auto it = std::find_if(groups.begin(), groups.end(), [&](const OutcomeGroup& g) {
            return g.label == label;
        });
        if (it == groups.end()) {
            groups.push_back(OutcomeGroup{label, {i}});
        } else {
            it->op_indices.push_back(i);
        }
    }
    return groups;
}

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho) {
    if (ch.dim() != rho.dim()) {
        throw std::invalid_argument("apply_channel: dimension mismatch");
    }
    Matrix out = Matrix::Zero(ch.dim(), ch.dim());
    for (const Matrix& k : ch.kraus_ops()) {
        out += k * rho.matrix() * k.adjoint();
    }
    out = 0.5 * (out + out.adjoint());
    return DensityMatrix(out);
}

std::vector<MeasurementBranch> measure_branches(const KrausChannel& ch,
                                                const DensityMatrix& rho) {
    if (ch.dim() != rho.dim()) {
        throw std::invalid_argument("measure_branches: dimension mismatch");
    }
    std::vector<MeasurementBranch> branches;
    for (const auto& group : ch.outcome_groups()) {
        Matrix acc = Matrix::Zero(ch.dim(), ch.dim());
        for (int idx : group.op_indices) {
            const Matrix& k = ch.kraus_ops()[idx];
            acc += k * rho.matrix() * k.adjoint();
        }
        double p = acc.trace().real();
        Matrix post = Matrix::Zero(ch.dim(), ch.dim());
        if (p > 1e-15) post = 0.5 * (acc + acc.adjoint()) / p;
        branches.push_back(MeasurementBranch{group.label, std::max(0.0, p), post});
    }
    return branches;
}

Matrix recorded_observable(const KrausChannel& ch) {
    Matrix out = Matrix::Zero(ch.dim(), ch.dim());
    const std::vector<double>& labels = ch.labels();
    for (int i = 0; i < static_cast<int>(ch.kraus_ops().size()); ++i) {
        const Matrix& k = ch.kraus_ops()[i];
        out += labels[i] * (k.adjoint() * k);
    }
    return out;
}

Matrix superoperator(const KrausChannel& ch) {
    const int d = ch.dim();
    Matrix s = Matrix::Zero(d * d, d * d);
    for (const Matrix& k : ch.kraus_ops()) {
        s += tensor(k.conjugate(), k);
    }
    return s;
}

Matrix superoperator_of_unitary(const Matrix& u) {
    return tensor(u.conjugate(), u);
}

Matrix choi_matrix(const KrausChannel& ch) {
    const int d = ch.dim();
    Matrix c = Matrix::Zero(d * d, d * d);
    for (const Matrix& k : ch.kraus_ops()) {
        Vector v = vectorize(k);
        c += v * v.adjoint();
    }
    return c;
}

Matrix choi_from_superoperator(const Matrix& s, int dim) {
    // choi[(i + d j), (i' + d j')] = s[(i' d + i), (j' d + j)]
    Matrix c(dim * dim, dim * dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            for (int ip = 0; ip < dim; ++ip) {
                for (int jp = 0; jp < dim; ++jp) {
                    c(i + dim * j, ip + dim * jp) = s(ip * dim + i, jp * dim + j);
                }
            }
        }
    }
    return c;
}

std::vector<Matrix> kraus_from_choi(const Matrix& choi, double clip_tol) {
    const int d2 = static_cast<int>(choi.rows());
    const int d = static_cast<int>(std::lround(std::sqrt(double(d2))));
    if (d * d != d2) {
        throw std::invalid_argument("kraus_from_choi: not a d^2 x d^2 matrix");
    }
    EigResult eig = eig_hermitian(0.5 * (choi + choi.adjoint()));
    double scale = std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
    std::vector<Matrix> ops;
    for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
        double lambda = eig.eigenvalues[k];
        if (lambda <= clip_tol * scale) continue;
        ops.push_back(std::sqrt(lambda) * unvectorize(eig.eigenvectors.col(k), d, d));
    }
    if (ops.empty()) {
        throw std::runtime_error("kraus_from_choi: channel has no positive weight");
    }
    return ops;
}

KrausChannel channel_from_superoperator(const Matrix& s, int dim) {
    return KrausChannel(kraus_from_choi(choi_from_superoperator(s, dim)));
}

KrausChannel compose(const KrausChannel& later, const KrausChannel& earlier) {
    if (later.dim() != earlier.dim()) {
        throw std::invalid_argument("compose: dimension mismatch");
    }
    Matrix s = superoperator(later) * superoperator(earlier);
    return channel_from_superoperator(s, later.dim());
}

KrausChannel compose_keep_labels(const KrausChannel& later,
                                 const KrausChannel& earlier) {
    if (later.dim() != earlier.dim()) {
        throw std::invalid_argument("compose_keep_labels: dimension mismatch");
    }
    std::vector<Matrix> ops;
    std::vector<double> labels;
    const auto& early_labels = earlier.labels();
    for (size_t i = 0; i < earlier.kraus_ops().size(); ++i) {
        for (const Matrix& l : later.kraus_ops()) {
            ops.push_back(l * earlier.kraus_ops()[i]);
            labels.push_back(early_labels[i]);
        }
    }
    return KrausChannel(std::move(ops), std::move(labels));
}

bool is_cptp(const KrausChannel& ch, double psd_tol) {
    Matrix choi = choi_matrix(ch);
    EigResult eig = eig_hermitian(0.5 * (choi + choi.adjoint()));
    if (eig.eigenvalues.minCoeff() < -psd_tol) return false;
    Matrix tp = partial_trace(choi, ch.dim(), ch.dim(), 1);
    return approx_equal(tp, Matrix::Identity(ch.dim(), ch.dim()), kTracePreservingTol);
}

}  // namespace qutritlab

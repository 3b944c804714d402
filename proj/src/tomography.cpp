#include "qutritlab/tomography.hpp"

#include <algorithm>
#include <cmath>

namespace qutritlab {

std::vector<Matrix> hermitian_basis(int dim) {
    std::vector<Matrix> basis;
    basis.reserve(static_cast<size_t>(dim) * dim);
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(dim));
    basis.push_back(inv_sqrt_d * Matrix::Identity(dim, dim));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < dim; ++j) {
        for (int k = j + 1; k < dim; ++k) {
            Matrix sym = Matrix::Zero(dim, dim);
            sym(j, k) = inv_sqrt2;
            sym(k, j) = inv_sqrt2;
            basis.push_back(sym);
            Matrix asym = Matrix::Zero(dim, dim);
            asym(j, k) = Complex(0.0, -inv_sqrt2);
            asym(k, j) = Complex(0.0, inv_sqrt2);
            basis.push_back(asym);
        }
    }
    for (int l = 1; l < dim; ++l) {
        Matrix diag = Matrix::Zero(dim, dim);
        const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        for (int j = 0; j < l; ++j) diag(j, j) = norm;
        diag(l, l) = -static_cast<double>(l) * norm;
        basis.push_back(diag);
    }
    return basis;
}

RealVector hermitian_coeffs(const Matrix& m, const std::vector<Matrix>& basis) {
    RealVector c(basis.size());
    for (size_t a = 0; a < basis.size(); ++a) {
        c[static_cast<Eigen::Index>(a)] = (basis[a] * m).trace().real();
    }
    return c;
}

Matrix from_hermitian_coeffs(const RealVector& c, const std::vector<Matrix>& basis) {
    Matrix m = Matrix::Zero(basis.front().rows(), basis.front().cols());
    for (size_t a = 0; a < basis.size(); ++a) {
        m += c[static_cast<Eigen::Index>(a)] * basis[a];
    }
    return m;
}

namespace {

constexpr double kRankThreshold = 1e-8;

TomographyDesign build_design_impl(const TomographySet& set,
                                   const std::vector<Matrix>& observables) {
    TomographyDesign design;
    design.sequences = set;
    const auto basis = hermitian_basis(3);
    for (const PulseSequence& seq : set.sequences) {
        Matrix u = compile_sequence(seq).matrix();
        for (const Matrix& o : observables) {
            design.effects.push_back(u * o * u.adjoint());
        }
    }
    design.matrix.resize(static_cast<Eigen::Index>(design.effects.size()),
                         static_cast<Eigen::Index>(basis.size()));
    for (size_t r = 0; r < design.effects.size(); ++r) {
        design.matrix.row(static_cast<Eigen::Index>(r)) =
            hermitian_coeffs(design.effects[r], basis).transpose();
    }
    Eigen::JacobiSVD<RealMatrix> svd(design.matrix);
    double top = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    design.rank_threshold = kRankThreshold * std::max(top, 1e-300);
    design.rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()[i] > design.rank_threshold) ++design.rank;
    }
    return design;
}

// Project a real vector onto the probability simplex (Duchi et al.).
RealVector project_simplex(const RealVector& v) {
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cssv = 0.0;
    double theta = 0.0;
    int rho = 0;
    double acc = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        acc += u[i];
        double t = (acc - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            rho = static_cast<int>(i + 1);
            cssv = acc;
        }
    }
    theta = (cssv - 1.0) / std::max(1, rho);
    RealVector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out[i] = std::max(0.0, v[i] - theta);
    }
    return out;
}

// Projection onto {rho PSD, tr rho = 1} in Frobenius norm.
Matrix project_density(const Matrix& m) {
    EigResult eig = eig_hermitian(0.5 * (m + m.adjoint()));
    RealVector lam = project_simplex(eig.eigenvalues);
    return eig.eigenvectors * lam.asDiagonal() * eig.eigenvectors.adjoint();
}

double largest_eigenvalue(const RealMatrix& sym) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(sym);
    return solver.eigenvalues().maxCoeff();
}

struct Likelihood {
    const RealMatrix& a;
    const RealVector& b;
    bool binomial;
    double shots;

    double objective(const RealVector& x) const {
        RealVector m = a * x;
        if (!binomial) {
            return 0.5 * (m - b).squaredNorm();
        }
        double nll = 0.0;
        for (Eigen::Index k = 0; k < m.size(); ++k) {
            double p = std::clamp(0.5 * (1.0 + m[k]), 1e-12, 1.0 - 1e-12);
            double nplus = shots * 0.5 * (1.0 + b[k]);
            double nminus = shots - nplus;
            nll -= nplus * std::log(p) + nminus * std::log(1.0 - p);
        }
        return nll;
    }

    RealVector gradient(const RealVector& x) const {
        RealVector m = a * x;
        if (!binomial) {
            return a.transpose() * (m - b);
        }
        RealVector g(m.size());
        for (Eigen::Index k = 0; k < m.size(); ++k) {
            double p = std::clamp(0.5 * (1.0 + m[k]), 1e-12, 1.0 - 1e-12);
            double nplus = shots * 0.5 * (1.0 + b[k]);
            double nminus = shots - nplus;
            g[k] = -0.5 * (nplus / p - nminus / (1.0 - p));
        }
        return a.transpose() * g;
    }
};

}  // namespace

TomographyDesign build_design(const TomographySet& set, const Observable& obs) {
    return build_design_impl(set, {obs.matrix()});
}

TomographyDesign build_design(const TomographySet& set,
                              const std::vector<Observable>& effects) {
    std::vector<Matrix> mats;
    mats.reserve(effects.size());
    for (const Observable& o : effects) mats.push_back(o.matrix());
    return build_design_impl(set, mats);
}

Completeness completeness(const TomographyDesign& design) {
    Completeness out;
    out.rank = design.rank;
    out.complete = design.rank == 9;
    if (!out.complete) {
        const auto basis = hermitian_basis(3);
        Eigen::JacobiSVD<RealMatrix> svd(design.matrix, Eigen::ComputeFullV);
        for (Eigen::Index i = design.rank; i < 9; ++i) {
            out.null_witnesses.push_back(
                from_hermitian_coeffs(svd.matrixV().col(i), basis));
        }
    }
    return out;
}

MleResult mle_state(const TomographyDesign& design, const RealVector& records,
                    const MleOptions& opts) {
    if (design.rank < 9) {
        throw std::invalid_argument(
            "mle_state: design is tomographically incomplete (rank " +
            std::to_string(design.rank) + ")");
    }
    if (records.size() != design.matrix.rows()) {
        throw std::invalid_argument("mle_state: one record per design row required");
    }
    if (opts.binomial && opts.shots_per_row <= 0.0) {
        throw std::invalid_argument("mle_state: binomial mode needs shots_per_row");
    }
    const auto basis = hermitian_basis(3);

    double scale = 1.0, offset = 0.0;
    RealVector target = records;

    if (opts.fit_scale_offset) {
        // One-shot linear calibration of the record units before the MLE.
        // When the constant vector lies in the design row space (it does for
        // the standard nine-row design, via sigma = -I), the contrast/offset
        // pair is only identifiable up to an identity-direction gauge; the
        // minimum-norm solution fixes that gauge deterministically.
        RealMatrix aug(design.matrix.rows(), 10);
        aug.leftCols(9) = design.matrix;
        aug.col(9).setOnes();
        RealVector w =
            aug.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(records);
        double a0 = w[0] * std::sqrt(3.0);
        if (std::abs(a0) > 1e-9) {
            scale = a0;
            offset = w[9];
            target = (records.array() - offset) / scale;
        }
    }

    const int outer_rounds = opts.fit_scale_offset ? 60 : 1;
    RealVector x = hermitian_coeffs(Matrix::Identity(3, 3) / 3.0, basis);
    int total_iters = 0;
    bool converged = false;

    for (int round = 0; round < outer_rounds; ++round) {
        Likelihood lik{design.matrix, target, opts.binomial, opts.shots_per_row};
        const double lipschitz =
            std::max(1e-12, largest_eigenvalue(design.matrix.transpose() *
                                               design.matrix)) *
            (opts.binomial ? 0.5 * opts.shots_per_row : 1.0);
        double eta = 1.0 / lipschitz;
        double f = lik.objective(x);
        converged = false;
        for (int it = 0; it < opts.max_iterations; ++it) {
            ++total_iters;
            RealVector g = lik.gradient(x);
            double step = eta;
            RealVector xn;
            double fn = 0.0;
            for (int bt = 0; bt < 60; ++bt) {
                Matrix cand =
                    project_density(from_hermitian_coeffs(x - step * g, basis));
                xn = hermitian_coeffs(cand, basis);
                fn = lik.objective(xn);
                if (fn <= f + 1e-15 * std::abs(f)) break;
                step *= 0.5;
            }
            double move = (xn - x).norm() / step;
            x = xn;
            f = fn;
            if (move < opts.grad_tol) {
                converged = true;
                break;
            }
        }
        if (opts.fit_scale_offset) {
            // Linear least squares for (scale, offset) given the current model.
            RealVector m = design.matrix * x;
            double n = static_cast<double>(m.size());
            double smm = m.squaredNorm(), sm = m.sum();
            double smr = m.dot(records), sr = records.sum();
            double det = smm * n - sm * sm;
            if (std::abs(det) > 1e-12) {
                double new_scale = (smr * n - sm * sr) / det;
                double new_offset = (smm * sr - sm * smr) / det;
                if (std::abs(new_scale) > 1e-9) {
                    double change = std::abs(new_scale - scale) +
                                    std::abs(new_offset - offset);
                    scale = new_scale;
                    offset = new_offset;
                    target = (records.array() - offset) / scale;
                    if (converged && change < 1e-12) break;
                }
            }
        }
    }

    double res = (scale * (design.matrix * x).array() + offset -
                  records.array())
                     .matrix()
                     .norm() /
                 std::sqrt(static_cast<double>(records.size()));
    return MleResult{DensityMatrix(project_density(from_hermitian_coeffs(x, basis))),
                     res, total_iters, converged, scale, offset};
}

ProcessMatrix ideal_process_matrix(const KrausChannel& ch) {
    const int d = ch.dim();
    const auto basis = hermitian_basis(d);
    const int d2 = d * d;
    Matrix chi = Matrix::Zero(d2, d2);
    for (const Matrix& k : ch.kraus_ops()) {
        Vector c(d2);
        for (int m = 0; m < d2; ++m) c[m] = (basis[m] * k).trace();
        chi += c * c.adjoint();
    }
    return ProcessMatrix{chi, d};
}

KrausChannel channel_from_process(const ProcessMatrix& chi) {
    const auto basis = hermitian_basis(chi.dim);
    EigResult eig = eig_hermitian(0.5 * (chi.chi + chi.chi.adjoint()));
    std::vector<Matrix> ops;
    double scale = std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
        if (eig.eigenvalues[k] <= 1e-12 * scale) continue;
        Matrix op = Matrix::Zero(chi.dim, chi.dim);
        for (size_t m = 0; m < basis.size(); ++m) {
            op += eig.eigenvectors(static_cast<Eigen::Index>(m), k) * basis[m];
        }
        ops.push_back(std::sqrt(eig.eigenvalues[k]) * op);
    }
    return KrausChannel(std::move(ops));
}

DensityMatrix apply_process(const ProcessMatrix& chi, const DensityMatrix& rho) {
    const auto basis = hermitian_basis(chi.dim);
    const int d2 = chi.dim * chi.dim;
    Matrix out = Matrix::Zero(chi.dim, chi.dim);
    for (int m = 0; m < d2; ++m) {
        Matrix left = basis[m] * rho.matrix();
        for (int n = 0; n < d2; ++n) {
            Complex w = chi.chi(m, n);
            if (std::abs(w) < 1e-300) continue;
            out += w * left * basis[n];
        }
    }
    out = 0.5 * (out + out.adjoint());
    return DensityMatrix(out);
}

Matrix apply_process_adjoint(const ProcessMatrix& chi, const Matrix& a) {
    const auto basis = hermitian_basis(chi.dim);
    const int d2 = chi.dim * chi.dim;
    Matrix out = Matrix::Zero(chi.dim, chi.dim);
    for (int m = 0; m < d2; ++m) {
        for (int n = 0; n < d2; ++n) {
            Complex w = chi.chi(m, n);
            if (std::abs(w) < 1e-300) continue;
            out += w * basis[n] * a * basis[m];
        }
    }
    return out;
}

namespace {

struct ProcessFit {
    RealMatrix design;          // rows x 81 real
    RealVector records;
    RealMatrix tp_constraint;   // 9 x 81
    RealVector tp_target;       // coeffs of identity
    std::vector<Matrix> basis9;
    std::vector<Matrix> basis3;
};

ProcessFit assemble_process_fit(const std::vector<DensityMatrix>& preps,
                                const std::vector<Matrix>& effects,
                                const RealMatrix& records) {
    if (preps.size() < 9) {
        throw std::invalid_argument("mle_process: need at least nine preparations");
    }
    ProcessFit fit;
    fit.basis9 = hermitian_basis(9);
    fit.basis3 = hermitian_basis(3);

    // Preparations must span the operator space.
    RealMatrix prep_coeffs(preps.size(), 9);
    for (size_t p = 0; p < preps.size(); ++p) {
        prep_coeffs.row(static_cast<Eigen::Index>(p)) =
            hermitian_coeffs(preps[p].matrix(), fit.basis3).transpose();
    }
    Eigen::JacobiSVD<RealMatrix> svd(prep_coeffs);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()[i] > kRankThreshold * svd.singularValues()[0]) {
            ++rank;
        }
    }
    if (rank < 9) {
        throw std::invalid_argument(
            "mle_process: preparation set is rank-deficient (rank " +
            std::to_string(rank) + ")");
    }

    const Eigen::Index rows =
        static_cast<Eigen::Index>(preps.size() * effects.size());
    if (records.rows() != static_cast<Eigen::Index>(preps.size()) ||
        records.cols() != static_cast<Eigen::Index>(effects.size())) {
        throw std::invalid_argument("mle_process: records shape mismatch");
    }

    // T[row, m + 9n] = Tr[E_k B_m rho_p B_n^dag]
    Matrix t(rows, 81);
    Eigen::Index row = 0;
    for (size_t p = 0; p < preps.size(); ++p) {
        for (size_t k = 0; k < effects.size(); ++k, ++row) {
            for (int m = 0; m < 9; ++m) {
                Matrix left = fit.basis3[m] * preps[p].matrix();
                for (int n = 0; n < 9; ++n) {
                    t(row, m + 9 * n) =
                        (effects[k] * left * fit.basis3[n]).trace();
                }
            }
        }
    }
    // Real design in the Hermitian chi parametrization chi = sum_a y_a G_a.
    Matrix gmat(81, 81);
    for (int a = 0; a < 81; ++a) {
        const Matrix& g = fit.basis9[a];
        for (int m = 0; m < 9; ++m) {
            for (int n = 0; n < 9; ++n) {
                gmat(m + 9 * n, a) = g(m, n);
            }
        }
    }
    fit.design = (t * gmat).real();

    fit.records.resize(rows);
    row = 0;
    for (size_t p = 0; p < preps.size(); ++p) {
        for (size_t k = 0; k < effects.size(); ++k, ++row) {
            fit.records[row] = records(static_cast<Eigen::Index>(p),
                                       static_cast<Eigen::Index>(k));
        }
    }

    // Trace-preservation constraint sum_mn chi_mn B_n^dag B_m = I as a
    // real-linear map of y.
    fit.tp_constraint.resize(9, 81);
    for (int a = 0; a < 81; ++a) {
        const Matrix& g = fit.basis9[a];
        Matrix acc = Matrix::Zero(3, 3);
        for (int m = 0; m < 9; ++m) {
            for (int n = 0; n < 9; ++n) {
                Complex w = g(m, n);
                if (std::abs(w) < 1e-300) continue;
                acc += w * fit.basis3[n].adjoint() * fit.basis3[m];
            }
        }
        acc = 0.5 * (acc + acc.adjoint());
        fit.tp_constraint.col(a) = hermitian_coeffs(acc, fit.basis3);
    }
    fit.tp_target = hermitian_coeffs(Matrix::Identity(3, 3), fit.basis3);
    return fit;
}

ProcessMleResult run_process_fit(const ProcessFit& fit, const MleOptions& opts) {
    const RealMatrix& a = fit.design;
    const RealVector& b = fit.records;

    RealMatrix ct = fit.tp_constraint.transpose();
    Eigen::LLT<RealMatrix> cct(fit.tp_constraint * ct);
    auto project_tp = [&](const RealVector& y) {
        RealVector violation = fit.tp_constraint * y - fit.tp_target;
        return RealVector(y - ct * cct.solve(violation));
    };
    auto project_psd = [&](const RealVector& y) {
        Matrix chi = from_hermitian_coeffs(y, fit.basis9);
        EigResult eig = eig_hermitian(0.5 * (chi + chi.adjoint()));
        RealVector lam = eig.eigenvalues.cwiseMax(0.0);
        Matrix clipped =
            eig.eigenvectors * lam.asDiagonal() * eig.eigenvectors.adjoint();
        return hermitian_coeffs(clipped, fit.basis9);
    };

    // Start from the fully depolarizing channel (chi = I/3, TP and PSD).
    RealVector y =
        hermitian_coeffs(Matrix::Identity(9, 9) / 3.0, fit.basis9);
    y = project_tp(y);

    const double lipschitz =
        std::max(1e-12, largest_eigenvalue(a.transpose() * a));
    const double eta = 1.0 / lipschitz;
    double fprev = 0.5 * (a * y - b).squaredNorm();
    int iters = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        ++iters;
        RealVector g = a.transpose() * (a * y - b);
        RealVector yn = y - eta * g;
        yn = project_psd(project_tp(project_psd(yn)));
        double move = (yn - y).norm() / eta;
        y = yn;
        double f = 0.5 * (a * y - b).squaredNorm();
        if (move < opts.grad_tol && std::abs(fprev - f) < 1e-16 + 1e-12 * f) {
            break;
        }
        fprev = f;
    }
    // Land on the constraint set to the published tolerances.
    for (int polish = 0; polish < 200; ++polish) {
        RealVector yt = project_tp(y);
        RealVector yp = project_psd(yt);
        if ((yp - y).norm() < 1e-12) {
            y = yp;
            break;
        }
        y = yp;
    }
    y = project_tp(y);

    Matrix chi = from_hermitian_coeffs(y, fit.basis9);
    double res = (a * y - b).norm() / std::sqrt(static_cast<double>(b.size()));
    return ProcessMleResult{ProcessMatrix{chi, 3}, res, iters};
}

}  // namespace

ProcessMleResult mle_process(const std::vector<DensityMatrix>& preps,
                             const TomographyDesign& design,
                             const RealMatrix& records, const MleOptions& opts) {
    if (design.rank < 9) {
        throw std::invalid_argument("mle_process: incomplete tomography design");
    }
    ProcessFit fit = assemble_process_fit(preps, design.effects, records);
    return run_process_fit(fit, opts);
}

ProcessMleResult mle_process_from_outputs(const std::vector<DensityMatrix>& preps,
                                          const std::vector<DensityMatrix>& outputs,
                                          const MleOptions& opts) {
    if (outputs.size() != preps.size()) {
        throw std::invalid_argument(
            "mle_process_from_outputs: one output per preparation");
    }
    const auto basis3 = hermitian_basis(3);
    RealMatrix records(preps.size(), 9);
    for (size_t p = 0; p < outputs.size(); ++p) {
        records.row(static_cast<Eigen::Index>(p)) =
            hermitian_coeffs(outputs[p].matrix(), basis3).transpose();
    }
    ProcessFit fit = assemble_process_fit(preps, basis3, records);
    return run_process_fit(fit, opts);
}

double process_fidelity(const ProcessMatrix& a, const ProcessMatrix& b) {
    if (a.dim != b.dim || a.chi.rows() != b.chi.rows()) {
        throw std::invalid_argument("process_fidelity: basis mismatch");
    }
    Matrix ra = matrix_sqrt_psd(a.chi);
    Matrix inner = matrix_sqrt_psd(ra * b.chi * ra);
    double tr = inner.trace().real();
    const double d2 = static_cast<double>(a.dim * a.dim);
    return tr * tr / d2;
}

}  // namespace qutritlab

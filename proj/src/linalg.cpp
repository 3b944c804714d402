#include "qutritlab/linalg.hpp"

#include <cmath>

namespace qutritlab {

bool approx_equal(const Matrix& a, const Matrix& b, double atol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return ((a - b).cwiseAbs().maxCoeff() <= atol);
}

bool is_hermitian(const Matrix& m, double atol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= atol;
}

EigResult eig_hermitian(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("eig_hermitian: matrix is not square");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (!is_hermitian(m, 1e-9 * scale)) {
        throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
    }
    Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
    }
    return EigResult{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix matrix_sqrt_psd(const Matrix& m) {
    EigResult eig = eig_hermitian(m);
    const double scale = std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
    RealVector roots(eig.eigenvalues.size());
    for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
        double lambda = eig.eigenvalues[k];
        if (lambda < kNegEigenvalueError * scale) {
            throw std::invalid_argument(
                "matrix_sqrt_psd: eigenvalue " + std::to_string(lambda) +
                " is significantly negative");
        }
        roots[k] = std::sqrt(std::max(lambda, 0.0));
    }
    return eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
}

Matrix tensor(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix partial_trace(const Matrix& m, int dim_a, int dim_b, int which) {
    if (m.rows() != m.cols() || m.rows() != static_cast<Eigen::Index>(dim_a) * dim_b) {
        throw std::invalid_argument("partial_trace: dimension mismatch");
    }
    if (which != 0 && which != 1) {
        throw std::invalid_argument("partial_trace: which must be 0 or 1");
    }
    if (which == 1) {
        Matrix out = Matrix::Zero(dim_a, dim_a);
        for (int i = 0; i < dim_a; ++i) {
            for (int j = 0; j < dim_a; ++j) {
                for (int k = 0; k < dim_b; ++k) {
                    out(i, j) += m(i * dim_b + k, j * dim_b + k);
                }
            }
        }
        return out;
    }
    Matrix out = Matrix::Zero(dim_b, dim_b);
    for (int i = 0; i < dim_b; ++i) {
        for (int j = 0; j < dim_b; ++j) {
            for (int k = 0; k < dim_a; ++k) {
                out(i, j) += m(k * dim_b + i, k * dim_b + j);
            }
        }
    }
    return out;
}

Vector vectorize(const Matrix& m) {
    Vector v(m.size());
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            v[idx++] = m(i, j);
        }
    }
    return v;
}

Matrix unvectorize(const Vector& v, int rows, int cols) {
    if (v.size() != static_cast<Eigen::Index>(rows) * cols) {
        throw std::invalid_argument("unvectorize: size mismatch");
    }
    Matrix m(rows, cols);
    Eigen::Index idx = 0;
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            m(i, j) = v[idx++];
        }
    }
    return m;
}

std::uint64_t Rng::next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    have_spare_ = true;
    spare_ = r * std::sin(kTwoPi * u2);
    return r * std::cos(kTwoPi * u2);
}

Complex Rng::complex_normal() {
    const double inv_sqrt2 = 0.7071067811865475244;
    double re = normal();
    double im = normal();
    return Complex(re * inv_sqrt2, im * inv_sqrt2);
}

Vector haar_random_state(int dim, Rng& rng) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.complex_normal();
    double n = v.norm();
    if (n == 0.0) return haar_random_state(dim, rng);
    return v / n;
}

Matrix random_unitary(int dim, Rng& rng) {
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_normal();
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase ambiguity so the distribution is Haar.
    for (int j = 0; j < dim; ++j) {
        Complex d = r(j, j);
        double a = std::abs(d);
        q.col(j) *= (a > 0) ? d / a : Complex(1.0, 0.0);
    }
    return q;
}

Matrix random_hermitian(int dim, Rng& rng) {
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) g(i, j) = rng.complex_normal();
    }
    return 0.5 * (g + g.adjoint());
}

}  // namespace qutritlab

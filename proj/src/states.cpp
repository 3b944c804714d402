#include "qutritlab/states.hpp"

#include <cmath>

namespace qutritlab {

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) {
        throw std::invalid_argument("DensityMatrix: matrix must be square");
    }
    if (!is_hermitian(m_, kHermitianTol)) {
        throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    }
    double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
        throw std::invalid_argument("DensityMatrix: trace deviates from 1 by " +
                                    std::to_string(tr - 1.0));
    }
    EigResult eig = eig_hermitian(m_);
    if (eig.eigenvalues.minCoeff() < kEigenvalueFloor) {
        throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                    std::to_string(eig.eigenvalues.minCoeff()));
    }
}

DensityMatrix DensityMatrix::pure(const Vector& ket) {
    double n = ket.norm();
    if (n <= 0.0) throw std::invalid_argument("DensityMatrix::pure: zero vector");
    Vector v = ket / n;
    return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

UnitaryMatrix::UnitaryMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw std::invalid_argument("UnitaryMatrix: matrix must be square");
    }
    Matrix gram = m_.adjoint() * m_;
    if (!approx_equal(gram, Matrix::Identity(m_.rows(), m_.cols()), kUnitaryTol)) {
        throw std::invalid_argument("UnitaryMatrix: U^dag U deviates from identity");
    }
}

UnitaryMatrix UnitaryMatrix::identity(int dim) {
    return UnitaryMatrix(Matrix::Identity(dim, dim));
}

UnitaryMatrix UnitaryMatrix::adjoint() const {
    return UnitaryMatrix(m_.adjoint());
}

Observable::Observable(Matrix m) : m_(std::move(m)) {
    if (!is_hermitian(m_, kHermitianTol)) {
        throw std::invalid_argument("Observable: matrix is not Hermitian");
    }
}

Vector basis_ket(int dim, int index) {
    if (index < 0 || index >= dim) {
        throw std::invalid_argument("basis_ket: index out of range");
    }
    Vector v = Vector::Zero(dim);
    v[index] = 1.0;
    return v;
}

double state_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("state_fidelity: dimension mismatch");
    }
    Matrix ra = matrix_sqrt_psd(a.matrix());
    Matrix inner = matrix_sqrt_psd(ra * b.matrix() * ra);
    double root_sum = inner.trace().real();
    double f = root_sum * root_sum;
    return std::min(1.0, std::max(0.0, f));
}

double expectation(const Observable& obs, const DensityMatrix& rho) {
    if (obs.dim() != rho.dim()) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    Complex val = (obs.matrix() * rho.matrix()).trace();
    if (std::abs(val.imag()) > 1e-10) {
        throw std::runtime_error("expectation: imaginary residue " +
                                 std::to_string(val.imag()));
    }
    return val.real();
}

DensityMatrix partial_trace_state(const DensityMatrix& rho, int dim_a, int dim_b,
                                  int which) {
    return DensityMatrix(partial_trace(rho.matrix(), dim_a, dim_b, which));
}

bool same_state_up_to_phase(const Vector& v, const Vector& w, double tol) {
    if (v.size() != w.size()) return false;
    Complex overlap = v.adjoint() * w;
    return std::abs(std::abs(overlap) - 1.0) <= tol;
}

}  // namespace qutritlab

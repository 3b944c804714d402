#pragma once

#include "qutritlab/linalg.hpp"

namespace qutritlab {

// d x d positive semidefinite, unit trace. Construction validates
// Hermiticity (1e-12), trace (1e-10) and the eigenvalue floor (-1e-10).
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix m);

    static DensityMatrix pure(const Vector& ket);
    static DensityMatrix maximally_mixed(int dim);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }

private:
    Matrix m_;
};

class UnitaryMatrix {
public:
    explicit UnitaryMatrix(Matrix m);

    static UnitaryMatrix identity(int dim);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    UnitaryMatrix adjoint() const;

private:
    Matrix m_;
};

class Observable {
public:
    explicit Observable(Matrix m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }

private:
    Matrix m_;
};

Vector basis_ket(int dim, int index);

// Uhlmann fidelity Tr[sqrt(sqrt(a) b sqrt(a))]^2, in [0, 1].
double state_fidelity(const DensityMatrix& a, const DensityMatrix& b);

// Tr[A rho]; throws if the imaginary residue exceeds 1e-10.
double expectation(const Observable& obs, const DensityMatrix& rho);

DensityMatrix partial_trace_state(const DensityMatrix& rho, int dim_a, int dim_b,
                                  int which);

// |<v|w>| = 1 up to tol, i.e. equal as rays.
bool same_state_up_to_phase(const Vector& v, const Vector& w, double tol);

}  // namespace qutritlab

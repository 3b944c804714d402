#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qutritlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Numerical contract tolerances, shared across the library.
constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-10;
constexpr double kEigenvalueFloor = -1e-10;
constexpr double kUnitaryTol = 1e-10;
constexpr double kTracePreservingTol = 1e-9;
constexpr double kNegEigenvalueError = -1e-6;  // separates noise from invalid input

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool approx_equal(const Matrix& a, const Matrix& b, double atol);

bool is_hermitian(const Matrix& m, double atol);

// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
struct EigResult {
    RealVector eigenvalues;
    Matrix eigenvectors;  // column k pairs with eigenvalues[k]
};

EigResult eig_hermitian(const Matrix& m);

// Square root of a positive semidefinite matrix. Eigenvalues in
// [kNegEigenvalueError, 0) are clipped to zero; anything below throws.
Matrix matrix_sqrt_psd(const Matrix& m);

Matrix tensor(const Matrix& a, const Matrix& b);

// Trace out one factor of a dim_a x dim_b bipartite operator.
// which = 0 traces out the first factor, which = 1 the second.
Matrix partial_trace(const Matrix& m, int dim_a, int dim_b, int which);

// Column-major vectorization and its inverse.
Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v, int rows, int cols);

// Deterministic random source for sampling and property tests.
// splitmix64 stream with a Box-Muller normal; identical output on every
// platform for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double uniform();               // [0, 1)
    double normal();                // standard normal
    Complex complex_normal();       // (normal + i normal)/sqrt(2)

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

Vector haar_random_state(int dim, Rng& rng);
Matrix random_unitary(int dim, Rng& rng);
Matrix random_hermitian(int dim, Rng& rng);

}  // namespace qutritlab

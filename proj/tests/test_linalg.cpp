#include <doctest.h>

#include "qutritlab/linalg.hpp"
#include "test_helpers.hpp"

using namespace qutritlab;

TEST_CASE("eig_hermitian identity and diagonal") {
    EigResult id = eig_hermitian(Matrix::Identity(3, 3));
    for (int k = 0; k < 3; ++k) CHECK(id.eigenvalues[k] == doctest::Approx(1.0));

    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    d(2, 2) = 2.0;
    EigResult eig = eig_hermitian(d);
    CHECK(eig.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(eig.eigenvalues[1] == doctest::Approx(2.0));
    CHECK(eig.eigenvalues[2] == doctest::Approx(3.0));
    // Basis vectors are permuted accordingly.
    CHECK(std::abs(eig.eigenvectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(eig.eigenvectors(2, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(eig.eigenvectors(0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("eig_hermitian reconstructs random Hermitian matrices") {
    Rng rng(7);
    for (int dim : {4, 16, 36, 64}) {
        Matrix h = random_hermitian(dim, rng);
        EigResult eig = eig_hermitian(h);
        Matrix rebuilt = eig.eigenvectors *
                         eig.eigenvalues.cast<Complex>().asDiagonal() *
                         eig.eigenvectors.adjoint();
        double norm = h.cwiseAbs().maxCoeff();
        CHECK((rebuilt - h).cwiseAbs().maxCoeff() <= 1e-9 * norm);
        for (int k = 1; k < dim; ++k) {
            CHECK(eig.eigenvalues[k] >= eig.eigenvalues[k - 1]);
        }
    }
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(eig_hermitian(m), std::invalid_argument);
}

TEST_CASE("matrix_sqrt_psd on simple cases") {
    CHECK(approx_equal(matrix_sqrt_psd(Matrix::Identity(3, 3)),
                       Matrix::Identity(3, 3), 1e-12));

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    Matrix r = matrix_sqrt_psd(d);
    CHECK(r(0, 0).real() == doctest::Approx(2.0));
    CHECK(r(1, 1).real() == doctest::Approx(3.0));

    // Rank-1 projector is its own square root.
    Rng rng(3);
    Vector v = haar_random_state(3, rng);
    Matrix p = v * v.adjoint();
    CHECK(approx_equal(matrix_sqrt_psd(p), p, 1e-7));

    Matrix sq = matrix_sqrt_psd(d);
    CHECK(approx_equal(sq * sq, d, 1e-8));
}

TEST_CASE("matrix_sqrt_psd clips noise but rejects real negatives") {
    Matrix tiny = Matrix::Identity(2, 2);
    tiny(0, 0) = -1e-9;  // numerical noise scale
    CHECK_NOTHROW(matrix_sqrt_psd(tiny));

    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 0) = -1e-3;
    CHECK_THROWS_AS(matrix_sqrt_psd(bad), std::invalid_argument);
}

TEST_CASE("tensor and partial_trace") {
    CHECK(approx_equal(tensor(Matrix::Identity(2, 2), Matrix::Identity(3, 3)),
                       Matrix::Identity(6, 6), 1e-15));

    Rng rng(11);
    DensityMatrix a = testing::random_density(2, rng);
    DensityMatrix b = testing::random_density(3, rng);
    Matrix joint = tensor(a.matrix(), b.matrix());
    CHECK(approx_equal(partial_trace(joint, 2, 3, 1), a.matrix(), 1e-12));
    CHECK(approx_equal(partial_trace(joint, 2, 3, 0), b.matrix(), 1e-12));

    // Maximally entangled qutrit pair reduces to I/3.
    Vector bell = Vector::Zero(9);
    for (int i = 0; i < 3; ++i) bell[i * 3 + i] = 1.0 / std::sqrt(3.0);
    Matrix rho = bell * bell.adjoint();
    CHECK(approx_equal(partial_trace(rho, 3, 3, 1), Matrix::Identity(3, 3) / 3.0,
                       1e-12));
    double tr = partial_trace(rho, 3, 3, 0).trace().real();
    CHECK(tr == doctest::Approx(1.0));
}

TEST_CASE("vectorize round-trip") {
    Rng rng(5);
    Matrix m = random_hermitian(4, rng);
    CHECK(approx_equal(unvectorize(vectorize(m), 4, 4), m, 0.0));
}

TEST_CASE("rng reproducibility and normal moments") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng rng(1);
    double mean = 0.0, var = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        mean += x;
        var += x * x;
    }
    mean /= n;
    var = var / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("haar states are normalized and cover the sphere") {
    Rng rng(9);
    Vector mean = Vector::Zero(3);
    for (int i = 0; i < 500; ++i) {
        Vector v = haar_random_state(3, rng);
        CHECK(v.norm() == doctest::Approx(1.0));
        mean += v;
    }
    CHECK((mean / 500.0).norm() < 0.1);
}

#include <doctest.h>

#include "qutritlab/contextuality.hpp"
#include "qutritlab/noise.hpp"
#include "qutritlab/presets.hpp"
#include "qutritlab/readout.hpp"
#include "test_helpers.hpp"

using namespace qutritlab;

namespace {

Vector psi1_ket() {
    return (basis_ket(3, 1) + basis_ket(3, 2)) / std::sqrt(2.0);
}

}  // namespace

TEST_CASE("binary observable invariants") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        BinaryObservable a = BinaryObservable::from_ray(haar_random_state(3, rng));
        Matrix sq = a.observable.matrix() * a.observable.matrix();
        CHECK(approx_equal(sq, Matrix::Identity(3, 3), 1e-12));
        EigResult eig = eig_hermitian(a.observable.matrix());
        CHECK(eig.eigenvalues[0] == doctest::Approx(-1.0));
        CHECK(eig.eigenvalues[1] == doctest::Approx(-1.0));
        CHECK(eig.eigenvalues[2] == doctest::Approx(1.0));
    }
}

TEST_CASE("ternary-realized measurements reproduce the sequential values") {
    MeasurementProcedure t0 = ternary_procedure(basis_ket(3, 0));
    MeasurementProcedure tpsi = ternary_procedure(psi1_ket());
    DensityMatrix rho = DensityMatrix::pure(psi1_ket());

    double own_first = sequential_expectation(tpsi, t0, rho,
                                              RecordWhich::record_first);
    double after_other = sequential_expectation(t0, tpsi, rho,
                                                RecordWhich::record_second);
    CHECK(own_first == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(after_other == doctest::Approx(0.0).epsilon(1e-12));

    // The plain expectation <A_psi1> matches the first-recorded value.
    BinaryObservable a = BinaryObservable::from_ray(psi1_ket());
    CHECK(expectation(a.observable, rho) == doctest::Approx(own_first));
}

TEST_CASE("recorded products of compatible pairs match the joint observable") {
    // A_0 then A_psi1 on |psi1>: first outcome -1 surely, second +1 surely.
    MeasurementProcedure b0 = ideal_binary_procedure(basis_ket(3, 0));
    MeasurementProcedure bpsi = ideal_binary_procedure(psi1_ket());
    DensityMatrix rho = DensityMatrix::pure(psi1_ket());
    CHECK(sequential_expectation(b0, bpsi, rho, RecordWhich::record_product) ==
          doctest::Approx(-1.0));

    // Pentagram of pairwise-orthogonal rays: the degenerate realization
    // reaches the 5 - 4 sqrt(5) correlation sum on the symmetry axis.
    const double cos_pi5 = std::cos(M_PI / 5.0);
    const double ct = std::sqrt(cos_pi5 / (1.0 + cos_pi5));
    const double st = std::sqrt(1.0 - ct * ct);
    std::vector<Vector> rays;
    for (int i = 0; i < 5; ++i) {
        double phi = 4.0 * M_PI * i / 5.0;
        Vector v(3);
        v << st * std::cos(phi), st * std::sin(phi), ct;
        rays.push_back(v);
    }
    DensityMatrix axis = DensityMatrix::pure(basis_ket(3, 2));
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs((rays[i].adjoint() * rays[(i + 1) % 5])(0, 0)) < 1e-12);
        sum += sequential_expectation(ideal_binary_procedure(rays[i]),
                                      ideal_binary_procedure(rays[(i + 1) % 5]),
                                      axis, RecordWhich::record_product);
    }
    CHECK(sum == doctest::Approx(5.0 - 4.0 * std::sqrt(5.0)).epsilon(1e-10));
    CHECK(sum < -3.0);  // past the noncontextual bound
}

TEST_CASE("ideal degenerate procedures commute in sequence") {
    MeasurementProcedure b0 = ideal_binary_procedure(basis_ket(3, 0));
    MeasurementProcedure bpsi = ideal_binary_procedure(psi1_ket());
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        DensityMatrix rho = testing::random_density(3, rng);
        double uv = sequential_expectation(b0, bpsi, rho, RecordWhich::record_first);
        double vu = sequential_expectation(bpsi, b0, rho, RecordWhich::record_second);
        REQUIRE(std::abs(uv - vu) < 1e-12);
    }
}

TEST_CASE("repeated measurement agrees with itself") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Vector ray = haar_random_state(3, rng);
        MeasurementProcedure proc =
            trial % 2 == 0 ? ideal_binary_procedure(ray) : ternary_procedure(ray);
        DensityMatrix rho = testing::random_density(3, rng);
        double first = sequential_expectation(proc, proc, rho,
                                              RecordWhich::record_first);
        double second = sequential_expectation(proc, proc, rho,
                                               RecordWhich::record_second);
        REQUIRE(std::abs(first - second) < 1e-12);
    }
}

TEST_CASE("epsilon vanishes for ideal procedures and exceeds one for ternary") {
    std::vector<DensityMatrix> ensemble = default_epsilon_ensemble(11, 200);
    ensemble.push_back(DensityMatrix::pure(psi1_ket()));

    EpsilonReport ideal = epsilon_uv(ideal_binary_procedure(basis_ket(3, 0)),
                                     ideal_binary_procedure(psi1_ket()), ensemble);
    CHECK(ideal.epsilon <= 1e-12);
    CHECK(ideal.rays_orthogonal);

    EpsilonReport ternary = epsilon_uv(ternary_procedure(psi1_ket()),
                                       ternary_procedure(basis_ket(3, 0)), ensemble);
    CHECK(ternary.epsilon >= 1.0 - 1e-9);

    EpsilonReport skew = epsilon_uv(ideal_binary_procedure(basis_ket(3, 0)),
                                    ideal_binary_procedure(basis_ket(3, 0)), ensemble);
    CHECK_FALSE(skew.rays_orthogonal);  // same ray is not orthogonal
}

TEST_CASE("epsilon is invariant under a joint frame change") {
    Rng rng(13);
    Matrix u = random_unitary(3, rng);

    auto conjugated = [&u](const MeasurementProcedure& p) {
        MeasurementProcedure out{
            UnitaryMatrix(Matrix(p.pre.matrix() * u.adjoint())), p.device,
            UnitaryMatrix(Matrix(u * p.post.matrix())), std::nullopt};
        if (p.target_ray) out.target_ray = Vector(u * (*p.target_ray));
        return out;
    };

    std::vector<DensityMatrix> ensemble;
    std::vector<DensityMatrix> rotated;
    for (int i = 0; i < 60; ++i) {
        Vector v = haar_random_state(3, rng);
        ensemble.push_back(DensityMatrix::pure(v));
        rotated.push_back(DensityMatrix::pure(Vector(u * v)));
    }
    // Use the ordering whose defect is nonzero so the check has teeth.
    MeasurementProcedure first = ternary_procedure(psi1_ket());
    MeasurementProcedure second = ternary_procedure(basis_ket(3, 0));
    EpsilonReport base = epsilon_uv(first, second, ensemble);
    EpsilonReport conj =
        epsilon_uv(conjugated(first), conjugated(second), rotated);
    CHECK(base.epsilon > 0.1);
    CHECK(base.epsilon == doctest::Approx(conj.epsilon).epsilon(1e-9));
}

TEST_CASE("sampled sequences agree with exact enumeration") {
    MeasurementProcedure t0 = ternary_procedure(basis_ket(3, 0));
    MeasurementProcedure tpsi = ternary_procedure(psi1_ket());
    Rng rng(17);
    DensityMatrix rho = DensityMatrix::pure(haar_random_state(3, rng));

    const std::uint64_t shots = 200000;
    double exact = sequential_expectation(t0, tpsi, rho, RecordWhich::record_second);
    double sampled = sequential_expectation_sampled(t0, tpsi, rho,
                                                    RecordWhich::record_second,
                                                    shots, rng);
    double sigma = 1.0 / std::sqrt(static_cast<double>(shots));
    CHECK(std::abs(sampled - exact) < 3.5 * sigma);
}

TEST_CASE("exact mode upper-bounds the ensemble maximum") {
    MeasurementProcedure t0 = ternary_procedure(basis_ket(3, 0));
    MeasurementProcedure tpsi = ternary_procedure(psi1_ket());
    std::vector<DensityMatrix> ensemble = default_epsilon_ensemble(19, 300);
    EpsilonReport sampled = epsilon_uv(tpsi, t0, ensemble);
    double exact = epsilon_exact(tpsi, t0);
    CHECK(exact >= sampled.epsilon - 1e-12);
    CHECK(exact <= 2.0 + 1e-12);  // recorded values live in [-1, 1]
}

TEST_CASE("epsilon from a process matrix") {
    KrausChannel binary = testing::ideal_binary_channel();
    ProcessMatrix chi_binary = ideal_process_matrix(binary);
    std::vector<DensityMatrix> ensemble = default_epsilon_ensemble(23, 300);
    Vector e0 = basis_ket(3, 0);

    EpsilonReport ideal = epsilon_from_process(chi_binary, e0, psi1_ket(), ensemble);
    CHECK(ideal.epsilon <= 1e-10);

    std::vector<Matrix> proj;
    std::vector<double> labels{+1.0, -1.0, -1.0};
    for (int i = 0; i < 3; ++i) {
        Matrix p = Matrix::Zero(3, 3);
        p(i, i) = 1.0;
        proj.push_back(p);
    }
    ProcessMatrix chi_ternary = ideal_process_matrix(KrausChannel(proj, labels));
    std::vector<DensityMatrix> with_witness = ensemble;
    with_witness.push_back(DensityMatrix::pure(psi1_ket()));
    EpsilonReport ternary =
        epsilon_from_process(chi_ternary, psi1_ket(), e0, with_witness);
    CHECK(ternary.epsilon >= 1.0 - 1e-9);
    CHECK(epsilon_from_process_exact(chi_ternary, psi1_ket(), e0) >= 1.0 - 1e-9);

    // Non trace-preserving chi is rejected.
    ProcessMatrix broken = chi_binary;
    broken.chi *= 0.9;
    CHECK_THROWS_AS(epsilon_from_process(broken, e0, psi1_ket(), ensemble),
                    std::invalid_argument);
}

TEST_CASE("noisy sweet-spot readout gives a small but nonzero epsilon") {
    // A realistic strong readout: projection plus intrinsic decoherence over
    // the measurement window.
    ReadoutConfig rc;
    rc.cavity_frequency_mhz = 7182.0;
    rc.drive_frequency_mhz = 7182.0;
    rc.drive_amplitude = 49.0;
    rc.duration_us = 0.15;
    rc.ringdown_us = 0.30;
    rc.kappa_mhz = 1.71;
    rc.pulls_mhz = {1.29, 0.0, 0.0};
    KrausChannel readout = measurement_channel(rc, ReadoutMode::general);
    KrausChannel decay =
        free_evolution_channel(noise_preset("default"), {0.45, 0.0, 0.0});
    KrausChannel window = compose_keep_labels(decay, readout);

    std::vector<DensityMatrix> ensemble = default_epsilon_ensemble(29, 300);
    EpsilonReport eps = epsilon_uv(procedure_from_channel(basis_ket(3, 0), window),
                                   procedure_from_channel(psi1_ket(), window),
                                   ensemble);
    CHECK(eps.epsilon > 0.02);
    CHECK(eps.epsilon < 0.2);
}

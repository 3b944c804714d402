#include <doctest.h>

#include "qutritlab/control.hpp"
#include "qutritlab/noise.hpp"
#include "qutritlab/presets.hpp"
#include "test_helpers.hpp"

using namespace qutritlab;

namespace {

NoiseParams paper_noise() { return noise_preset("default"); }

DensityMatrix plus01() {
    Vector v = (basis_ket(3, 0) + basis_ket(3, 1)) / std::sqrt(2.0);
    return DensityMatrix::pure(v);
}

}  // namespace

TEST_CASE("zero duration is the identity channel") {
    KrausChannel ch = free_evolution_channel(paper_noise(), {0.0, 0.0, 0.0});
    Rng rng(3);
    DensityMatrix rho = testing::random_density(3, rng);
    CHECK(approx_equal(apply_channel(ch, rho).matrix(), rho.matrix(), 1e-12));
}

TEST_CASE("ramsey trace follows the closed-form fringe") {
    NoiseParams p = paper_noise();
    UnitaryMatrix half = compile_rotation({0, RotationAxis::x, 0.5 * M_PI});
    DensityMatrix rho0 = plus01();
    for (double t = 0.0; t <= 20.0; t += 0.8) {
        KrausChannel ch = free_evolution_channel(p, {t, 1.0, 0.0});
        DensityMatrix mid = apply_channel(ch, rho0);
        Matrix fin = half.matrix() * mid.matrix() * half.matrix().adjoint();
        double signal = fin(1, 1).real();
        double expected =
            0.5 * (std::exp(-t / p.t2_01_us) * std::cos(kTwoPi * 1.0 * t) + 1.0);
        REQUIRE(std::abs(signal - expected) < 1e-6);
    }
}

TEST_CASE("long-time steady state satisfies detailed balance") {
    NoiseParams p = paper_noise();
    KrausChannel ch = free_evolution_channel(p, {4000.0, 0.0, 0.0});
    DensityMatrix out = apply_channel(ch, DensityMatrix::pure(testing::psi0_ket()));
    CHECK(out.matrix()(1, 1).real() == doctest::Approx(p.n_th).epsilon(1e-6));
    CHECK(out.matrix()(2, 2).real() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(out.matrix()(0, 0).real() == doctest::Approx(1.0 - p.n_th).epsilon(1e-6));
}

TEST_CASE("cold qutrit relaxes to the ground state") {
    NoiseParams p = paper_noise();
    p.n_th = 0.0;
    KrausChannel ch = free_evolution_channel(p, {20.0 * p.t1_01_us, 0.0, 0.0});
    Rng rng(5);
    DensityMatrix rho = testing::random_density(3, rng);
    DensityMatrix out = apply_channel(ch, rho);
    CHECK(state_fidelity(out, DensityMatrix::pure(basis_ket(3, 0))) > 0.999);
}

TEST_CASE("channel is CPTP across parameters and durations") {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        NoiseParams p;
        p.t1_01_us = 5.0 + 20.0 * rng.uniform();
        p.n_th = 0.4 * rng.uniform();
        // Stay inside the relaxation-limited coherence bounds.
        double g10 = 1.0 / p.t1_01_us;
        double g01 = g10 * p.n_th / (1.0 - p.n_th);
        double g21 = 2.0 * g10;
        double lim01 = 2.0 / (g10 + g01);
        double lim12 = 2.0 / (g10 + g21);
        p.t2_01_us = (0.2 + 0.75 * rng.uniform()) * lim01;
        p.t2_12_us = (0.2 + 0.75 * rng.uniform()) * lim12;
        double duration = 30.0 * rng.uniform();
        KrausChannel ch = free_evolution_channel(p, {duration, 0.5, -0.3});
        REQUIRE(is_cptp(ch, 1e-9));
        DensityMatrix rho = testing::random_density(3, rng);
        DensityMatrix out = apply_channel(ch, rho);
        REQUIRE(out.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("free evolution is a semigroup") {
    NoiseParams p = paper_noise();
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        double t1 = 8.0 * rng.uniform();
        double t2 = 8.0 * rng.uniform();
        Matrix s1 = free_evolution_superoperator(p, {t1, 0.7, 0.2});
        Matrix s2 = free_evolution_superoperator(p, {t2, 0.7, 0.2});
        Matrix s12 = free_evolution_superoperator(p, {t1 + t2, 0.7, 0.2});
        REQUIRE(approx_equal(s2 * s1, s12, 1e-9));
    }
}

TEST_CASE("interleave composes steps in order") {
    NoiseParams p = paper_noise();

    Timeline empty = interleave({});
    Rng rng(13);
    DensityMatrix rho = testing::random_density(3, rng);
    CHECK(approx_equal(apply_channel(empty.channel, rho).matrix(), rho.matrix(),
                       1e-12));
    CHECK(empty.total_duration_us == 0.0);

    KrausChannel f1 = free_evolution_channel(p, {1.2, 0.0, 0.0});
    KrausChannel f2 = free_evolution_channel(p, {0.8, 0.0, 0.0});
    Timeline joined = interleave({{f1, 1.2}, {f2, 0.8}});
    Matrix direct = free_evolution_superoperator(p, {2.0, 0.0, 0.0});
    CHECK(approx_equal(superoperator(joined.channel), direct, 1e-9));
    CHECK(joined.total_duration_us == doctest::Approx(2.0));

    // Unitaries interleave with channels.
    UnitaryMatrix u = compile_rotation({0, RotationAxis::x, 0.5 * M_PI});
    Timeline mixed = interleave({{u, 0.0}, {f1, 1.2}});
    DensityMatrix via_steps =
        apply_channel(f1, DensityMatrix(u.matrix() * rho.matrix() *
                                        u.matrix().adjoint()));
    CHECK(approx_equal(apply_channel(mixed.channel, rho).matrix(),
                       via_steps.matrix(), 1e-10));
}

TEST_CASE("a readout window timeline composes cleanly") {
    NoiseParams p = paper_noise();
    // prep, 450 ns window holding a 150 ns readout and 300 ns ring-down,
    // then tomography pulses: assembled here as channels only.
    UnitaryMatrix prep = compile_sequence(
        parse_sequence("R12x(pi/2) . R01x(pi)"));
    KrausChannel window = free_evolution_channel(p, {0.45, 0.0, 0.0});
    Timeline t = interleave({{prep, 0.0}, {window, 0.45}});
    CHECK(t.total_duration_us == doctest::Approx(0.45));
    CHECK(is_cptp(t.channel));
}

TEST_CASE("parameter validation") {
    NoiseParams p = paper_noise();
    p.t2_01_us = 2.0 * p.t1_01_us * 1.2;  // beyond the relaxation limit
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    p = paper_noise();
    p.n_th = 0.6;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    p = paper_noise();
    p.t1_01_us = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    // Explicit T2_02 outside the completely positive window is rejected.
    p = paper_noise();
    p.t2_02_us = 100.0;  // far slower dephasing than T2_01/T2_12 allow
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("default rho02 rate follows the stated rule at the presets") {
    NoiseParams p = paper_noise();
    NoiseRates r = noise_rates(p);
    double expected = 1.0 / p.t2_01_us + 1.0 / p.t2_12_us - 0.5 / p.t1_01_us;
    CHECK(r.total02 == doctest::Approx(expected).epsilon(1e-12));

    // And the coherence decays at exactly that rate.
    Vector v = (basis_ket(3, 0) + basis_ket(3, 2)) / std::sqrt(2.0);
    double t = 1.7;
    KrausChannel ch = free_evolution_channel(p, {t, 0.0, 0.0});
    DensityMatrix out = apply_channel(ch, DensityMatrix::pure(v));
    CHECK(std::abs(out.matrix()(0, 2)) ==
          doctest::Approx(0.5 * std::exp(-r.total02 * t)).epsilon(1e-9));
}

#include <doctest.h>

#include "qutritlab/device.hpp"
#include "test_helpers.hpp"

using namespace qutritlab;

namespace {

DeviceParams reference_device(double f01 = 6872.0, double alpha = -310.0) {
    DeviceParams p;
    p.f_r_mhz = 7182.0;
    p.g_mhz = 20.0;
    p.kappa_mhz = 1.71;
    p.levels = QutritLevels::ladder(f01, alpha, p.n_qutrit_levels);
    return p;
}

}  // namespace

TEST_CASE("transmon asymptote: alpha approaches -E_C at large E_J/E_C") {
    TransmonSpec spec{3.0e6, 300.0, 0.0, 40};
    QutritLevels q = transmon_levels(spec, 3);
    CHECK(std::abs(q.alpha_mhz + spec.ec_mhz) < 0.02 * spec.ec_mhz);
}

TEST_CASE("transmon E_J -> 0 limit is the charging parabola") {
    // With a tiny E_J the spectrum approaches 4 E_C (n - n_g)^2.
    TransmonSpec spec{1e-6, 250.0, 0.0, 20};
    QutritLevels q = transmon_levels(spec, 3);
    // n = 0, +-1 -> levels 0, 4E_C (doubly degenerate at n_g = 0).
    CHECK(q.omega_mhz[0] == doctest::Approx(0.0));
    CHECK(q.omega_mhz[1] == doctest::Approx(4.0 * spec.ec_mhz).epsilon(1e-3));
    CHECK(q.omega_mhz[2] == doctest::Approx(4.0 * spec.ec_mhz).epsilon(1e-3));
}

TEST_CASE("fit_transmon reproduces its inputs and round-trips") {
    // The frozen value below comes from the charge-basis solve itself
    // (round-trip postcondition is the oracle).
    TransmonSpec spec = fit_transmon(6901.0, -314.0);
    QutritLevels q = transmon_levels(spec, 3);
    CHECK(std::abs(q.f01_mhz - 6901.0) < 0.1);
    CHECK(std::abs(q.alpha_mhz + 314.0) < 0.1);
    CHECK(spec.ec_mhz == doctest::Approx(283.16).epsilon(2e-3));

    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        double ej = 15000.0 + 12000.0 * rng.uniform();
        double ec = 220.0 + 120.0 * rng.uniform();
        QutritLevels levels = transmon_levels(TransmonSpec{ej, ec, 0.0, 20}, 3);
        TransmonSpec back = fit_transmon(levels.f01_mhz, levels.alpha_mhz);
        CHECK(std::abs(back.ej_mhz - ej) < 1e-3 * ej);
        CHECK(std::abs(back.ec_mhz - ec) < 1e-3 * ec);
    }
}

TEST_CASE("fit_transmon rejects non-anharmonic input") {
    CHECK_THROWS_AS(fit_transmon(6901.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_transmon(6901.0, 10.0), std::invalid_argument);
}

TEST_CASE("second-order shifts: sweet spot and printed values") {
    DispersiveShifts at_alpha = dispersive_shifts_2nd_order(20.0, -310.0, -310.0);
    CHECK(at_alpha.chi12_mhz == 0.0);

    DispersiveShifts s = dispersive_shifts_2nd_order(20.0, -432.0, -310.0);
    CHECK(2.0 * s.chi12_mhz == doctest::Approx(-0.0897).epsilon(5e-3));
    CHECK(2.0 * s.chi12_mhz ==
          doctest::Approx(2.0 * chi12_closed_form(20.0, -432.0, -310.0))
              .epsilon(1e-12));

    DispersiveShifts s2 = dispersive_shifts_2nd_order(20.0, -300.0, -310.0);
    CHECK(2.0 * s2.chi01_mhz == doctest::Approx(-1.355).epsilon(1e-3));
}

TEST_CASE("second-order shifts satisfy the Stark-coefficient identities") {
    Rng rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        double g = 5.0 + 30.0 * rng.uniform();
        double alpha = -400.0 + 200.0 * rng.uniform();
        double delta = -600.0 + 250.0 * rng.uniform();
        bool singular = false;
        for (int i = 0; i < 3; ++i) {
            if (std::abs(delta + i * alpha) < 2.0) singular = true;
        }
        if (singular) continue;
        DispersiveShifts s = dispersive_shifts_2nd_order(g, delta, alpha);
        CHECK(s.stark_mhz[0] == doctest::Approx(-s.chi_partial_mhz[0]));
        CHECK(2.0 * s.chi01_mhz ==
              doctest::Approx(s.stark_mhz[1] - s.stark_mhz[0]).epsilon(1e-12));
        double closed = chi12_closed_form(g, delta, alpha);
        CHECK(std::abs(s.chi12_mhz - closed) <=
              1e-12 * std::max(std::abs(closed), 1e-6));
    }
}

TEST_CASE("second-order shifts flag resonances") {
    CHECK_THROWS_AS(dispersive_shifts_2nd_order(20.0, -0.5, -310.0),
                    std::runtime_error);
    CHECK_THROWS_AS(dispersive_shifts_2nd_order(20.0, 309.5, -310.0),
                    std::runtime_error);
    CHECK_THROWS_AS(dispersive_shifts_2nd_order(20.0, 619.5, -310.0),
                    std::runtime_error);
}

TEST_CASE("jc_hamiltonian structure") {
    DeviceParams p = reference_device();

    SUBCASE("g = 0 gives the bare diagonal") {
        DeviceParams p0 = p;
        p0.g_mhz = 1e-12;
        Matrix h = jc_hamiltonian(p0);
        QutritLevels q = p.resolved_levels();
        for (int i = 0; i < p.n_qutrit_levels; ++i) {
            for (int n = 0; n < p.n_photons; ++n) {
                int idx = i * p.n_photons + n;
                CHECK(h(idx, idx).real() ==
                      doctest::Approx(q.omega_mhz[i] + n * p.f_r_mhz));
            }
        }
    }

    SUBCASE("2x2 truncation reproduces the textbook block") {
        DeviceParams p2 = p;
        p2.n_qutrit_levels = 3;  // validation floor; inspect the (0,1) block
        p2.n_photons = 2;
        Matrix h = jc_hamiltonian(p2);
        // |0,1> couples to |1,0> with strength g.
        CHECK(h(1, 2).real() == doctest::Approx(p.g_mhz));
        CHECK(h(2, 1).real() == doctest::Approx(p.g_mhz));
    }

    SUBCASE("commutes with the excitation number in the truncation interior") {
        Matrix h = jc_hamiltonian(p);
        const int nq = p.n_qutrit_levels, np = p.n_photons;
        Matrix excitation = Matrix::Zero(nq * np, nq * np);
        for (int i = 0; i < nq; ++i) {
            for (int n = 0; n < np; ++n) {
                excitation(i * np + n, i * np + n) = i + n;
            }
        }
        Matrix comm = h * excitation - excitation * h;
        // Nonzero commutator entries can only involve the truncation edge
        // states (max photon index), absent here because the coupling
        // conserves i + n exactly.
        CHECK(comm.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("dressed pulls vanish with the coupling") {
    DeviceParams p = reference_device();
    p.g_mhz = 1e-6;
    DressedPulls pulls = dressed_cavity_pull(p);
    for (double v : pulls.pull_mhz) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("exact chi12 crossing sits near delta = alpha") {
    DeviceParams p = reference_device();
    SweetSpot spot = find_sweet_spot(p, -400.0, -250.0, SweetSpotMode::exact);
    CHECK(std::abs(spot.delta_mhz + 310.0) < 50.0);
    CHECK(std::abs(chi12_at_detuning(p, spot.delta_mhz, SweetSpotMode::exact)) <
          1e-6);
    CHECK(spot.f01_mhz == doctest::Approx(p.f_r_mhz + spot.delta_mhz));
}

TEST_CASE("photon truncation is converged at the crossing") {
    DeviceParams p6 = reference_device();
    DeviceParams p10 = p6;
    p10.n_photons = 10;
    SweetSpot s6 = find_sweet_spot(p6, -400.0, -250.0, SweetSpotMode::exact);
    SweetSpot s10 = find_sweet_spot(p10, -400.0, -250.0, SweetSpotMode::exact);
    CHECK(std::abs(s6.delta_mhz - s10.delta_mhz) < 1e-3);
}

TEST_CASE("small-g agreement between exact and second-order chi01") {
    DeviceParams p = reference_device();
    const double delta = -400.0;
    p.g_mhz = 0.05 * std::abs(delta);
    p.levels = QutritLevels::ladder(p.f_r_mhz + delta, -310.0, p.n_qutrit_levels);
    DressedPulls pulls = dressed_cavity_pull(p);
    DispersiveShifts s = dispersive_shifts_2nd_order(p.g_mhz, delta, -310.0);
    CHECK(std::abs(pulls.chi01_mhz - s.chi01_mhz) <= 0.10 * std::abs(s.chi01_mhz));
    CHECK(std::abs(pulls.chi12_mhz - s.chi12_mhz) <=
          0.10 * std::abs(s.chi12_mhz) + 1e-6);
}

TEST_CASE("two-level truncation reproduces the textbook dispersive pull") {
    DeviceParams p = reference_device();
    const double delta = -400.0;
    p.g_mhz = 0.05 * std::abs(delta);
    p.n_qutrit_levels = 3;  // minimum accepted; level 2 pushed out of reach
    p.levels = QutritLevels::ladder(p.f_r_mhz + delta, 1e6, 3);
    // With the second level detuned far away, states 0/1 behave two-level.
    DressedPulls pulls = dressed_cavity_pull(p);
    double textbook = p.g_mhz * p.g_mhz / delta;
    CHECK(std::abs(pulls.pull_mhz[0] - (-textbook)) <= 0.05 * std::abs(textbook));
    CHECK(std::abs(pulls.pull_mhz[1] - textbook) <= 0.05 * std::abs(textbook));
}

TEST_CASE("second-order sweet spot is exactly alpha for random devices") {
    Rng rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        double g = 5.0 + 30.0 * rng.uniform();
        double alpha = -380.0 + 140.0 * rng.uniform();
        DeviceParams p = reference_device(7182.0 + alpha, alpha);
        p.g_mhz = g;
        SweetSpot spot =
            find_sweet_spot(p, alpha - 50.0, alpha + 50.0, SweetSpotMode::second_order);
        CHECK(spot.delta_mhz == alpha);
    }
}

TEST_CASE("find_sweet_spot requires a sign change") {
    DeviceParams p = reference_device();
    CHECK_THROWS_AS(find_sweet_spot(p, -290.0, -250.0, SweetSpotMode::exact),
                    std::runtime_error);
}

TEST_CASE("transmon spec validation") {
    CHECK_THROWS_AS(TransmonSpec({-1.0, 300.0, 0.0, 20}).validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(TransmonSpec({20000.0, 300.0, 0.0, 5}).validate(),
                    std::invalid_argument);
}

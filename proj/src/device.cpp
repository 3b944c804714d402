#include "qutritlab/device.hpp"

#include <cmath>

namespace qutritlab {

namespace {

// Charge-basis spectrum at a fixed cutoff, lowest n_levels, shifted to omega_0 = 0.
std::vector<double> charge_basis_levels(const TransmonSpec& spec, int n_levels,
                                        int cutoff) {
    const int dim = 2 * cutoff + 1;
    if (n_levels > dim) {
        throw std::invalid_argument("transmon_levels: cutoff too small for n_levels");
    }
    RealMatrix h = RealMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        double n = static_cast<double>(k - cutoff) - spec.ng;
        h(k, k) = 4.0 * spec.ec_mhz * n * n;
        if (k + 1 < dim) {
            h(k, k + 1) = -0.5 * spec.ej_mhz;
            h(k + 1, k) = -0.5 * spec.ej_mhz;
        }
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("transmon_levels: eigensolver failed");
    }
    std::vector<double> out(n_levels);
    for (int m = 0; m < n_levels; ++m) {
        out[m] = solver.eigenvalues()[m] - solver.eigenvalues()[0];
    }
    return out;
}

}  // namespace

void TransmonSpec::validate() const {
    if (ej_mhz <= 0.0 || ec_mhz <= 0.0) {
        throw std::invalid_argument("TransmonSpec: E_J and E_C must be positive");
    }
    if (charge_cutoff < 10) {
        throw std::invalid_argument("TransmonSpec: charge cutoff must be >= 10");
    }
}

QutritLevels QutritLevels::ladder(double f01_mhz, double alpha_mhz, int n_levels) {
    QutritLevels q;
    q.f01_mhz = f01_mhz;
    q.alpha_mhz = alpha_mhz;
    q.omega_mhz.resize(n_levels);
    for (int i = 0; i < n_levels; ++i) {
        q.omega_mhz[i] = i * f01_mhz + alpha_mhz * 0.5 * i * (i - 1);
    }
    return q;
}

QutritLevels QutritLevels::from_spectrum(std::vector<double> omega_mhz) {
    if (omega_mhz.size() < 3) {
        throw std::invalid_argument("QutritLevels: need at least three levels");
    }
    QutritLevels q;
    double shift = omega_mhz[0];
    for (double& w : omega_mhz) w -= shift;
    q.f01_mhz = omega_mhz[1];
    q.alpha_mhz = (omega_mhz[2] - omega_mhz[1]) - omega_mhz[1];
    q.omega_mhz = std::move(omega_mhz);
    return q;
}

void DeviceParams::validate() const {
    if (g_mhz <= 0.0) throw std::invalid_argument("DeviceParams: g must be positive");
    if (kappa_mhz <= 0.0) {
        throw std::invalid_argument("DeviceParams: kappa must be positive");
    }
    if (n_qutrit_levels < 3) {
        throw std::invalid_argument("DeviceParams: need at least 3 qutrit levels");
    }
    if (n_photons < 2) {
        throw std::invalid_argument("DeviceParams: need at least 2 photon states");
    }
}

QutritLevels DeviceParams::resolved_levels() const {
    if (std::holds_alternative<QutritLevels>(levels)) {
        QutritLevels q = std::get<QutritLevels>(levels);
        if (static_cast<int>(q.omega_mhz.size()) < n_qutrit_levels) {
            q = QutritLevels::ladder(q.f01_mhz, q.alpha_mhz, n_qutrit_levels);
        }
        return q;
    }
    return transmon_levels(std::get<TransmonSpec>(levels), n_qutrit_levels);
}

QutritLevels transmon_levels(const TransmonSpec& spec, int n_levels) {
    spec.validate();
    if (n_levels < 3) {
        throw std::invalid_argument("transmon_levels: need at least three levels");
    }
    int cutoff = spec.charge_cutoff;
    std::vector<double> levels = charge_basis_levels(spec, n_levels, cutoff);
    const int max_cutoff = 1280;
    while (true) {
        if (2 * cutoff > max_cutoff) {
            throw std::runtime_error("transmon_levels: charge cutoff did not converge");
        }
        std::vector<double> doubled = charge_basis_levels(spec, n_levels, 2 * cutoff);
        if (std::abs(doubled[2] - levels[2]) < 1e-3) {
            levels = std::move(doubled);
            break;
        }
        cutoff *= 2;
        levels = std::move(doubled);
    }
    return QutritLevels::from_spectrum(std::move(levels));
}

TransmonSpec fit_transmon(double f01_mhz, double alpha_mhz) {
    if (alpha_mhz >= 0.0) {
        throw std::invalid_argument("fit_transmon: transmon anharmonicity must be negative");
    }
    if (std::abs(alpha_mhz) >= f01_mhz) {
        throw std::invalid_argument("fit_transmon: |alpha| must be below f01");
    }
    TransmonSpec spec;
    spec.ec_mhz = -alpha_mhz;
    spec.ej_mhz = (f01_mhz - alpha_mhz) * (f01_mhz - alpha_mhz) / (8.0 * spec.ec_mhz);

    auto residual = [&](double ej, double ec, double& rf, double& ra) {
        TransmonSpec s{ej, ec, spec.ng, spec.charge_cutoff};
        QutritLevels q = transmon_levels(s, 3);
        rf = q.f01_mhz - f01_mhz;
        ra = q.alpha_mhz - alpha_mhz;
    };

    double rf = 0.0, ra = 0.0;
    for (int iter = 0; iter < 60; ++iter) {
        residual(spec.ej_mhz, spec.ec_mhz, rf, ra);
        if (std::abs(rf) < 1e-6 && std::abs(ra) < 1e-6) {
            return spec;
        }
        const double hj = 1e-6 * spec.ej_mhz;
        const double hc = 1e-6 * spec.ec_mhz;
        double rf_j, ra_j, rf_c, ra_c;
        residual(spec.ej_mhz + hj, spec.ec_mhz, rf_j, ra_j);
        residual(spec.ej_mhz, spec.ec_mhz + hc, rf_c, ra_c);
        const double j00 = (rf_j - rf) / hj, j01 = (rf_c - rf) / hc;
        const double j10 = (ra_j - ra) / hj, j11 = (ra_c - ra) / hc;
        const double det = j00 * j11 - j01 * j10;
        if (std::abs(det) < 1e-30) break;
        double dj = (rf * j11 - ra * j01) / det;
        double dc = (ra * j00 - rf * j10) / det;
        double step = 1.0;
        while (spec.ej_mhz - step * dj <= 0.0 || spec.ec_mhz - step * dc <= 0.0) {
            step *= 0.5;
            if (step < 1e-6) break;
        }
        spec.ej_mhz -= step * dj;
        spec.ec_mhz -= step * dc;
    }
    throw std::runtime_error("fit_transmon: no (E_J, E_C) solution found in bracket");
}

double chi12_closed_form(double g_mhz, double delta_mhz, double alpha_mhz) {
    const double num = -2.0 * g_mhz * g_mhz * alpha_mhz * (alpha_mhz - delta_mhz);
    const double den =
        delta_mhz * (delta_mhz + alpha_mhz) * (delta_mhz + 2.0 * alpha_mhz);
    return 0.5 * num / den;  // half-shift chi12; 2*chi12 is the printed form
}

DispersiveShifts dispersive_shifts_2nd_order(double g_mhz, double delta_mhz,
                                             double alpha_mhz) {
    DispersiveShifts out;
    out.delta_mhz = delta_mhz;
    out.chi_partial_mhz.resize(3);
    for (int i = 0; i < 3; ++i) {
        const double den = delta_mhz + i * alpha_mhz;
        if (std::abs(den) < 1.0) {
            throw std::runtime_error(
                "dispersive_shifts_2nd_order: resonance denominator |delta + " +
                std::to_string(i) + " alpha| < 1 MHz");
        }
        out.chi_partial_mhz[i] = (i + 1) * g_mhz * g_mhz / den;
    }
    out.stark_mhz.resize(3);
    out.stark_mhz[0] = -out.chi_partial_mhz[0];
    out.stark_mhz[1] = out.chi_partial_mhz[0] - out.chi_partial_mhz[1];
    out.stark_mhz[2] = out.chi_partial_mhz[1] - out.chi_partial_mhz[2];
    out.chi01_mhz = 0.5 * (out.stark_mhz[1] - out.stark_mhz[0]);
    out.chi12_mhz = 0.5 * (out.stark_mhz[2] - out.stark_mhz[1]);
    out.dispersive_regime = std::abs(g_mhz / delta_mhz) < 0.3;
    return out;
}

Matrix jc_hamiltonian(const DeviceParams& params) {
    params.validate();
    const QutritLevels q = params.resolved_levels();
    const int nq = params.n_qutrit_levels;
    const int np = params.n_photons;
    const int dim = nq * np;
    auto idx = [np](int i, int n) { return i * np + n; };
    Matrix h = Matrix::Zero(dim, dim);
    for (int i = 0; i < nq; ++i) {
        for (int n = 0; n < np; ++n) {
            h(idx(i, n), idx(i, n)) = q.omega_mhz[i] + params.f_r_mhz * n;
        }
    }
    for (int i = 0; i + 1 < nq; ++i) {
        const double gi = std::sqrt(i + 1.0) * params.g_mhz;
        for (int n = 0; n + 1 < np; ++n) {
            const double v = gi * std::sqrt(n + 1.0);
            h(idx(i, n + 1), idx(i + 1, n)) = v;
            h(idx(i + 1, n), idx(i, n + 1)) = v;
        }
    }
    return h;
}

DressedPulls dressed_cavity_pull(const DeviceParams& params) {
    params.validate();
    const int nq = params.n_qutrit_levels;
    const int np = params.n_photons;
    auto idx = [np](int i, int n) { return i * np + n; };
    EigResult eig = eig_hermitian(jc_hamiltonian(params));

    const int n_states = std::min(3, nq);
    DressedPulls out;
    out.pull_mhz.resize(n_states);
    std::vector<int> claimed(static_cast<size_t>(nq) * np, -1);
    auto dressed_energy = [&](int i, int n) {
        const int bare = idx(i, n);
        int best = -1;
        double best_ov = 0.0;
        for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
            double ov = std::norm(eig.eigenvectors(bare, k));
            if (ov > best_ov) {
                best_ov = ov;
                best = static_cast<int>(k);
            }
        }
        if (best_ov < 0.5) {
            throw std::runtime_error(
                "dressed_cavity_pull: ambiguous labeling for bare state |" +
                std::to_string(i) + "," + std::to_string(n) +
                "> (max overlap " + std::to_string(best_ov) + " < 0.5)");
        }
        if (claimed[best] >= 0) {
            throw std::runtime_error(
                "dressed_cavity_pull: dressed state " + std::to_string(best) +
                " claimed by bare states " + std::to_string(claimed[best]) +
                " and " + std::to_string(idx(i, n)));
        }
        claimed[best] = idx(i, n);
        return eig.eigenvalues[best];
    };
    for (int i = 0; i < n_states; ++i) {
        double e0 = dressed_energy(i, 0);
        double e1 = dressed_energy(i, 1);
        out.pull_mhz[i] = (e1 - e0) - params.f_r_mhz;
    }
    if (n_states >= 3) {
        out.chi01_mhz = 0.5 * (out.pull_mhz[1] - out.pull_mhz[0]);
        out.chi12_mhz = 0.5 * (out.pull_mhz[2] - out.pull_mhz[1]);
    } else {
        out.chi01_mhz = 0.5 * (out.pull_mhz[1] - out.pull_mhz[0]);
        out.chi12_mhz = 0.0;
    }
    return out;
}

double chi12_at_detuning(const DeviceParams& params, double delta_mhz,
                         SweetSpotMode mode) {
    const QutritLevels base = params.resolved_levels();
    if (mode == SweetSpotMode::second_order) {
        return dispersive_shifts_2nd_order(params.g_mhz, delta_mhz, base.alpha_mhz)
            .chi12_mhz;
    }
    DeviceParams p = params;
    p.levels = QutritLevels::ladder(params.f_r_mhz + delta_mhz, base.alpha_mhz,
                                    params.n_qutrit_levels);
    return dressed_cavity_pull(p).chi12_mhz;
}

SweetSpot find_sweet_spot(const DeviceParams& params, double delta_lo_mhz,
                          double delta_hi_mhz, SweetSpotMode mode, double tol_mhz) {
    const QutritLevels base = params.resolved_levels();
    if (mode == SweetSpotMode::second_order) {
        // Eq-level zero of the factored numerator: delta = alpha.
        return SweetSpot{base.alpha_mhz, params.f_r_mhz + base.alpha_mhz};
    }
    double a = delta_lo_mhz, b = delta_hi_mhz;
    double fa = chi12_at_detuning(params, a, mode);
    double fb = chi12_at_detuning(params, b, mode);
    if (fa == 0.0) return SweetSpot{a, params.f_r_mhz + a};
    if (fb == 0.0) return SweetSpot{b, params.f_r_mhz + b};
    if (fa * fb > 0.0) {
        throw std::runtime_error(
            "find_sweet_spot: chi12 does not change sign over the bracket");
    }
    // Bisection with a secant refinement step; the curve is smooth and monotone
    // near the crossing, so this converges well past tol quickly.
    for (int iter = 0; iter < 200 && (b - a) > tol_mhz; ++iter) {
        double mid = 0.5 * (a + b);
        double fm = chi12_at_detuning(params, mid, mode);
        if (fm == 0.0) {
            a = b = mid;
            break;
        }
        if (fa * fm < 0.0) {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
    }
    double root = 0.5 * (a + b);
    if (fa != fb) {
        double secant = a - fa * (b - a) / (fb - fa);
        if (secant > a && secant < b) root = secant;
    }
    return SweetSpot{root, params.f_r_mhz + root};
}

}  // namespace qutritlab

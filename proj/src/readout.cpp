#include "qutritlab/readout.hpp"

#include <cmath>
#include <ostream>

#include <unsupported/Eigen/MatrixFunctions>

namespace qutritlab {

namespace {

struct Segment {
    std::array<Complex, 3> start;   // amplitude at segment begin
    std::array<Complex, 3> steady;  // drive / lambda, zero when undriven
    double duration;
};

std::array<Complex, 3> decay_rates(const ReadoutConfig& cfg) {
    const double delta_d = cfg.drive_frequency_mhz - cfg.cavity_frequency_mhz;
    std::array<Complex, 3> lambda;
    for (int i = 0; i < 3; ++i) {
        lambda[i] = Complex(M_PI * cfg.kappa_mhz,
                            kTwoPi * (cfg.pulls_mhz[i] - delta_d));
    }
    return lambda;
}

std::vector<Segment> build_segments(const ReadoutConfig& cfg,
                                    const std::array<Complex, 3>& lambda) {
    std::vector<Segment> segs;
    std::array<Complex, 3> amp{Complex(0, 0), Complex(0, 0), Complex(0, 0)};
    if (cfg.duration_us > 0.0) {
        Segment s;
        s.start = amp;
        for (int i = 0; i < 3; ++i) s.steady[i] = cfg.drive_amplitude / lambda[i];
        s.duration = cfg.duration_us;
        segs.push_back(s);
        for (int i = 0; i < 3; ++i) {
            amp[i] = s.steady[i] +
                     (s.start[i] - s.steady[i]) * std::exp(-lambda[i] * s.duration);
        }
    }
    if (cfg.ringdown_us > 0.0) {
        Segment s;
        s.start = amp;
        s.steady = {Complex(0, 0), Complex(0, 0), Complex(0, 0)};
        s.duration = cfg.ringdown_us;
        segs.push_back(s);
    }
    return segs;
}

// int_0^T alpha_i(t) conj(alpha_j(t)) dt for one segment.
Complex segment_cross_integral(const Segment& s, const std::array<Complex, 3>& lambda,
                               int i, int j) {
    const Complex si = s.steady[i], sj = s.steady[j];
    const Complex bi = s.start[i] - si, bj = s.start[j] - sj;
    const Complex li = lambda[i], ljc = std::conj(lambda[j]);
    const double t = s.duration;
    Complex out = si * std::conj(sj) * t;
    out += si * std::conj(bj) * (1.0 - std::exp(-ljc * t)) / ljc;
    out += bi * std::conj(sj) * (1.0 - std::exp(-li * t)) / li;
    out += bi * std::conj(bj) * (1.0 - std::exp(-(li + ljc) * t)) / (li + ljc);
    return out;
}

std::array<Complex, 3> segment_end(const Segment& s,
                                   const std::array<Complex, 3>& lambda) {
    std::array<Complex, 3> amp;
    for (int i = 0; i < 3; ++i) {
        amp[i] = s.steady[i] +
                 (s.start[i] - s.steady[i]) * std::exp(-lambda[i] * s.duration);
    }
    return amp;
}

// Kraus set of a population-preserving dephasing map from the PSD factor
// matrix: F = sum_k w_k w_k^dag  ->  K_k = diag(w_k).
void append_dephasing_kraus(const Matrix& factor, std::vector<Matrix>& ops) {
    EigResult eig = eig_hermitian(0.5 * (factor + factor.adjoint()));
    for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
        double lam = eig.eigenvalues[k];
        if (lam <= 1e-14) continue;
        Matrix op = Matrix::Zero(3, 3);
        for (int i = 0; i < 3; ++i) {
            op(i, i) = std::sqrt(lam) * eig.eigenvectors(i, k);
        }
        ops.push_back(op);
    }
}

}  // namespace

void ReadoutConfig::validate() const {
    if (duration_us < 0.0 || ringdown_us < 0.0) {
        throw std::invalid_argument("ReadoutConfig: durations must be nonnegative");
    }
    if (kappa_mhz <= 0.0) {
        throw std::invalid_argument("ReadoutConfig: kappa must be positive");
    }
    if (window_us < 0.0) {
        throw std::invalid_argument("ReadoutConfig: window must be nonnegative");
    }
    if (n_samples < 2) {
        throw std::invalid_argument("ReadoutConfig: need at least two samples");
    }
}

PointerTrajectory pointer_trajectories(const ReadoutConfig& cfg) {
    cfg.validate();
    const auto lambda = decay_rates(cfg);
    const double total = cfg.duration_us + cfg.ringdown_us;
    PointerTrajectory traj;
    traj.time_us.resize(cfg.n_samples);
    for (int i = 0; i < 3; ++i) traj.amplitude[i].resize(cfg.n_samples);
    std::array<Complex, 3> end_of_drive{};
    if (cfg.duration_us > 0.0) {
        for (int i = 0; i < 3; ++i) {
            Complex s = cfg.drive_amplitude / lambda[i];
            end_of_drive[i] = s * (1.0 - std::exp(-lambda[i] * cfg.duration_us));
        }
    }
    for (int k = 0; k < cfg.n_samples; ++k) {
        double t = total * k / (cfg.n_samples - 1.0);
        traj.time_us[k] = t;
        for (int i = 0; i < 3; ++i) {
            Complex a;
            if (t <= cfg.duration_us || cfg.duration_us == 0.0) {
                Complex s = (cfg.duration_us > 0.0) ? cfg.drive_amplitude / lambda[i]
                                                    : Complex(0, 0);
                a = s * (1.0 - std::exp(-lambda[i] * t));
            } else {
                a = end_of_drive[i] * std::exp(-lambda[i] * (t - cfg.duration_us));
            }
            traj.amplitude[i][k] = a;
        }
    }
    return traj;
}

PointerAnalysis analyze_pointers(const ReadoutConfig& cfg) {
    cfg.validate();
    const auto lambda = decay_rates(cfg);
    const auto segs = build_segments(cfg, lambda);
    const double kappa_ang = kTwoPi * cfg.kappa_mhz;

    Matrix cross = Matrix::Zero(3, 3);  // I_ij = int alpha_i conj(alpha_j)
    std::array<Complex, 3> end{Complex(0, 0), Complex(0, 0), Complex(0, 0)};
    for (const Segment& s : segs) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                cross(i, j) += segment_cross_integral(s, lambda, i, j);
            }
        }
        end = segment_end(s, lambda);
    }

    PointerAnalysis out;
    out.end_amplitude = end;
    for (int i = 0; i < 3; ++i) {
        out.steady_amplitude[i] =
            (cfg.duration_us > 0.0) ? cfg.drive_amplitude / lambda[i] : Complex(0, 0);
    }
    out.coherence_factor = Matrix::Zero(3, 3);
    out.end_overlap_abs = Matrix::Zero(3, 3);
    out.kappa_decay = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double dchi = kTwoPi * (cfg.pulls_mhz[i] - cfg.pulls_mhz[j]);
            out.coherence_factor(i, j) = std::exp(Complex(0, -1) * dchi * cross(i, j));
            const double end_sep = std::norm(end[i] - end[j]);
            out.end_overlap_abs(i, j) = std::exp(-0.5 * end_sep);
            const double int_sep =
                cross(i, i).real() + cross(j, j).real() - 2.0 * cross(i, j).real();
            out.kappa_decay(i, j) = std::exp(-0.5 * kappa_ang * int_sep);
            if (i == 0 && j == 1) out.separation01 = kappa_ang * int_sep;
            if (i == 0 && j == 2) out.separation02 = kappa_ang * int_sep;
        }
        out.coherence_factor(i, i) = 1.0;
    }
    out.projective =
        std::min(out.separation01, out.separation02) >= cfg.snr_threshold;
    return out;
}

KrausChannel measurement_channel(const ReadoutConfig& cfg, ReadoutMode mode) {
    const Matrix id = Matrix::Identity(3, 3);
    if (mode == ReadoutMode::ideal_binary) {
        Matrix p0 = Matrix::Zero(3, 3);
        p0(0, 0) = 1.0;
        return KrausChannel({p0, id - p0}, std::vector<double>{+1.0, -1.0});
    }
    if (mode == ReadoutMode::ideal_ternary) {
        std::vector<Matrix> ops;
        for (int i = 0; i < 3; ++i) {
            Matrix p = Matrix::Zero(3, 3);
            p(i, i) = 1.0;
            ops.push_back(p);
        }
        return KrausChannel(std::move(ops), std::vector<double>{+1.0, -1.0, -1.0});
    }

    PointerAnalysis pa = analyze_pointers(cfg);
    if (!pa.projective) {
        // Weak regime: dephasing only, populations untouched, no outcome.
        std::vector<Matrix> ops;
        append_dephasing_kraus(pa.coherence_factor, ops);
        return KrausChannel(std::move(ops));
    }
    // Strong regime: project {0} vs {1,2}, keeping the computed 1-2 coherence
    // factor inside the negative branch.
    Complex f12 = pa.coherence_factor(1, 2);
    double d12 = std::min(1.0, std::abs(f12));
    Complex phase = (std::abs(f12) > 0.0) ? f12 / std::abs(f12) : Complex(1.0, 0.0);
    Matrix p0 = Matrix::Zero(3, 3);
    p0(0, 0) = 1.0;
    Matrix ka = Matrix::Zero(3, 3), kb = Matrix::Zero(3, 3);
    // (K rho K^dag)_{12} carries conj(K_22), so the phase enters conjugated.
    ka(1, 1) = std::sqrt(0.5 * (1.0 + d12));
    ka(2, 2) = std::sqrt(0.5 * (1.0 + d12)) * std::conj(phase);
    kb(1, 1) = std::sqrt(0.5 * (1.0 - d12));
    kb(2, 2) = -std::sqrt(0.5 * (1.0 - d12)) * std::conj(phase);
    std::vector<Matrix> ops{p0, ka};
    std::vector<double> labels{+1.0, -1.0};
    if (kb.cwiseAbs().maxCoeff() > 1e-12) {
        ops.push_back(kb);
        labels.push_back(-1.0);
    }
    return KrausChannel(std::move(ops), std::move(labels));
}

SampledOutcome sample_outcome(const ReadoutConfig& cfg, ReadoutMode mode,
                              const DensityMatrix& rho, Rng& rng,
                              std::uint64_t shot_index,
                              std::optional<double> force_outcome) {
    KrausChannel ch = measurement_channel(cfg, mode);
    auto branches = measure_branches(ch, rho);
    const MeasurementBranch* chosen = nullptr;
    if (force_outcome) {
        for (const auto& b : branches) {
            if (b.label == *force_outcome) chosen = &b;
        }
        if (chosen == nullptr) {
            throw std::invalid_argument("sample_outcome: no branch labeled " +
                                        std::to_string(*force_outcome));
        }
    } else {
        double u = rng.uniform();
        double acc = 0.0;
        for (const auto& b : branches) {
            acc += b.probability;
            if (u < acc) {
                chosen = &b;
                break;
            }
        }
        if (chosen == nullptr) chosen = &branches.back();
    }
    if (chosen->probability <= 1e-15) {
        throw std::runtime_error("sample_outcome: zero-probability branch requested");
    }

    PointerAnalysis pa = analyze_pointers(cfg);
    double signal = 0.0;
    double pop_total = 0.0;
    for (int i = 0; i < 3; ++i) {
        double p = chosen->post_state(i, i).real();
        signal += p * std::abs(pa.steady_amplitude[i]);
        pop_total += p;
    }
    if (pop_total > 0.0) signal /= pop_total;
    signal += cfg.noise_sigma * rng.normal();

    return SampledOutcome{MeasurementRecord{chosen->label, signal, shot_index},
                          DensityMatrix(chosen->post_state)};
}

std::vector<SpectrumPoint> transmission_spectrum(
    const ReadoutConfig& cfg, int prepared, const std::vector<double>& freqs_mhz,
    bool include_relaxation, const std::optional<NoiseParams>& noise) {
    cfg.validate();
    if (prepared < 0 || prepared > 2) {
        throw std::invalid_argument("transmission_spectrum: prepared state index");
    }
    // Occupation weights over the integration window.
    std::array<double, 3> weights{0.0, 0.0, 0.0};
    weights[prepared] = 1.0;
    if (include_relaxation) {
        if (!noise) {
            throw std::invalid_argument(
                "transmission_spectrum: relaxation weighting needs noise parameters");
        }
        NoiseRates r = noise_rates(*noise);
        Eigen::Matrix3d rate;
        rate << -r.gamma01, r.gamma10, 0.0,
                 r.gamma01, -r.gamma10, r.gamma21,
                 0.0, 0.0, -r.gamma21;
        Eigen::Vector3d p0 = Eigen::Vector3d::Zero();
        p0[prepared] = 1.0;
        const int steps = 400;
        Eigen::Vector3d avg = Eigen::Vector3d::Zero();
        double dt = cfg.window_us / steps;
        Eigen::Matrix3d prop = (rate * dt).exp();
        Eigen::Vector3d p = p0;
        for (int k = 0; k < steps; ++k) {
            Eigen::Vector3d next = prop * p;
            avg += 0.5 * dt * (p + next);
            p = next;
        }
        avg /= cfg.window_us;
        for (int i = 0; i < 3; ++i) weights[i] = avg[i];
    }

    std::vector<SpectrumPoint> out;
    out.reserve(freqs_mhz.size());
    for (double f : freqs_mhz) {
        ReadoutConfig local = cfg;
        local.drive_frequency_mhz = f;
        auto lambda = decay_rates(local);
        SpectrumPoint pt;
        pt.drive_frequency_mhz = f;
        pt.steady_amplitude = cfg.drive_amplitude / lambda[prepared];
        pt.mean_abs = 0.0;
        for (int i = 0; i < 3; ++i) {
            pt.mean_abs += weights[i] * std::abs(cfg.drive_amplitude / lambda[i]);
        }
        out.push_back(pt);
    }
    return out;
}

void write_trajectory_csv(std::ostream& os, const PointerTrajectory& traj) {
    os << "time_us";
    for (int i = 0; i < 3; ++i) {
        os << ",re" << i << ",im" << i << ",abs" << i;
    }
    os << "\n";
    char buf[64];
    for (size_t k = 0; k < traj.time_us.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.9g", traj.time_us[k]);
        os << buf;
        for (int i = 0; i < 3; ++i) {
            Complex a = traj.amplitude[i][k];
            std::snprintf(buf, sizeof(buf), ",%.9g,%.9g,%.9g", a.real(), a.imag(),
                          std::abs(a));
            os << buf;
        }
        os << "\n";
    }
}

void write_spectrum_csv(std::ostream& os,
                        const std::vector<std::vector<SpectrumPoint>>& curves) {
    os << "freq_mhz";
    for (size_t c = 0; c < curves.size(); ++c) {
        os << ",re" << c << ",im" << c << ",abs" << c;
    }
    os << "\n";
    if (curves.empty()) return;
    char buf[64];
    for (size_t k = 0; k < curves.front().size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.9g", curves.front()[k].drive_frequency_mhz);
        os << buf;
        for (const auto& curve : curves) {
            const SpectrumPoint& pt = curve[k];
            std::snprintf(buf, sizeof(buf), ",%.9g,%.9g,%.9g",
                          pt.steady_amplitude.real(), pt.steady_amplitude.imag(),
                          pt.mean_abs);
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace qutritlab

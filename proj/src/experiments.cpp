#include "qutritlab/experiments.hpp"

#include <cmath>
#include <sstream>

#include "qutritlab/fitting.hpp"
#include "qutritlab/noise.hpp"
#include "qutritlab/tomography.hpp"

namespace qutritlab {

namespace {

using nlohmann::json;

const char* kColors[] = {"#c23b22", "#4f9ecb", "#1f3f8f", "#3aa655",
                         "#8e5fa8", "#d9a21b", "#444444", "#b05c7f"};

Observable degenerate_observable() {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    a(2, 2) = -1.0;
    return Observable(a);
}

PulseSequence psi0_preparation() {
    const double theta = 2.0 * std::acos(1.0 / std::sqrt(3.0));
    return PulseSequence{{Rotation{0, RotationAxis::x, theta},
                          Rotation{1, RotationAxis::x, 0.5 * M_PI}}};
}

DensityMatrix prep_state(const PulseSequence& seq) {
    Vector ket = compile_sequence(seq).matrix() * basis_ket(3, 0);
    return DensityMatrix::pure(ket);
}

double experiment_number(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<double>();
}

bool experiment_flag(const json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<bool>();
}

// Exact or binomially sampled tomography records for one state.
RealVector simulate_records(const TomographyDesign& design, const DensityMatrix& rho,
                            std::uint64_t shots, Rng* rng) {
    RealVector records(design.matrix.rows());
    for (Eigen::Index k = 0; k < records.size(); ++k) {
        double mean = (design.effects[static_cast<size_t>(k)] * rho.matrix())
                          .trace()
                          .real();
        if (shots == 0) {
            records[k] = mean;
            continue;
        }
        double p = std::clamp(0.5 * (1.0 + mean), 0.0, 1.0);
        std::uint64_t hits = 0;
        for (std::uint64_t s = 0; s < shots; ++s) {
            if (rng->uniform() < p) ++hits;
        }
        records[k] = 2.0 * static_cast<double>(hits) / static_cast<double>(shots) - 1.0;
    }
    return records;
}

std::string f(double v) { return format_double(v); }

}  // namespace

std::array<double, 3> state_pulls(const DeviceParams& dev, double delta_mhz,
                                  SweetSpotMode mode) {
    if (mode == SweetSpotMode::second_order) {
        const QutritLevels q = dev.resolved_levels();
        DispersiveShifts s =
            dispersive_shifts_2nd_order(dev.g_mhz, delta_mhz, q.alpha_mhz);
        return {s.stark_mhz[0], s.stark_mhz[1], s.stark_mhz[2]};
    }
    DeviceParams p = dev;
    const QutritLevels q = dev.resolved_levels();
    p.levels = QutritLevels::ladder(dev.f_r_mhz + delta_mhz, q.alpha_mhz,
                                    dev.n_qutrit_levels);
    DressedPulls dp = dressed_cavity_pull(p);
    return {dp.pull_mhz[0], dp.pull_mhz[1], dp.pull_mhz[2]};
}

double calibrate_drive_amplitude(ReadoutConfig base, double target_d01) {
    base.drive_amplitude = 1.0;
    base.ringdown_us = 0.0;
    PointerAnalysis pa = analyze_pointers(base);
    double exponent_unit = -std::log(std::abs(pa.coherence_factor(0, 1)));
    if (exponent_unit <= 0.0) {
        throw std::runtime_error(
            "calibrate_drive_amplitude: pointer states do not separate; is the "
            "ground-state pull distinct?");
    }
    return std::sqrt(-std::log(target_d01) / exponent_unit);
}

RunContext prepare_run(const ExperimentConfig& cfg) {
    RunContext ctx;
    ctx.cfg = cfg;
    const QutritLevels levels = cfg.device.resolved_levels();
    const double delta = levels.f01_mhz - cfg.device.f_r_mhz;
    ctx.pulls_mhz = state_pulls(cfg.device, delta, cfg.pulls_mode);
    ctx.drive_frequency_mhz =
        cfg.drive_frequency_mhz ? *cfg.drive_frequency_mhz : cfg.device.f_r_mhz;
    if (cfg.drive_amplitude) {
        ctx.drive_amplitude = *cfg.drive_amplitude;
    } else {
        ReadoutConfig base;
        base.cavity_frequency_mhz = cfg.device.f_r_mhz;
        base.drive_frequency_mhz = ctx.drive_frequency_mhz;
        base.duration_us = 0.15;
        base.kappa_mhz = cfg.device.kappa_mhz;
        base.pulls_mhz = ctx.pulls_mhz;
        ctx.drive_amplitude = calibrate_drive_amplitude(base);
    }
    ctx.hash = config_hash(cfg.resolved);
    return ctx;
}

ReadoutConfig readout_config(const RunContext& ctx) {
    ReadoutConfig rc;
    rc.cavity_frequency_mhz = ctx.cfg.device.f_r_mhz;
    rc.drive_frequency_mhz = ctx.drive_frequency_mhz;
    rc.drive_amplitude = ctx.drive_amplitude;
    rc.duration_us = ctx.cfg.readout_duration_us;
    rc.ringdown_us = ctx.cfg.ringdown_us;
    rc.kappa_mhz = ctx.cfg.device.kappa_mhz;
    rc.pulls_mhz = ctx.pulls_mhz;
    rc.window_us = ctx.cfg.window_us;
    rc.noise_sigma = ctx.cfg.record_sigma;
    rc.snr_threshold = ctx.cfg.snr_threshold;
    return rc;
}

KrausChannel readout_window_channel(const RunContext& ctx) {
    ReadoutConfig rc = readout_config(ctx);
    KrausChannel readout = measurement_channel(rc, ReadoutMode::general);
    double window = rc.duration_us + rc.ringdown_us;
    KrausChannel decay =
        free_evolution_channel(ctx.cfg.noise, EvolutionSpec{window, 0.0, 0.0});
    return compose(decay, readout);
}

RunReport exp_chi_curve(const ExperimentConfig& cfg) {
    validate_keys(cfg.experiment, {"delta_min_mhz", "delta_max_mhz", "n_points"},
                  "experiment (chi-curve)");
    RunContext ctx = prepare_run(cfg);
    const QutritLevels levels = cfg.device.resolved_levels();
    const double alpha = levels.alpha_mhz;
    const double lo = experiment_number(cfg.experiment, "delta_min_mhz", alpha - 120.0);
    const double hi = experiment_number(cfg.experiment, "delta_max_mhz", alpha + 90.0);
    const int n = static_cast<int>(
        experiment_number(cfg.experiment, "n_points", 121));

    std::ostringstream csv;
    csv << csv_header("chi-curve", ctx.hash);
    csv << "delta_mhz,chi12_2nd_mhz,chi12_exact_mhz\n";
    SvgSeries s2{{}, {}, kColors[0], false}, sx{{}, {}, kColors[2], false};
    for (int k = 0; k < n; ++k) {
        double d = lo + (hi - lo) * k / (n - 1.0);
        double c2 = chi12_at_detuning(cfg.device, d, SweetSpotMode::second_order);
        double cx = chi12_at_detuning(cfg.device, d, SweetSpotMode::exact);
        csv << f(d) << "," << f(c2) << "," << f(cx) << "\n";
        s2.x.push_back(d);
        s2.y.push_back(c2);
        sx.x.push_back(d);
        sx.y.push_back(cx);
    }
    SweetSpot second = find_sweet_spot(cfg.device, lo, hi, SweetSpotMode::second_order);
    SweetSpot exact = find_sweet_spot(cfg.device, lo, hi, SweetSpotMode::exact);

    RunReport report;
    report.experiment = "chi-curve";
    report.config_hash = ctx.hash;
    report.summary = {{"crossing_2nd_mhz", second.delta_mhz},
                      {"crossing_exact_mhz", exact.delta_mhz},
                      {"f01_2nd_mhz", second.f01_mhz},
                      {"f01_exact_mhz", exact.f01_mhz}};
    std::filesystem::path dir(cfg.out_dir);
    write_text_file(dir / "chi_curve.csv", csv.str());
    write_text_file(dir / "chi_curve.svg",
                    svg_header("chi-curve", ctx.hash) +
                        render_svg("dispersive shift vs detuning", "delta (MHz)",
                                   "chi12 (MHz)", {s2, sx}));
    report.manifest = {"chi_curve.csv", "chi_curve.svg"};
    write_report(dir, report);
    return report;
}

RunReport exp_spectroscopy(const ExperimentConfig& cfg) {
    validate_keys(cfg.experiment, {"span_mhz", "n_points", "include_relaxation"},
                  "experiment (spectroscopy)");
    RunContext ctx = prepare_run(cfg);
    const double span = experiment_number(cfg.experiment, "span_mhz", 6.0);
    const int n = static_cast<int>(experiment_number(cfg.experiment, "n_points", 241));
    const bool relax = experiment_flag(cfg.experiment, "include_relaxation", true);

    ReadoutConfig rc = readout_config(ctx);
    std::vector<double> freqs(n);
    for (int k = 0; k < n; ++k) {
        freqs[k] = cfg.device.f_r_mhz - 0.5 * span + span * k / (n - 1.0);
    }
    std::vector<std::vector<SpectrumPoint>> curves;
    std::vector<SvgSeries> series;
    for (int i = 0; i < 3; ++i) {
        curves.push_back(transmission_spectrum(rc, i, freqs, relax, cfg.noise));
        SvgSeries s{{}, {}, kColors[i], false};
        for (const auto& pt : curves.back()) {
            s.x.push_back(pt.drive_frequency_mhz);
            s.y.push_back(pt.mean_abs);
        }
        series.push_back(std::move(s));
    }

    double max_gap_12 = 0.0;
    double max_gap_12_ideal = 0.0;  // bare steady-state response, no relaxation
    std::array<double, 3> peak{};
    for (int i = 0; i < 3; ++i) {
        double best = -1.0;
        for (const auto& pt : curves[static_cast<size_t>(i)]) {
            if (pt.mean_abs > best) {
                best = pt.mean_abs;
                peak[static_cast<size_t>(i)] = pt.drive_frequency_mhz;
            }
        }
    }
    for (int k = 0; k < n; ++k) {
        max_gap_12 = std::max(max_gap_12,
                              std::abs(curves[1][static_cast<size_t>(k)].mean_abs -
                                       curves[2][static_cast<size_t>(k)].mean_abs));
        max_gap_12_ideal = std::max(
            max_gap_12_ideal,
            std::abs(std::abs(curves[1][static_cast<size_t>(k)].steady_amplitude) -
                     std::abs(curves[2][static_cast<size_t>(k)].steady_amplitude)));
    }

    std::ostringstream body;
    write_spectrum_csv(body, curves);
    RunReport report;
    report.experiment = "spectroscopy";
    report.config_hash = ctx.hash;
    report.summary = {{"peak_mhz", {peak[0], peak[1], peak[2]}},
                      {"pulls_mhz", {ctx.pulls_mhz[0], ctx.pulls_mhz[1], ctx.pulls_mhz[2]}},
                      {"max_gap_excited_curves", max_gap_12},
                      {"max_gap_excited_ideal", max_gap_12_ideal},
                      {"include_relaxation", relax}};
    std::filesystem::path dir(cfg.out_dir);
    write_text_file(dir / "spectroscopy.csv",
                    csv_header("spectroscopy", ctx.hash) + body.str());
    write_text_file(dir / "spectroscopy.svg",
                    svg_header("spectroscopy", ctx.hash) +
                        render_svg("cavity transmission by prepared state",
                                   "drive frequency (MHz)", "integrated amplitude",
                                   series));
    std::ostringstream traj;
    write_trajectory_csv(traj, pointer_trajectories(rc));
    write_text_file(dir / "pointer_trajectory.csv",
                    csv_header("spectroscopy", ctx.hash) + traj.str());
    report.manifest = {"spectroscopy.csv", "spectroscopy.svg",
                       "pointer_trajectory.csv"};
    write_report(dir, report);
    return report;
}

RunReport exp_spiral(const ExperimentConfig& cfg) {
    validate_keys(cfg.experiment,
                  {"f01_offsets_mhz", "max_length_us", "n_lengths", "noiseless",
                   "reconstruct"},
                  "experiment (spiral)");
    RunContext ctx = prepare_run(cfg);
    std::vector<double> offsets{-30.0, -15.0, 0.0, 15.0, 30.0};
    if (cfg.experiment.contains("f01_offsets_mhz")) {
        offsets = cfg.experiment.at("f01_offsets_mhz").get<std::vector<double>>();
    }
    const double max_len = experiment_number(cfg.experiment, "max_length_us", 1.5);
    const int n_len = static_cast<int>(experiment_number(cfg.experiment, "n_lengths", 16));
    const bool noiseless = experiment_flag(cfg.experiment, "noiseless", false);
    const bool reconstruct = experiment_flag(cfg.experiment, "reconstruct", true);

    const QutritLevels levels = cfg.device.resolved_levels();
    SweetSpot spot = find_sweet_spot(
        cfg.device, levels.alpha_mhz - 90.0, levels.alpha_mhz + 60.0, cfg.pulls_mode);

    PulseSequence prep{{Rotation{0, RotationAxis::x, M_PI},
                        Rotation{1, RotationAxis::x, 0.5 * M_PI}}};
    DensityMatrix rho0 = prep_state(prep);
    TomographyDesign design = build_design(table1_tomography_set(),
                                           degenerate_observable());

    std::ostringstream csv;
    csv << csv_header("spiral", ctx.hash);
    csv << "f01_mhz,length_us,re_rho12,im_rho12,abs_rho12\n";
    std::vector<SvgSeries> series;
    json spiral_summary = json::array();

    for (size_t oi = 0; oi < offsets.size(); ++oi) {
        const double f01 = spot.f01_mhz + offsets[oi];
        const double delta = f01 - cfg.device.f_r_mhz;
        std::array<double, 3> pulls = state_pulls(cfg.device, delta, cfg.pulls_mode);
        SvgSeries s{{}, {}, kColors[oi % 8], true};
        double prev_abs = 1e9;
        bool monotone = true;
        for (int li = 0; li < n_len; ++li) {
            double tau = max_len * li / (n_len - 1.0);
            ReadoutConfig rc = readout_config(ctx);
            rc.pulls_mhz = pulls;
            rc.duration_us = tau;
            rc.ringdown_us = 0.0;
            Matrix s_op = Matrix::Identity(9, 9);
            if (tau > 0.0) {
                s_op = superoperator(measurement_channel(rc, ReadoutMode::general));
            }
            if (!noiseless) {
                s_op = free_evolution_superoperator(cfg.noise,
                                                    EvolutionSpec{2.0, 0.0, 0.0}) *
                       s_op;
            }
            DensityMatrix rho = apply_channel(channel_from_superoperator(s_op, 3), rho0);
            Complex r12;
            if (reconstruct) {
                RealVector records = simulate_records(design, rho, 0, nullptr);
                MleResult mle = mle_state(design, records);
                r12 = mle.state.matrix()(1, 2);
            } else {
                r12 = rho.matrix()(1, 2);
            }
            csv << f(f01) << "," << f(tau) << "," << f(r12.real()) << ","
                << f(r12.imag()) << "," << f(std::abs(r12)) << "\n";
            s.x.push_back(r12.real());
            s.y.push_back(r12.imag());
            if (li > 0 && std::abs(r12) > prev_abs + 1e-12) monotone = false;
            prev_abs = std::abs(r12);
        }
        series.push_back(std::move(s));
        spiral_summary.push_back({{"f01_mhz", f01},
                                  {"offset_mhz", offsets[oi]},
                                  {"abs_rho12_monotone", monotone},
                                  {"final_abs_rho12", prev_abs}});
    }

    RunReport report;
    report.experiment = "spiral";
    report.config_hash = ctx.hash;
    report.summary = {{"sweet_spot_f01_mhz", spot.f01_mhz},
                      {"curves", spiral_summary},
                      {"noiseless", noiseless}};
    std::filesystem::path dir(cfg.out_dir);
    write_text_file(dir / "spiral.csv", csv.str());
    write_text_file(dir / "spiral.svg",
                    svg_header("spiral", ctx.hash) +
                        render_svg("rho12 under inserted readout", "Re rho12",
                                   "Im rho12", series));
    report.manifest = {"spiral.csv", "spiral.svg"};
    write_report(dir, report);
    return report;
}

namespace {

struct RamseyTrace {
    std::vector<double> delays;
    std::vector<double> signal;
    std::vector<double> coherence_abs;
};

RamseyTrace simulate_ramsey(const RunContext& ctx, int transition, bool with_readout,
                            double max_delay, int n_points, double detuning_mhz) {
    const ExperimentConfig& cfg = ctx.cfg;
    RamseyTrace trace;
    Rotation half{transition, RotationAxis::x, 0.5 * M_PI};
    UnitaryMatrix u_half = compile_rotation(half);
    DensityMatrix rho0 = DensityMatrix::pure(basis_ket(3, 0));
    Matrix prep = u_half.matrix();
    if (transition == 1) {
        prep = u_half.matrix() * compile_rotation({0, RotationAxis::x, M_PI}).matrix();
    }
    EvolutionSpec spec{0.0, transition == 0 ? detuning_mhz : 0.0,
                       transition == 1 ? detuning_mhz : 0.0};
    for (int k = 0; k < n_points; ++k) {
        double t = max_delay * k / (n_points - 1.0);
        spec.duration_us = t;
        Matrix s_op = free_evolution_superoperator(cfg.noise, spec);
        if (with_readout && t > 2.0) {
            ReadoutConfig rc = readout_config(ctx);
            rc.duration_us = t - 2.0;
            rc.ringdown_us = 2.0;
            s_op = s_op * superoperator(measurement_channel(rc, ReadoutMode::general));
        }
        Matrix rho_mid_vec = s_op * vectorize(prep * rho0.matrix() * prep.adjoint());
        Matrix rho_mid = unvectorize(rho_mid_vec, 3, 3);
        trace.coherence_abs.push_back(
            std::abs(rho_mid(transition, transition + 1)));
        Matrix rho_final =
            u_half.matrix() * rho_mid * u_half.matrix().adjoint();
        int level = transition + 1;
        trace.delays.push_back(t);
        trace.signal.push_back(rho_final(level, level).real());
    }
    return trace;
}

}  // namespace

RunReport exp_ramsey(const ExperimentConfig& cfg) {
    validate_keys(cfg.experiment,
                  {"transition", "with_readout", "max_delay_us", "n_points",
                   "detuning_mhz"},
                  "experiment (ramsey)");
    RunContext ctx = prepare_run(cfg);
    std::string trans_str = cfg.experiment.value("transition", std::string("01"));
    if (trans_str != "01" && trans_str != "12") {
        throw config_error("ramsey: transition must be '01' or '12'");
    }
    const int transition = trans_str == "12" ? 1 : 0;
    const bool with_readout = experiment_flag(cfg.experiment, "with_readout", false);
    const double max_delay = experiment_number(cfg.experiment, "max_delay_us", 20.0);
    const int n_points = static_cast<int>(
        experiment_number(cfg.experiment, "n_points", 161));
    const double detuning = experiment_number(cfg.experiment, "detuning_mhz", 1.0);

    RamseyTrace trace =
        simulate_ramsey(ctx, transition, with_readout, max_delay, n_points, detuning);

    // Fit the expected fringe forms.
    FitResult fit;
    if (transition == 0) {
        auto model = [](double t, const RealVector& p) {
            return 0.5 * (std::exp(-t / p[0]) * std::cos(kTwoPi * p[1] * t) + 1.0);
        };
        RealVector p0(2);
        p0 << cfg.noise.t2_01_us * 1.15, detuning * 0.98;
        fit = fit_least_squares(trace.delays, trace.signal, model, p0);
    } else {
        const double t1 = cfg.noise.t1_01_us;
        auto model = [t1](double t, const RealVector& p) {
            return 0.5 * (std::exp(-t / p[0]) * std::cos(kTwoPi * p[1] * t) +
                          p[2] * std::exp(-t / t1) + p[3]);
        };
        RealVector p0(4);
        p0 << cfg.noise.t2_12_us * 1.15, detuning * 0.98, 1.0, 0.05;
        fit = fit_least_squares(trace.delays, trace.signal, model, p0);
    }

    double max_coh_after_2us = 0.0;
    for (size_t k = 0; k < trace.delays.size(); ++k) {
        if (trace.delays[k] >= 2.15) {
            max_coh_after_2us = std::max(max_coh_after_2us, trace.coherence_abs[k]);
        }
    }

    std::ostringstream csv;
    csv << csv_header("ramsey", ctx.hash);
    csv << "delay_us,signal,coherence_abs\n";
    SvgSeries s{{}, {}, kColors[with_readout ? 2 : 0], false};
    for (size_t k = 0; k < trace.delays.size(); ++k) {
        csv << f(trace.delays[k]) << "," << f(trace.signal[k]) << ","
            << f(trace.coherence_abs[k]) << "\n";
        s.x.push_back(trace.delays[k]);
        s.y.push_back(trace.signal[k]);
    }

    RunReport report;
    report.experiment = "ramsey";
    report.config_hash = ctx.hash;
    report.summary = {{"transition", trans_str},
                      {"with_readout", with_readout},
                      {"fitted_t2_us", fit.params[0]},
                      {"fitted_detuning_mhz", fit.params[1]},
                      {"input_t2_us",
                       transition == 0 ? cfg.noise.t2_01_us : cfg.noise.t2_12_us},
                      {"fit_rms", fit.rms},
                      {"fit_converged", fit.converged},
                      {"max_coherence_delay_gt_2us", max_coh_after_2us}};
    std::filesystem::path dir(cfg.out_dir);
    std::string stem = "ramsey_" + trans_str + (with_readout ? "_readout" : "");
    write_text_file(dir / (stem + ".csv"), csv.str());
    write_text_file(dir / (stem + ".svg"),
                    svg_header("ramsey", ctx.hash) +
                        render_svg("ramsey fringes " + trans_str, "delay (us)",
                                   "population", {s}));
    report.manifest = {stem + ".csv", stem + ".svg"};
    write_report(dir, report);
    return report;
}

RunReport exp_state_tomo(const ExperimentConfig& cfg) {
    validate_keys(cfg.experiment,
                  {"extra_readout", "shots", "delay_us", "prep_pulses"},
                  "experiment (state-tomo)");
    RunContext ctx = prepare_run(cfg);
    const bool extra_readout = experiment_flag(cfg.experiment, "extra_readout", false);
    const auto shots = static_cast<std::uint64_t>(
        experiment_number(cfg.experiment, "shots", 0));
    const double delay = experiment_number(cfg.experiment, "delay_us", 0.45);

    PulseSequence prep = psi0_preparation();
    if (cfg.experiment.contains("prep_pulses")) {
        try {
            prep = parse_sequence(cfg.experiment.at("prep_pulses").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("state-tomo: ") + e.what());
        }
    }
    DensityMatrix rho_b = prep_state(prep);
    KrausChannel ideal = measurement_channel(readout_config(ctx),
                                             ReadoutMode::ideal_binary);
    DensityMatrix rho_a = apply_channel(ideal, rho_b);

    Matrix s_op = Matrix::Identity(9, 9);
    if (extra_readout) {
        ReadoutConfig rc = readout_config(ctx);
        s_op = superoperator(measurement_channel(rc, ReadoutMode::general));
        double window = rc.duration_us + rc.ringdown_us;
        double rest = std::max(0.0, delay - window);
        s_op = free_evolution_superoperator(cfg.noise,
                                            EvolutionSpec{window + rest, 0.0, 0.0}) *
               s_op;
    } else {
        s_op = free_evolution_superoperator(cfg.noise, EvolutionSpec{delay, 0.0, 0.0});
    }
    DensityMatrix rho_final =
        apply_channel(channel_from_superoperator(s_op, 3), rho_b);

    TomographyDesign design = build_design(table1_tomography_set(),
                                           degenerate_observable());
    Rng rng(cfg.seed);
    RealVector records = simulate_records(design, rho_final, shots, &rng);
    MleOptions opts;
    if (shots > 0) {
        opts.binomial = true;
        opts.shots_per_row = static_cast<double>(shots);
    }
    MleResult mle = mle_state(design, records, opts);

    double fid_target = extra_readout ? state_fidelity(mle.state, rho_a)
                                      : state_fidelity(mle.state, rho_b);

    RunReport report;
    report.experiment = "state-tomo";
    report.config_hash = ctx.hash;
    report.summary = {{"extra_readout", extra_readout},
                      {"shots", shots},
                      {"delay_us", delay},
                      {"fidelity_to_target", fid_target},
                      {"mle_residual", mle.residual},
                      {"mle_iterations", mle.iterations},
                      {"drive_amplitude", ctx.drive_amplitude}};
    json payload;
    payload["prep_pulses"] = format_sequence(prep);
    payload["reconstructed"] = matrix_to_json(mle.state.matrix());
    payload["target"] =
        matrix_to_json(extra_readout ? rho_a.matrix() : rho_b.matrix());
    payload["records"] = std::vector<double>(records.data(),
                                             records.data() + records.size());
    payload["summary"] = report.summary;
    std::filesystem::path dir(cfg.out_dir);
    std::string stem = extra_readout ? "state_tomo_with_readout" : "state_tomo";
    write_json_file(dir / (stem + ".json"), "state-tomo", ctx.hash, payload);

    std::ostringstream design_csv;
    design_csv << csv_header("state-tomo", ctx.hash);
    design_csv << "row";
    for (int c = 0; c < 9; ++c) design_csv << ",b" << c;
    design_csv << "\n";
    for (Eigen::Index r = 0; r < design.matrix.rows(); ++r) {
        design_csv << r + 1;
        for (Eigen::Index c = 0; c < design.matrix.cols(); ++c) {
            design_csv << "," << f(design.matrix(r, c));
        }
        design_csv << "\n";
    }
    write_text_file(dir / "design_matrix.csv", design_csv.str());

    report.manifest = {stem + ".json", "design_matrix.csv"};
    write_report(dir, report);
    return report;
}

RunReport exp_process_tomo(const ExperimentConfig& cfg) {
    validate_keys(cfg.experiment, {"shots"}, "experiment (process-tomo)");
    RunContext ctx = prepare_run(cfg);
    const auto shots = static_cast<std::uint64_t>(
        experiment_number(cfg.experiment, "shots", 0));

    KrausChannel window = readout_window_channel(ctx);
    std::vector<DensityMatrix> preps = table1_preparation_states();
    TomographyDesign design = build_design(table1_tomography_set(),
                                           degenerate_observable());
    Rng rng(cfg.seed);
    RealMatrix records(preps.size(), design.matrix.rows());
    for (size_t p = 0; p < preps.size(); ++p) {
        DensityMatrix out = apply_channel(window, preps[p]);
        records.row(static_cast<Eigen::Index>(p)) =
            simulate_records(design, out, shots, &rng).transpose();
    }
    ProcessMleResult fit = mle_process(preps, design, records);
    ProcessMatrix chi_ideal = ideal_process_matrix(
        measurement_channel(readout_config(ctx), ReadoutMode::ideal_binary));
    double fidelity = process_fidelity(chi_ideal, fit.chi);

    RunReport report;
    report.experiment = "process-tomo";
    report.config_hash = ctx.hash;
    report.summary = {{"process_fidelity_to_ideal", fidelity},
                      {"mle_residual", fit.residual},
                      {"mle_iterations", fit.iterations},
                      {"shots", shots},
                      {"drive_amplitude", ctx.drive_amplitude}};
    json payload;
    payload["chi_meas"] = matrix_to_json(fit.chi.chi);
    payload["chi_ideal"] = matrix_to_json(chi_ideal.chi);
    payload["summary"] = report.summary;
    std::filesystem::path dir(cfg.out_dir);
    write_json_file(dir / "process_tomo.json", "process-tomo", ctx.hash, payload);
    report.manifest = {"process_tomo.json"};
    write_report(dir, report);
    return report;
}

RunReport exp_contextuality(const ExperimentConfig& cfg) {
    validate_keys(cfg.experiment, {"haar_samples"}, "experiment (contextuality)");
    RunContext ctx = prepare_run(cfg);
    const int haar = static_cast<int>(
        experiment_number(cfg.experiment, "haar_samples", 1000));

    Vector e0 = basis_ket(3, 0);
    Vector psi1 = (basis_ket(3, 1) + basis_ket(3, 2)) / std::sqrt(2.0);
    DensityMatrix rho_psi1 = DensityMatrix::pure(psi1);
    std::vector<DensityMatrix> ensemble = default_epsilon_ensemble(cfg.seed, haar);

    // Ideal degenerate procedures commute for orthogonal rays.
    EpsilonReport eps_ideal = epsilon_uv(ideal_binary_procedure(e0),
                                         ideal_binary_procedure(psi1), ensemble);

    // Fully resolving readout: same observable, strong disturbance.
    MeasurementProcedure t0 = ternary_procedure(e0);
    MeasurementProcedure tpsi = ternary_procedure(psi1);
    double first_then = sequential_expectation(tpsi, t0, rho_psi1,
                                               RecordWhich::record_first);
    double then_first = sequential_expectation(t0, tpsi, rho_psi1,
                                               RecordWhich::record_second);
    EpsilonReport eps_ternary = epsilon_uv(tpsi, t0, ensemble);

    // The simulated readout: reconstruct chi of the measurement window, then
    // evaluate the bound assuming ideal pulses and contrast.
    KrausChannel window = readout_window_channel(ctx);
    std::vector<DensityMatrix> preps = table1_preparation_states();
    TomographyDesign design = build_design(table1_tomography_set(),
                                           degenerate_observable());
    RealMatrix records(preps.size(), design.matrix.rows());
    for (size_t p = 0; p < preps.size(); ++p) {
        DensityMatrix out = apply_channel(window, preps[p]);
        records.row(static_cast<Eigen::Index>(p)) =
            simulate_records(design, out, 0, nullptr).transpose();
    }
    ProcessMatrix chi_meas = mle_process(preps, design, records).chi;
    EpsilonReport eps_sim = epsilon_from_process(chi_meas, e0, psi1, ensemble);
    EpsilonReport eps_sim_rev = epsilon_from_process(chi_meas, psi1, e0, ensemble);
    double eps_sim_exact = epsilon_from_process_exact(chi_meas, e0, psi1);

    // Same bound evaluated directly on labeled measurement procedures built
    // from the simulated channel.
    ReadoutConfig rc = readout_config(ctx);
    KrausChannel labeled = measurement_channel(rc, ReadoutMode::general);
    KrausChannel decay = free_evolution_channel(
        cfg.noise, EvolutionSpec{rc.duration_us + rc.ringdown_us, 0.0, 0.0});
    KrausChannel window_labeled = compose_keep_labels(decay, labeled);
    EpsilonReport eps_proc =
        epsilon_uv(procedure_from_channel(e0, window_labeled),
                   procedure_from_channel(psi1, window_labeled), ensemble);

    RunReport report;
    report.experiment = "contextuality";
    report.config_hash = ctx.hash;
    report.summary = {{"epsilon_ideal", eps_ideal.epsilon},
                      {"ternary_record_first", first_then},
                      {"ternary_record_second", then_first},
                      {"epsilon_ternary", eps_ternary.epsilon},
                      {"epsilon_sim_0psi1", eps_sim.epsilon},
                      {"epsilon_sim_psi1_0", eps_sim_rev.epsilon},
                      {"epsilon_sim_0psi1_exact", eps_sim_exact},
                      {"epsilon_procedures", eps_proc.epsilon},
                      {"haar_samples", haar}};
    std::filesystem::path dir(cfg.out_dir);
    write_json_file(dir / "contextuality.json", "contextuality", ctx.hash,
                    report.summary);
    report.manifest = {"contextuality.json"};
    write_report(dir, report);
    return report;
}

RunReport exp_sweet_spot(const ExperimentConfig& cfg) {
    validate_keys(cfg.experiment, {"bracket_lo_mhz", "bracket_hi_mhz"},
                  "experiment (sweet-spot)");
    RunContext ctx = prepare_run(cfg);
    const QutritLevels levels = cfg.device.resolved_levels();
    const double lo = experiment_number(cfg.experiment, "bracket_lo_mhz",
                                        levels.alpha_mhz - 90.0);
    const double hi = experiment_number(cfg.experiment, "bracket_hi_mhz",
                                        levels.alpha_mhz + 60.0);
    SweetSpot second = find_sweet_spot(cfg.device, lo, hi, SweetSpotMode::second_order);
    SweetSpot exact = find_sweet_spot(cfg.device, lo, hi, SweetSpotMode::exact);

    TransmonSpec fitted = fit_transmon(levels.f01_mhz, levels.alpha_mhz);

    RunReport report;
    report.experiment = "sweet-spot";
    report.config_hash = ctx.hash;
    report.summary = {{"delta_2nd_mhz", second.delta_mhz},
                      {"f01_2nd_mhz", second.f01_mhz},
                      {"delta_exact_mhz", exact.delta_mhz},
                      {"f01_exact_mhz", exact.f01_mhz},
                      {"fit_ec_mhz", fitted.ec_mhz},
                      {"fit_ej_mhz", fitted.ej_mhz},
                      {"config_f01_mhz", levels.f01_mhz},
                      {"config_alpha_mhz", levels.alpha_mhz},
                      {"detuning_vs_cavity_mhz", levels.f01_mhz - cfg.device.f_r_mhz}};
    std::filesystem::path dir(cfg.out_dir);
    write_json_file(dir / "sweet_spot.json", "sweet-spot", ctx.hash, report.summary);
    report.manifest = {"sweet_spot.json"};
    write_report(dir, report);
    return report;
}

RunReport run_experiment(const std::string& name, const ExperimentConfig& cfg) {
    if (name == "chi-curve") return exp_chi_curve(cfg);
    if (name == "spectroscopy") return exp_spectroscopy(cfg);
    if (name == "spiral") return exp_spiral(cfg);
    if (name == "ramsey") return exp_ramsey(cfg);
    if (name == "state-tomo") return exp_state_tomo(cfg);
    if (name == "process-tomo") return exp_process_tomo(cfg);
    if (name == "contextuality") return exp_contextuality(cfg);
    if (name == "sweet-spot") return exp_sweet_spot(cfg);
    throw config_error("unknown experiment '" + name + "'");
}

std::vector<std::string> experiment_names() {
    return {"chi-curve", "spectroscopy", "spiral",        "ramsey",
            "state-tomo", "process-tomo", "contextuality", "sweet-spot"};
}

}  // namespace qutritlab

// Acceptance suite: one line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qutritlab/experiments.hpp"
#include "qutritlab/fitting.hpp"
#include "qutritlab/noise.hpp"
#include "qutritlab/presets.hpp"
#include "qutritlab/tomography.hpp"

using namespace qutritlab;

namespace {

struct Check {
    int id;
    std::string name;
    double time_limit_s;
    std::function<std::string()> run;  // empty string on pass
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
}

Observable ground_observable() {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    a(2, 2) = -1.0;
    return Observable(a);
}

nlohmann::json base_config(const nlohmann::json& experiment) {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["out"] = std::string("acceptance_out");
    return j;
}

std::string criterion1() {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        double g = 2.0 + 40.0 * rng.uniform();
        double alpha = -450.0 + 300.0 * rng.uniform();
        DispersiveShifts s = dispersive_shifts_2nd_order(g, alpha, alpha);
        double scale = g * g / std::abs(alpha);
        if (std::abs(s.chi12_mhz) > 1e-12 * scale) {
            return "chi12(" + fmt(g) + "," + fmt(alpha) + ") = " +
                   fmt(s.chi12_mhz) + " not at machine zero";
        }
        if (chi12_closed_form(g, alpha, alpha) != 0.0) {
            return "closed form not exactly zero at delta = alpha";
        }
    }
    return "";
}

std::string criterion2() {
    int tested = 0;
    for (int ig = 0; ig < 10; ++ig) {
        for (int id = 0; id < 10; ++id) {
            for (int ia = 0; ia < 10; ++ia) {
                double g = 5.0 + 3.0 * ig;
                double delta = -620.0 + 48.0 * id;
                double alpha = -400.0 + 20.0 * ia;
                bool singular = false;
                for (int i = 0; i < 3; ++i) {
                    if (std::abs(delta + i * alpha) < 5.0) singular = true;
                }
                if (singular) continue;
                ++tested;
                double via_s = dispersive_shifts_2nd_order(g, delta, alpha).chi12_mhz;
                double closed = chi12_closed_form(g, delta, alpha);
                double rel = std::abs(via_s - closed) /
                             std::max(std::abs(closed), 1e-30);
                if (rel > 1e-12) {
                    return "route mismatch " + fmt(rel) + " at (g,delta,alpha)=(" +
                           fmt(g) + "," + fmt(delta) + "," + fmt(alpha) + ")";
                }
            }
        }
    }
    if (tested < 800) return "grid unexpectedly small: " + std::to_string(tested);
    return "";
}

std::string criterion3() {
    DeviceParams p = device_preset("alpha310");
    SweetSpot s6 = find_sweet_spot(p, -400.0, -250.0, SweetSpotMode::exact);
    if (std::abs(s6.delta_mhz + 310.0) > 50.0) {
        return "crossing " + fmt(s6.delta_mhz) + " farther than 50 MHz from alpha";
    }
    DeviceParams p10 = p;
    p10.n_photons = 10;
    SweetSpot s10 = find_sweet_spot(p10, -400.0, -250.0, SweetSpotMode::exact);
    double shift_khz = std::abs(s10.delta_mhz - s6.delta_mhz) * 1e3;
    if (shift_khz > 1.0) {
        return "truncation 6->10 moves the crossing by " + fmt(shift_khz) + " kHz";
    }
    return "";
}

std::string criterion4() {
    TransmonSpec spec = fit_transmon(6901.0, -314.0);
    std::string msg;
    if (std::abs(spec.ec_mhz - 281.0) > 2.0) {
        msg += "E_C = " + fmt(spec.ec_mhz) + " MHz outside 281 +- 2";
    }
    double abs_delta = std::abs(6901.0 - 7182.0);
    if (std::abs(abs_delta - 278.0) > 3.0) {
        if (!msg.empty()) msg += "; ";
        msg += "|delta| = " + fmt(abs_delta) + " MHz outside 278 +- 3";
    }
    return msg;
}

std::string criterion5() {
    Rng rng(105);
    Matrix p0 = Matrix::Zero(3, 3);
    p0(0, 0) = 1.0;
    KrausChannel binary({p0, Matrix::Identity(3, 3) - p0});
    for (int trial = 0; trial < 1000; ++trial) {
        Matrix g(3, 3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) g(i, j) = rng.complex_normal();
        }
        Matrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        DensityMatrix state(0.5 * (rho + rho.adjoint()));
        Matrix out = apply_channel(binary, state).matrix();
        Matrix expected = Matrix::Zero(3, 3);
        expected(0, 0) = state.matrix()(0, 0);
        expected.block(1, 1, 2, 2) = state.matrix().block(1, 1, 2, 2);
        if ((out - expected).cwiseAbs().maxCoeff() > 1e-12) {
            return "closed form violated at trial " + std::to_string(trial);
        }
    }
    return "";
}

std::string criterion6() {
    TomographyDesign full =
        build_design(table1_tomography_set(), ground_observable());
    if (full.rank != 9) {
        return "full design rank " + std::to_string(full.rank) + " != 9";
    }
    TomographySet set = table1_tomography_set();
    set.sequences.resize(7);
    TomographyDesign partial = build_design(set, ground_observable());
    if (partial.rank > 8) {
        return "rows 1-7 rank " + std::to_string(partial.rank) + " > 8";
    }
    Completeness c = completeness(partial);
    Matrix pop_diff = Matrix::Zero(3, 3);
    pop_diff(1, 1) = 1.0;
    pop_diff(2, 2) = -1.0;
    double overlap = 0.0;
    for (const Matrix& w : c.null_witnesses) {
        overlap += std::norm((w.adjoint() * pop_diff).trace());
    }
    if (overlap < 1e-3) {
        return "null-space witness has no rho11-rho22 support (" + fmt(overlap) + ")";
    }
    return "";
}

std::string criterion7() {
    TomographyDesign design =
        build_design(table1_tomography_set(), ground_observable());
    Rng rng(107);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix g(3, 3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) g(i, j) = rng.complex_normal();
        }
        Matrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        DensityMatrix state(0.5 * (rho + rho.adjoint()));
        RealVector records(design.matrix.rows());
        for (Eigen::Index k = 0; k < records.size(); ++k) {
            records[k] =
                (design.effects[static_cast<size_t>(k)] * state.matrix())
                    .trace()
                    .real();
        }
        MleResult res = mle_state(design, records);
        double fid = state_fidelity(res.state, state);
        if (fid < 0.999) {
            return "state reconstruction fidelity " + fmt(fid) + " at trial " +
                   std::to_string(trial);
        }
    }

    Matrix p0 = Matrix::Zero(3, 3);
    p0(0, 0) = 1.0;
    KrausChannel binary({p0, Matrix::Identity(3, 3) - p0});
    std::vector<DensityMatrix> preps = table1_preparation_states();
    RealMatrix records(preps.size(), design.matrix.rows());
    for (size_t p = 0; p < preps.size(); ++p) {
        DensityMatrix out = apply_channel(binary, preps[p]);
        for (Eigen::Index k = 0; k < design.matrix.rows(); ++k) {
            records(static_cast<Eigen::Index>(p), k) =
                (design.effects[static_cast<size_t>(k)] * out.matrix())
                    .trace()
                    .real();
        }
    }
    ProcessMleResult fit = mle_process(preps, design, records);
    double frob = (fit.chi.chi - ideal_process_matrix(binary).chi).norm();
    if (frob > 1e-6) {
        return "process reconstruction Frobenius error " + fmt(frob) + " > 1e-6";
    }
    return "";
}

std::string criterion8() {
    ExperimentConfig without = parse_config(base_config({}));
    double f_without = exp_state_tomo(without)
                           .summary.at("fidelity_to_target")
                           .get<double>();
    nlohmann::json with_readout = base_config({{"extra_readout", true}});
    double f_with = exp_state_tomo(parse_config(with_readout))
                        .summary.at("fidelity_to_target")
                        .get<double>();
    double pf = exp_process_tomo(parse_config(base_config({})))
                    .summary.at("process_fidelity_to_ideal")
                    .get<double>();
    std::string msg;
    if (f_without < 0.95 || f_without > 0.99) {
        msg += "fidelity(no readout) = " + fmt(f_without) + " outside [0.95, 0.99]";
    }
    if (f_with < 0.95 || f_with > 0.99) {
        if (!msg.empty()) msg += "; ";
        msg += "fidelity(with readout) = " + fmt(f_with) + " outside [0.95, 0.99]";
    }
    if (pf < 0.90 || pf > 0.99) {
        if (!msg.empty()) msg += "; ";
        msg += "process fidelity = " + fmt(pf) + " outside [0.90, 0.99]";
    }
    return msg;
}

std::string criterion9() {
    ExperimentConfig r01 =
        parse_config(base_config({{"transition", "01"}}));
    double t2_01 = exp_ramsey(r01).summary.at("fitted_t2_us").get<double>();
    if (std::abs(t2_01 - 11.2) > 0.02 * 11.2) {
        return "T2_01 refit " + fmt(t2_01) + " off by more than 2%";
    }

    ExperimentConfig r12 = parse_config(base_config({{"transition", "12"}}));
    double t2_12 = exp_ramsey(r12).summary.at("fitted_t2_us").get<double>();
    if (std::abs(t2_12 - 5.78) > 0.02 * 5.78) {
        return "T2_12 refit " + fmt(t2_12) + " off by more than 2%";
    }

    ExperimentConfig r01r = parse_config(
        base_config({{"transition", "01"}, {"with_readout", true}}));
    double coh = exp_ramsey(r01r)
                     .summary.at("max_coherence_delay_gt_2us")
                     .get<double>();
    if (coh >= 0.01) {
        return "0-1 coherence " + fmt(coh) + " survives the calibrated readout";
    }

    ExperimentConfig r12r = parse_config(
        base_config({{"transition", "12"}, {"with_readout", true}}));
    double t2_12r = exp_ramsey(r12r).summary.at("fitted_t2_us").get<double>();
    if (std::abs(t2_12r - t2_12) > 0.02 * t2_12) {
        return "1-2 T2 moves from " + fmt(t2_12) + " to " + fmt(t2_12r) +
               " under the readout";
    }
    return "";
}

std::string criterion10() {
    Vector e0 = basis_ket(3, 0);
    Vector psi1 = (basis_ket(3, 1) + basis_ket(3, 2)) / std::sqrt(2.0);
    std::vector<DensityMatrix> ensemble = default_epsilon_ensemble(110, 1000);

    EpsilonReport ideal = epsilon_uv(ideal_binary_procedure(e0),
                                     ideal_binary_procedure(psi1), ensemble);
    if (ideal.epsilon > 1e-12) {
        return "ideal-procedure epsilon " + fmt(ideal.epsilon) + " > 1e-12";
    }

    MeasurementProcedure t0 = ternary_procedure(e0);
    MeasurementProcedure tpsi = ternary_procedure(psi1);
    DensityMatrix rho = DensityMatrix::pure(psi1);
    double own = sequential_expectation(tpsi, t0, rho, RecordWhich::record_first);
    double disturbed =
        sequential_expectation(t0, tpsi, rho, RecordWhich::record_second);
    if (std::abs(own - 1.0) > 1e-12 || std::abs(disturbed) > 1e-12) {
        return "ternary sequential values (" + fmt(own) + ", " + fmt(disturbed) +
               ") != (1, 0)";
    }

    ExperimentConfig ctx = parse_config(base_config({{"haar_samples", 500}}));
    double eps = exp_contextuality(ctx)
                     .summary.at("epsilon_sim_0psi1")
                     .get<double>();
    if (eps < 0.02 || eps > 0.2) {
        return "simulated epsilon_{0 psi1} = " + fmt(eps) + " outside [0.02, 0.2]";
    }
    return "";
}

std::string criterion11() {
    nlohmann::json exp = {{"noiseless", true},
                          {"f01_offsets_mhz", {-5.0, 0.0}},
                          {"n_lengths", 12},
                          {"max_length_us", 1.5}};
    ExperimentConfig cfg = parse_config(base_config(exp));
    RunContext ctx = prepare_run(cfg);
    const QutritLevels levels = cfg.device.resolved_levels();

    Vector plus12 = (basis_ket(3, 1) + basis_ket(3, 2)) / std::sqrt(2.0);
    DensityMatrix rho0 = DensityMatrix::pure(plus12);

    // Off the sweet spot: |rho12| strictly decreasing, phase winding monotone.
    auto rho12_for = [&](double offset, double tau) {
        double delta = levels.alpha_mhz + offset;
        std::array<double, 3> pulls =
            state_pulls(cfg.device, delta, SweetSpotMode::second_order);
        ReadoutConfig rc = readout_config(ctx);
        rc.pulls_mhz = pulls;
        rc.duration_us = tau;
        rc.ringdown_us = 0.0;
        if (tau == 0.0) return Complex(rho0.matrix()(1, 2));
        KrausChannel ch = measurement_channel(rc, ReadoutMode::general);
        return Complex(apply_channel(ch, rho0).matrix()(1, 2));
    };

    double prev_abs = 1e9;
    double prev_phase = 0.0;
    double wind_sign = 0.0;
    for (int k = 0; k < 12; ++k) {
        double tau = 1.5 * k / 11.0;
        Complex r = rho12_for(-5.0, tau);
        double abs_now = std::abs(r);
        if (k > 0 && abs_now >= prev_abs) {
            return "|rho12| not strictly decreasing off the sweet spot (step " +
                   std::to_string(k) + ")";
        }
        double phase = std::arg(r);
        if (k > 0) {
            double dphi = std::remainder(phase - prev_phase, 2.0 * M_PI);
            if (k == 1) {
                wind_sign = dphi > 0.0 ? 1.0 : -1.0;
                if (dphi == 0.0) return "phase does not wind off the sweet spot";
            } else if (dphi * wind_sign <= 0.0) {
                return "phase winding changes direction at step " +
                       std::to_string(k);
            }
        }
        prev_abs = abs_now;
        prev_phase = phase;
    }

    // At the sweet spot the readout leaves |rho12| untouched (noiseless).
    double worst = 0.0;
    for (int k = 0; k < 12; ++k) {
        double tau = 1.5 * k / 11.0;
        Complex r = rho12_for(0.0, tau);
        worst = std::max(worst, std::abs(std::abs(r) - 0.5));
    }
    if (worst > 1e-6) {
        return "|rho12| moves by " + fmt(worst) + " at the sweet spot";
    }
    return "";
}

}  // namespace

int main() {
    std::vector<Check> checks = {
        {1, "second-order sweet spot at delta = alpha", 1.0, criterion1},
        {2, "closed form matches the Stark-coefficient route", 1.0, criterion2},
        {3, "exact-diagonalization crossing near alpha, converged", 5.0, criterion3},
        {4, "transmon inverse problem reproduces the printed values", 1.0,
         criterion4},
        {5, "binary channel matches the closed-form update", 1.0, criterion5},
        {6, "tomographic completeness of the nine-pulse design", 1.0, criterion6},
        {7, "maximum-likelihood oracle on noiseless data", 30.0, criterion7},
        {8, "end-to-end state and process fidelities in band", 60.0, criterion8},
        {9, "ramsey refits and readout erasure", 30.0, criterion9},
        {10, "measurement compatibility values", 30.0, criterion10},
        {11, "spiral phenomenology", 10.0, criterion11},
    };

    int failures = 0;
    for (const Check& c : checks) {
        auto start = std::chrono::steady_clock::now();
        std::string msg;
        try {
            msg = c.run();
        } catch (const std::exception& e) {
            msg = std::string("exception: ") + e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (msg.empty() && elapsed > c.time_limit_s) {
            msg = "runtime " + fmt(elapsed) + " s exceeds " + fmt(c.time_limit_s) +
                  " s";
        }
        if (msg.empty()) {
            std::printf("[PASS] C%-2d %s (%.2f s)\n", c.id, c.name.c_str(), elapsed);
        } else {
            std::printf("[FAIL] C%-2d %s (%.2f s): %s\n", c.id, c.name.c_str(),
                        elapsed, msg.c_str());
            ++failures;
        }
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, checks.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", checks.size());
    return 0;
}

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qutritlab/contextuality.hpp"
#include "qutritlab/device.hpp"
#include "qutritlab/experiments.hpp"
#include "qutritlab/noise.hpp"
#include "qutritlab/presets.hpp"
#include "qutritlab/tomography.hpp"

namespace py = pybind11;
using namespace qutritlab;

namespace {

DeviceParams make_device(double f_r, double g, double f01, double alpha,
                         double kappa, int n_levels, int n_photons) {
    DeviceParams p;
    p.f_r_mhz = f_r;
    p.g_mhz = g;
    p.kappa_mhz = kappa;
    p.n_qutrit_levels = n_levels;
    p.n_photons = n_photons;
    p.levels = QutritLevels::ladder(f01, alpha, n_levels);
    p.validate();
    return p;
}

NoiseParams make_noise(double t1_01, double t2_01, double t2_12, double n_th,
                       std::optional<double> t1_12, std::optional<double> t2_02) {
    NoiseParams p;
    p.t1_01_us = t1_01;
    p.t2_01_us = t2_01;
    p.t2_12_us = t2_12;
    p.n_th = n_th;
    p.t1_12_us = t1_12;
    p.t2_02_us = t2_02;
    p.validate();
    return p;
}

ReadoutConfig make_readout(double f_r, double f_d, double amplitude,
                           double duration, double ringdown, double kappa,
                           std::array<double, 3> pulls, double snr_threshold) {
    ReadoutConfig rc;
    rc.cavity_frequency_mhz = f_r;
    rc.drive_frequency_mhz = f_d;
    rc.drive_amplitude = amplitude;
    rc.duration_us = duration;
    rc.ringdown_us = ringdown;
    rc.kappa_mhz = kappa;
    rc.pulls_mhz = pulls;
    rc.snr_threshold = snr_threshold;
    rc.validate();
    return rc;
}

ReadoutMode mode_from_string(const std::string& mode) {
    if (mode == "general") return ReadoutMode::general;
    if (mode == "ideal_binary") return ReadoutMode::ideal_binary;
    if (mode == "ideal_ternary") return ReadoutMode::ideal_ternary;
    throw std::invalid_argument("readout mode must be general, ideal_binary or "
                                "ideal_ternary");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dispersive readout laboratory for a three-level superconducting "
              "circuit: level structure, cavity pulls, measurement back-action, "
              "tomography and compatibility analysis.";

    py::class_<QutritLevels>(m, "QutritLevels")
        .def_readonly("omega_mhz", &QutritLevels::omega_mhz)
        .def_readonly("alpha_mhz", &QutritLevels::alpha_mhz)
        .def_readonly("f01_mhz", &QutritLevels::f01_mhz);

    py::class_<TransmonSpec>(m, "TransmonSpec")
        .def(py::init([](double ej, double ec, double ng, int cutoff) {
                 TransmonSpec s{ej, ec, ng, cutoff};
                 s.validate();
                 return s;
             }),
             py::arg("ej_mhz"), py::arg("ec_mhz"), py::arg("ng") = 0.0,
             py::arg("charge_cutoff") = 20)
        .def_readonly("ej_mhz", &TransmonSpec::ej_mhz)
        .def_readonly("ec_mhz", &TransmonSpec::ec_mhz);

    py::class_<DeviceParams>(m, "DeviceParams")
        .def(py::init(&make_device), py::arg("f_r_mhz"), py::arg("g_mhz"),
             py::arg("f01_mhz"), py::arg("alpha_mhz"), py::arg("kappa_mhz"),
             py::arg("n_qutrit_levels") = 6, py::arg("n_photons") = 6)
        .def_readonly("f_r_mhz", &DeviceParams::f_r_mhz)
        .def_readonly("g_mhz", &DeviceParams::g_mhz)
        .def_readonly("kappa_mhz", &DeviceParams::kappa_mhz)
        .def("levels", &DeviceParams::resolved_levels);

    m.def("device_preset", &device_preset, py::arg("name") = "default");
    m.def("device_preset_names", &device_preset_names);
    m.def("noise_preset", &noise_preset, py::arg("name") = "default");

    m.def("transmon_levels", &transmon_levels, py::arg("spec"),
          py::arg("n_levels") = 3,
          "Charge-basis transmon spectrum shifted so omega_0 = 0.");
    m.def("fit_transmon", &fit_transmon, py::arg("f01_mhz"), py::arg("alpha_mhz"),
          "Solve for (E_J, E_C) reproducing the transition and anharmonicity.");

    py::class_<DispersiveShifts>(m, "DispersiveShifts")
        .def_readonly("chi_partial_mhz", &DispersiveShifts::chi_partial_mhz)
        .def_readonly("stark_mhz", &DispersiveShifts::stark_mhz)
        .def_readonly("chi01_mhz", &DispersiveShifts::chi01_mhz)
        .def_readonly("chi12_mhz", &DispersiveShifts::chi12_mhz)
        .def_readonly("dispersive_regime", &DispersiveShifts::dispersive_regime);

    m.def("dispersive_shifts_2nd_order", &dispersive_shifts_2nd_order,
          py::arg("g_mhz"), py::arg("delta_mhz"), py::arg("alpha_mhz"));
    m.def("chi12_closed_form", &chi12_closed_form, py::arg("g_mhz"),
          py::arg("delta_mhz"), py::arg("alpha_mhz"));
    m.def("jc_hamiltonian", &jc_hamiltonian, py::arg("params"));

    py::class_<DressedPulls>(m, "DressedPulls")
        .def_readonly("pull_mhz", &DressedPulls::pull_mhz)
        .def_readonly("chi01_mhz", &DressedPulls::chi01_mhz)
        .def_readonly("chi12_mhz", &DressedPulls::chi12_mhz);
    m.def("dressed_cavity_pull", &dressed_cavity_pull, py::arg("params"));

    py::class_<SweetSpot>(m, "SweetSpot")
        .def_readonly("delta_mhz", &SweetSpot::delta_mhz)
        .def_readonly("f01_mhz", &SweetSpot::f01_mhz);
    m.def(
        "find_sweet_spot",
        [](const DeviceParams& p, double lo, double hi, const std::string& mode) {
            return find_sweet_spot(p, lo, hi,
                                   mode == "exact" ? SweetSpotMode::exact
                                                   : SweetSpotMode::second_order);
        },
        py::arg("params"), py::arg("delta_lo_mhz"), py::arg("delta_hi_mhz"),
        py::arg("mode") = "exact");

    // Pulse algebra.
    m.def(
        "compile_sequence",
        [](const std::string& text) { return compile_sequence(parse_sequence(text)).matrix(); },
        py::arg("text"),
        "Compile a pulse string like 'R12x(pi/2) . R01x(pi)' (rightmost first) "
        "to its 3x3 unitary.");
    m.def("table1_tomography_pulses", []() {
        std::vector<std::string> out;
        for (const auto& s : table1_tomography_set().sequences) {
            out.push_back(format_sequence(s));
        }
        return out;
    });
    m.def("table1_preparation_states", []() {
        std::vector<Matrix> out;
        for (const auto& rho : table1_preparation_states()) {
            out.push_back(rho.matrix());
        }
        return out;
    });

    // States and channels as plain complex matrices.
    m.def(
        "state_fidelity",
        [](const Matrix& a, const Matrix& b) {
            return state_fidelity(DensityMatrix(a), DensityMatrix(b));
        },
        py::arg("rho"), py::arg("sigma"));
    m.def(
        "apply_kraus",
        [](const std::vector<Matrix>& ops, const Matrix& rho) {
            return apply_channel(KrausChannel(ops), DensityMatrix(rho)).matrix();
        },
        py::arg("kraus_ops"), py::arg("rho"));

    m.def(
        "free_evolution_kraus",
        [](const NoiseParams& p, double duration, double delta01, double delta12) {
            return free_evolution_channel(p, {duration, delta01, delta12})
                .kraus_ops();
        },
        py::arg("noise"), py::arg("duration_us"), py::arg("delta01_mhz") = 0.0,
        py::arg("delta12_mhz") = 0.0);

    py::class_<NoiseParams>(m, "NoiseParams")
        .def(py::init(&make_noise), py::arg("t1_01_us"), py::arg("t2_01_us"),
             py::arg("t2_12_us"), py::arg("n_th") = 0.0,
             py::arg("t1_12_us") = std::nullopt, py::arg("t2_02_us") = std::nullopt)
        .def_readonly("t1_01_us", &NoiseParams::t1_01_us)
        .def_readonly("t2_01_us", &NoiseParams::t2_01_us)
        .def_readonly("t2_12_us", &NoiseParams::t2_12_us)
        .def_readonly("n_th", &NoiseParams::n_th);

    py::class_<ReadoutConfig>(m, "ReadoutConfig")
        .def(py::init(&make_readout), py::arg("cavity_frequency_mhz"),
             py::arg("drive_frequency_mhz"), py::arg("drive_amplitude"),
             py::arg("duration_us"), py::arg("ringdown_us"), py::arg("kappa_mhz"),
             py::arg("pulls_mhz"), py::arg("snr_threshold") = 5.0)
        .def_readonly("duration_us", &ReadoutConfig::duration_us)
        .def_readonly("drive_amplitude", &ReadoutConfig::drive_amplitude);

    m.def(
        "measurement_kraus",
        [](const ReadoutConfig& rc, const std::string& mode) {
            KrausChannel ch = measurement_channel(rc, mode_from_string(mode));
            py::dict out;
            out["kraus_ops"] = ch.kraus_ops();
            out["labels"] =
                ch.has_labels() ? py::cast(ch.labels()) : py::object(py::none());
            return out;
        },
        py::arg("config"), py::arg("mode") = "general");
    m.def(
        "pointer_coherence_factors",
        [](const ReadoutConfig& rc) {
            PointerAnalysis pa = analyze_pointers(rc);
            py::dict out;
            out["coherence_factor"] = pa.coherence_factor;
            out["separation01"] = pa.separation01;
            out["separation02"] = pa.separation02;
            out["projective"] = pa.projective;
            return out;
        },
        py::arg("config"));
    m.def(
        "transmission_spectrum",
        [](const ReadoutConfig& rc, int prepared, const std::vector<double>& freqs) {
            std::vector<double> amps;
            for (const auto& pt : transmission_spectrum(rc, prepared, freqs)) {
                amps.push_back(pt.mean_abs);
            }
            return amps;
        },
        py::arg("config"), py::arg("prepared"), py::arg("freqs_mhz"));

    // Tomography.
    m.def("hermitian_basis", &hermitian_basis, py::arg("dim") = 3);
    m.def(
        "mle_state",
        [](const RealVector& records) {
            Matrix a0 = Matrix::Zero(3, 3);
            a0(0, 0) = 1.0;
            a0(1, 1) = -1.0;
            a0(2, 2) = -1.0;
            TomographyDesign design =
                build_design(table1_tomography_set(), Observable(a0));
            MleResult res = mle_state(design, records);
            py::dict out;
            out["state"] = res.state.matrix();
            out["residual"] = res.residual;
            out["iterations"] = res.iterations;
            return out;
        },
        py::arg("records"),
        "Reconstruct a qutrit state from the nine standard-design records.");
    m.def(
        "process_fidelity",
        [](const Matrix& chi_a, const Matrix& chi_b) {
            return process_fidelity(ProcessMatrix{chi_a, 3},
                                    ProcessMatrix{chi_b, 3});
        },
        py::arg("chi_a"), py::arg("chi_b"));
    m.def("ideal_binary_process_matrix", []() {
        Matrix p0 = Matrix::Zero(3, 3);
        p0(0, 0) = 1.0;
        KrausChannel ch({p0, Matrix::Identity(3, 3) - p0});
        return ideal_process_matrix(ch).chi;
    });

    // Compatibility.
    m.def(
        "sequential_expectation",
        [](const Vector& first_ray, const Vector& second_ray, const Matrix& rho,
           const std::string& which, bool ternary) {
            MeasurementProcedure first =
                ternary ? ternary_procedure(first_ray) : ideal_binary_procedure(first_ray);
            MeasurementProcedure second = ternary ? ternary_procedure(second_ray)
                                                  : ideal_binary_procedure(second_ray);
            RecordWhich rw = RecordWhich::record_second;
            if (which == "first") rw = RecordWhich::record_first;
            if (which == "product") rw = RecordWhich::record_product;
            return sequential_expectation(first, second, DensityMatrix(rho), rw);
        },
        py::arg("first_ray"), py::arg("second_ray"), py::arg("rho"),
        py::arg("record") = "first", py::arg("ternary") = true);
    m.def(
        "epsilon_uv",
        [](const Vector& u_ray, const Vector& v_ray, bool ternary, int haar_samples,
           std::uint64_t seed) {
            MeasurementProcedure u =
                ternary ? ternary_procedure(u_ray) : ideal_binary_procedure(u_ray);
            MeasurementProcedure v =
                ternary ? ternary_procedure(v_ray) : ideal_binary_procedure(v_ray);
            auto ensemble = default_epsilon_ensemble(seed, haar_samples);
            return epsilon_uv(u, v, ensemble).epsilon;
        },
        py::arg("u_ray"), py::arg("v_ray"), py::arg("ternary") = true,
        py::arg("haar_samples") = 1000, py::arg("seed") = 1);

    // Whole experiments through the JSON config surface.
    m.def(
        "run_experiment",
        [](const std::string& name, const std::string& config_json) {
            ExperimentConfig cfg =
                parse_config(nlohmann::json::parse(config_json));
            RunReport report = run_experiment(name, cfg);
            py::module_ json = py::module_::import("json");
            return json.attr("loads")(report.summary.dump());
        },
        py::arg("name"), py::arg("config_json") = "{}",
        "Run a named experiment; returns its summary dict. Files land in the "
        "configured output directory.");
    m.def("experiment_names", &experiment_names);

    m.attr("__version__") = kVersion;
}

#include "qutritlab/contextuality.hpp"

#include <cmath>

namespace qutritlab {

BinaryObservable BinaryObservable::from_ray(const Vector& v) {
    double n = v.norm();
    if (n <= 0.0) throw std::invalid_argument("BinaryObservable: zero ray");
    Vector ray = v / n;
    const int d = static_cast<int>(ray.size());
    Matrix a = 2.0 * (ray * ray.adjoint()) - Matrix::Identity(d, d);
    return BinaryObservable{ray, Observable(a)};
}

KrausChannel MeasurementProcedure::effective() const {
    std::vector<Matrix> ops;
    ops.reserve(device.kraus_ops().size());
    for (const Matrix& k : device.kraus_ops()) {
        ops.push_back(post.matrix() * k * pre.matrix());
    }
    std::optional<std::vector<double>> labels;
    if (device.has_labels()) labels = device.labels();
    return KrausChannel(std::move(ops), std::move(labels));
}

MeasurementProcedure ideal_binary_procedure(const Vector& v) {
    const int d = static_cast<int>(v.size());
    Matrix p0 = Matrix::Zero(d, d);
    p0(0, 0) = 1.0;
    KrausChannel device({p0, Matrix::Identity(d, d) - p0},
                        std::vector<double>{+1.0, -1.0});
    ProjectionSandwich sw = projection_procedure(v);
    return MeasurementProcedure{sw.pre, std::move(device), sw.post, v};
}

MeasurementProcedure ternary_procedure(const Vector& v) {
    const int d = static_cast<int>(v.size());
    std::vector<Matrix> ops;
    std::vector<double> labels;
    for (int i = 0; i < d; ++i) {
        Matrix p = Matrix::Zero(d, d);
        p(i, i) = 1.0;
        ops.push_back(p);
        labels.push_back(i == 0 ? +1.0 : -1.0);
    }
    KrausChannel device(std::move(ops), std::move(labels));
    ProjectionSandwich sw = projection_procedure(v);
    return MeasurementProcedure{sw.pre, std::move(device), sw.post, v};
}

MeasurementProcedure procedure_from_channel(const Vector& v, KrausChannel device) {
    if (!device.has_labels()) {
        throw std::invalid_argument("procedure_from_channel: device needs labels");
    }
    ProjectionSandwich sw = projection_procedure(v);
    return MeasurementProcedure{sw.pre, std::move(device), sw.post, v};
}

double sequential_expectation(const MeasurementProcedure& first,
                              const MeasurementProcedure& second,
                              const DensityMatrix& rho_b, RecordWhich which) {
    KrausChannel eff1 = first.effective();
    auto branches1 = measure_branches(eff1, rho_b);
    if (which == RecordWhich::record_first) {
        double out = 0.0;
        for (const auto& b : branches1) out += b.label * b.probability;
        return out;
    }
    KrausChannel eff2 = second.effective();
    double out = 0.0;
    for (const auto& b1 : branches1) {
        if (b1.probability <= 1e-15) continue;
        auto branches2 = measure_branches(eff2, DensityMatrix(b1.post_state));
        for (const auto& b2 : branches2) {
            double value = which == RecordWhich::record_product
                               ? b1.label * b2.label
                               : b2.label;
            out += value * b1.probability * b2.probability;
        }
    }
    return out;
}

double sequential_expectation_sampled(const MeasurementProcedure& first,
                                      const MeasurementProcedure& second,
                                      const DensityMatrix& rho_b, RecordWhich which,
                                      std::uint64_t shots, Rng& rng) {
    KrausChannel eff1 = first.effective();
    KrausChannel eff2 = second.effective();
    auto draw = [&rng](const std::vector<MeasurementBranch>& branches) -> int {
        double u = rng.uniform();
        double acc = 0.0;
        for (size_t i = 0; i < branches.size(); ++i) {
            acc += branches[i].probability;
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(branches.size()) - 1;
    };
    double sum = 0.0;
    for (std::uint64_t s = 0; s < shots; ++s) {
        auto branches1 = measure_branches(eff1, rho_b);
        int i1 = draw(branches1);
        if (which == RecordWhich::record_first) {
            sum += branches1[i1].label;
            continue;
        }
        DensityMatrix mid(branches1[i1].post_state);
        auto branches2 = measure_branches(eff2, mid);
        double second_label = branches2[draw(branches2)].label;
        sum += which == RecordWhich::record_product
                   ? branches1[i1].label * second_label
                   : second_label;
    }
    return sum / static_cast<double>(shots);
}

namespace {

bool rays_orthogonal(const MeasurementProcedure& u, const MeasurementProcedure& v) {
    if (!u.target_ray || !v.target_ray) return true;
    Complex overlap = u.target_ray->adjoint() * (*v.target_ray);
    return std::abs(overlap) <= 1e-9;
}

double ordering_difference(const MeasurementProcedure& u,
                           const MeasurementProcedure& v, const DensityMatrix& rho) {
    double uv = sequential_expectation(u, v, rho, RecordWhich::record_first);
    double vu = sequential_expectation(v, u, rho, RecordWhich::record_second);
    return std::abs(uv - vu);
}

}  // namespace

EpsilonReport epsilon_uv(const MeasurementProcedure& u,
                         const MeasurementProcedure& v,
                         const std::vector<DensityMatrix>& state_set) {
    if (state_set.empty()) {
        throw std::invalid_argument("epsilon_uv: empty state set");
    }
    EpsilonReport report{0.0, -1, rays_orthogonal(u, v)};
    for (size_t i = 0; i < state_set.size(); ++i) {
        double d = ordering_difference(u, v, state_set[i]);
        if (d > report.epsilon) {
            report.epsilon = d;
            report.arg_state = static_cast<int>(i);
        }
    }
    return report;
}

std::vector<DensityMatrix> default_epsilon_ensemble(std::uint64_t seed,
                                                    int haar_samples) {
    std::vector<DensityMatrix> states = table1_preparation_states();
    Rng rng(seed);
    for (int i = 0; i < haar_samples; ++i) {
        states.push_back(DensityMatrix::pure(haar_random_state(3, rng)));
    }
    return states;
}

namespace {

double spectral_radius_of_difference(const Matrix& a_eff, const Matrix& delta_map) {
    Matrix delta = a_eff - delta_map;
    EigResult eig = eig_hermitian(0.5 * (delta + delta.adjoint()));
    return std::max(std::abs(eig.eigenvalues.minCoeff()),
                    std::abs(eig.eigenvalues.maxCoeff()));
}

}  // namespace

double epsilon_exact(const MeasurementProcedure& u, const MeasurementProcedure& v) {
    KrausChannel eff_u = u.effective();
    KrausChannel eff_v = v.effective();
    Matrix a_eff = recorded_observable(eff_u);
    Matrix heisenberg = Matrix::Zero(eff_u.dim(), eff_u.dim());
    for (const Matrix& k : eff_v.kraus_ops()) {
        heisenberg += k.adjoint() * a_eff * k;
    }
    return spectral_radius_of_difference(a_eff, heisenberg);
}

namespace {

void check_tp(const ProcessMatrix& chi) {
    const auto basis = hermitian_basis(chi.dim);
    Matrix acc = Matrix::Zero(chi.dim, chi.dim);
    for (int m = 0; m < chi.dim * chi.dim; ++m) {
        for (int n = 0; n < chi.dim * chi.dim; ++n) {
            Complex w = chi.chi(m, n);
            if (std::abs(w) < 1e-300) continue;
            acc += w * basis[n].adjoint() * basis[m];
        }
    }
    if (!approx_equal(acc, Matrix::Identity(chi.dim, chi.dim), 1e-6)) {
        throw std::invalid_argument("epsilon_from_process: chi is not trace preserving");
    }
}

// Delta = A_u - U E_chi^dag(U^dag A_u U) U^dag for the v-sandwich U.
Matrix process_difference_observable(const ProcessMatrix& chi_meas,
                                     const Vector& u_ray, const Vector& v_ray) {
    check_tp(chi_meas);
    BinaryObservable au = BinaryObservable::from_ray(u_ray);
    ProjectionSandwich sw = projection_procedure(v_ray);
    const Matrix& u = sw.post.matrix();
    Matrix rotated = u.adjoint() * au.observable.matrix() * u;
    Matrix heis = apply_process_adjoint(chi_meas, rotated);
    return au.observable.matrix() - u * heis * u.adjoint();
}

}  // namespace

EpsilonReport epsilon_from_process(const ProcessMatrix& chi_meas, const Vector& u_ray,
                                   const Vector& v_ray,
                                   const std::vector<DensityMatrix>& state_set) {
    if (state_set.empty()) {
        throw std::invalid_argument("epsilon_from_process: empty state set");
    }
    Matrix delta = process_difference_observable(chi_meas, u_ray, v_ray);
    Complex overlap = u_ray.adjoint() * v_ray;
    EpsilonReport report{0.0, -1, std::abs(overlap) <= 1e-9};
    for (size_t i = 0; i < state_set.size(); ++i) {
        double d = std::abs((delta * state_set[i].matrix()).trace().real());
        if (d > report.epsilon) {
            report.epsilon = d;
            report.arg_state = static_cast<int>(i);
        }
    }
    return report;
}

double epsilon_from_process_exact(const ProcessMatrix& chi_meas, const Vector& u_ray,
                                  const Vector& v_ray) {
    Matrix delta = process_difference_observable(chi_meas, u_ray, v_ray);
    EigResult eig = eig_hermitian(0.5 * (delta + delta.adjoint()));
    return std::max(std::abs(eig.eigenvalues.minCoeff()),
                    std::abs(eig.eigenvalues.maxCoeff()));
}

}  // namespace qutritlab

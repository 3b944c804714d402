#include "qutritlab/noise.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace qutritlab {

void NoiseParams::validate() const {
    if (t1_01_us <= 0.0 || t2_01_us <= 0.0 || t2_12_us <= 0.0) {
        throw std::invalid_argument("NoiseParams: times must be positive");
    }
    if (t1_12_us && *t1_12_us <= 0.0) {
        throw std::invalid_argument("NoiseParams: T1_12 must be positive");
    }
    if (t2_02_us && *t2_02_us <= 0.0) {
        throw std::invalid_argument("NoiseParams: T2_02 must be positive");
    }
    if (n_th < 0.0 || n_th >= 0.5) {
        throw std::invalid_argument("NoiseParams: n_th must lie in [0, 0.5)");
    }
    noise_rates(*this);  // throws if a T2 exceeds its relaxation limit
}

double NoiseParams::resolved_t1_12() const {
    return t1_12_us ? *t1_12_us : 0.5 * t1_01_us;
}

NoiseRates noise_rates(const NoiseParams& p) {
    NoiseRates r;
    r.gamma10 = 1.0 / p.t1_01_us;
    r.gamma01 = r.gamma10 * p.n_th / (1.0 - p.n_th);
    r.gamma21 = 1.0 / p.resolved_t1_12();

    const double relax01 = 0.5 * (r.gamma01 + r.gamma10);
    const double relax12 = 0.5 * (r.gamma10 + r.gamma21);
    const double relax02 = 0.5 * (r.gamma01 + r.gamma21);

    r.phi01 = 1.0 / p.t2_01_us - relax01;
    r.phi12 = 1.0 / p.t2_12_us - relax12;
    if (r.phi01 < -1e-12) {
        throw std::invalid_argument("NoiseParams: T2_01 exceeds its 2*T1 limit");
    }
    if (r.phi12 < -1e-12) {
        throw std::invalid_argument("NoiseParams: T2_12 exceeds its 2*T1 limit");
    }
    r.phi01 = std::max(0.0, r.phi01);
    r.phi12 = std::max(0.0, r.phi12);

    // Diagonal dephasing generators can only realize rho_02 pure-dephasing
    // rates inside this interval.
    const double lo = std::pow(std::sqrt(r.phi01) - std::sqrt(r.phi12), 2);
    const double hi = std::pow(std::sqrt(r.phi01) + std::sqrt(r.phi12), 2);

    double phi02;
    if (p.t2_02_us) {
        phi02 = 1.0 / *p.t2_02_us - relax02;
        if (phi02 < -1e-12) {
            throw std::invalid_argument("NoiseParams: T2_02 exceeds its 2*T1 limit");
        }
        phi02 = std::max(0.0, phi02);
        if (phi02 < lo - 1e-12 || phi02 > hi + 1e-12) {
            throw std::invalid_argument(
                "NoiseParams: explicit T2_02 is not completely positive against "
                "T2_01/T2_12");
        }
        phi02 = std::min(std::max(phi02, lo), hi);
    } else {
        double rate02 = 1.0 / p.t2_01_us + 1.0 / p.t2_12_us - 0.5 / p.t1_01_us;
        rate02 = std::max(rate02, std::max(1.0 / p.t2_01_us, 1.0 / p.t2_12_us));
        phi02 = std::min(std::max(rate02 - relax02, lo), hi);
    }
    r.phi02 = phi02;
    r.total02 = relax02 + phi02;
    return r;
}

Matrix lindblad_superoperator(const Matrix& hamiltonian,
                              const std::vector<Matrix>& jump_ops) {
    const int d = static_cast<int>(hamiltonian.rows());
    const Matrix id = Matrix::Identity(d, d);
    const Complex im(0.0, 1.0);
    Matrix l = -im * (tensor(id, hamiltonian) - tensor(hamiltonian.transpose(), id));
    for (const Matrix& a : jump_ops) {
        Matrix ada = a.adjoint() * a;
        l += tensor(a.conjugate(), a);
        l -= 0.5 * tensor(id, ada);
        l -= 0.5 * tensor(ada.transpose(), id);
    }
    return l;
}

Matrix free_evolution_generator(const NoiseParams& p, double delta01_mhz,
                                double delta12_mhz) {
    NoiseRates r = noise_rates(p);

    Matrix e01 = Matrix::Zero(3, 3), e12 = Matrix::Zero(3, 3), e10 = Matrix::Zero(3, 3);
    e01(0, 1) = 1.0;  // 1 -> 0 decay
    e12(1, 2) = 1.0;  // 2 -> 1 decay
    e10(1, 0) = 1.0;  // 0 -> 1 thermal excitation

    std::vector<Matrix> jumps;
    jumps.push_back(std::sqrt(r.gamma10) * e01);
    jumps.push_back(std::sqrt(r.gamma21) * e12);
    if (r.gamma01 > 0.0) jumps.push_back(std::sqrt(r.gamma01) * e10);

    // Embed the three pure-dephasing rates as squared point distances and
    // realize them with two real diagonal generators.
    const double a = 2.0 * r.phi01;
    const double b = 2.0 * r.phi12;
    const double c = 2.0 * r.phi02;
    double x2, y2;  // coordinates of the level-2 point; level 0 at origin,
                    // level 1 at (sqrt(a), 0)
    if (a > 1e-30) {
        x2 = (a + c - b) / (2.0 * std::sqrt(a));
        y2 = std::sqrt(std::max(0.0, c - x2 * x2));
    } else {
        x2 = std::sqrt(c);
        y2 = 0.0;
    }
    Matrix deph1 = Matrix::Zero(3, 3), deph2 = Matrix::Zero(3, 3);
    deph1(1, 1) = std::sqrt(a);
    deph1(2, 2) = x2;
    deph2(2, 2) = y2;
    if (deph1.cwiseAbs().maxCoeff() > 0.0) jumps.push_back(deph1);
    if (y2 > 0.0) jumps.push_back(deph2);

    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = -kTwoPi * delta01_mhz;
    h(2, 2) = -kTwoPi * (delta01_mhz + delta12_mhz);

    return lindblad_superoperator(h, jumps);
}

Matrix free_evolution_superoperator(const NoiseParams& p, const EvolutionSpec& e) {
    if (e.duration_us < 0.0) {
        throw std::invalid_argument("EvolutionSpec: duration must be nonnegative");
    }
    if (e.duration_us == 0.0) {
        return Matrix::Identity(9, 9);
    }
    Matrix l = free_evolution_generator(p, e.delta01_mhz, e.delta12_mhz);
    Matrix le = l * e.duration_us;
    return le.exp();
}

KrausChannel free_evolution_channel(const NoiseParams& p, const EvolutionSpec& e) {
    return channel_from_superoperator(free_evolution_superoperator(p, e), 3);
}

Timeline interleave(const std::vector<TimelineStep>& steps, int dim) {
    Matrix s = Matrix::Identity(dim * dim, dim * dim);
    double total = 0.0;
    for (const TimelineStep& step : steps) {
        if (step.duration_us < 0.0) {
            throw std::invalid_argument("interleave: negative duration");
        }
        total += step.duration_us;
        if (std::holds_alternative<KrausChannel>(step.op)) {
            const KrausChannel& ch = std::get<KrausChannel>(step.op);
            if (ch.dim() != dim) {
                throw std::invalid_argument("interleave: channel dimension mismatch");
            }
            s = superoperator(ch) * s;
        } else {
            const UnitaryMatrix& u = std::get<UnitaryMatrix>(step.op);
            if (u.dim() != dim) {
                throw std::invalid_argument("interleave: unitary dimension mismatch");
            }
            s = superoperator_of_unitary(u.matrix()) * s;
        }
    }
    return Timeline{channel_from_superoperator(s, dim), total};
}

}  // namespace qutritlab

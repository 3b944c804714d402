#include "qutritlab/fitting.hpp"

#include <cmath>

namespace qutritlab {

FitResult fit_least_squares(const std::vector<double>& x,
                            const std::vector<double>& y, const ModelFn& model,
                            RealVector initial, int max_iterations) {
    if (x.size() != y.size() || x.empty()) {
        throw std::invalid_argument("fit_least_squares: bad data");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    const Eigen::Index np = initial.size();

    auto residuals = [&](const RealVector& p) {
        RealVector r(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            r[i] = model(x[static_cast<size_t>(i)], p) - y[static_cast<size_t>(i)];
        }
        return r;
    };

    RealVector p = std::move(initial);
    RealVector r = residuals(p);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    int it = 0;
    bool converged = false;
    for (; it < max_iterations; ++it) {
        RealMatrix jac(n, np);
        for (Eigen::Index j = 0; j < np; ++j) {
            double h = 1e-7 * std::max(1.0, std::abs(p[j]));
            RealVector pj = p;
            pj[j] += h;
            jac.col(j) = (residuals(pj) - r) / h;
        }
        RealMatrix jtj = jac.transpose() * jac;
        RealVector jtr = jac.transpose() * r;
        bool stepped = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            RealMatrix damped = jtj;
            for (Eigen::Index j = 0; j < np; ++j) {
                damped(j, j) += lambda * std::max(jtj(j, j), 1e-12);
            }
            RealVector step = damped.ldlt().solve(jtr);
            RealVector pn = p - step;
            RealVector rn = residuals(pn);
            double cn = rn.squaredNorm();
            if (cn < cost) {
                double rel = (cost - cn) / std::max(cost, 1e-300);
                p = pn;
                r = rn;
                cost = cn;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel < 1e-14 || step.norm() < 1e-12 * (1.0 + p.norm())) {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (converged) break;
        if (!stepped) {
            // No damping level improves the cost: stationary point reached.
            converged = true;
            break;
        }
    }
    return FitResult{p, std::sqrt(cost / static_cast<double>(n)), it, converged};
}

}  // namespace qutritlab

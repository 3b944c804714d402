#pragma once

#include <functional>

#include "qutritlab/linalg.hpp"

namespace qutritlab {

using ModelFn = std::function<double(double x, const RealVector& params)>;

struct FitResult {
    RealVector params;
    double rms;
    int iterations;
    bool converged;
};

// Levenberg-Marquardt least squares with a forward-difference Jacobian.
FitResult fit_least_squares(const std::vector<double>& x,
                            const std::vector<double>& y, const ModelFn& model,
                            RealVector initial, int max_iterations = 400);

}  // namespace qutritlab

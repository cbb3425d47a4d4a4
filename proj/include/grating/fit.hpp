#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "grating/errors.hpp"

namespace grating {

struct FitResult {
    std::map<std::string, double> estimates;
    double residual = 0.0;   ///< sum of squared residuals
    int evaluations = 0;     ///< model/objective evaluations
    bool converged = false;
    std::string note;
};

/// Whether a fitted decay time tau of measured data is read as the
/// amplitude time 1/gamma or the intensity time 1/(2 gamma).
enum class DecayConvention { amplitude, intensity };

/// Least-squares fit of y = A exp(-t/tau): log-linear regression seed
/// refined by Gauss-Newton on the nonlinear residual.  Estimates carry
/// "amplitude", "tau", and "decay_rate" (gamma per the convention).
/// Constant data is returned non-converged with tau = inf.
FitResult fit_exponential(const std::vector<std::pair<double, double>>& points,
                          DecayConvention convention);

/// Golden-section minimizer on [lo, hi]; tol is the absolute bracket
/// width at which the search stops.
double golden_section_minimize(const std::function<double(double)>& f,
                               double lo, double hi, double tol,
                               int* evaluations = nullptr);

}  // namespace grating

#include "grating/fit.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace grating {

FitResult fit_exponential(const std::vector<std::pair<double, double>>& points,
                          DecayConvention convention) {
    if (points.size() < 3)
        throw InvalidParameter("fit_exponential needs >= 3 points");
    for (const auto& [t, y] : points)
        if (!(y > 0.0))
            throw InvalidParameter("fit_exponential needs y > 0 at every point");

    const double n = static_cast<double>(points.size());
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (const auto& [t, y] : points) {
        const double l = std::log(y);
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
    }
    const double det = n * stt - st * st;
    if (det <= 0.0)
        throw InvalidParameter("fit_exponential: degenerate (constant-t) input");
    const double slope = (n * stl - st * sl) / det;
    const double intercept = (sl * stt - st * stl) / det;

    FitResult result;
    double amp = std::exp(intercept);
    if (!(slope < 0.0)) {
        // Non-decaying data: tau is unbounded, flag and return the seed.
        result.estimates["amplitude"] = amp;
        result.estimates["tau"] = std::numeric_limits<double>::infinity();
        result.estimates["decay_rate"] = 0.0;
        result.converged = false;
        result.note = "non-decaying data, tau unbounded";
        for (const auto& [t, y] : points) {
            const double r = y - amp;
            result.residual += r * r;
        }
        return result;
    }
    double tau = -1.0 / slope;

    // Gauss-Newton on r_i = y_i - A exp(-t_i/tau).
    double rss = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        rss = 0.0;
        for (const auto& [t, y] : points) {
            const double e = std::exp(-t / tau);
            const double r = y - amp * e;
            const Eigen::Vector2d j{-e, -amp * e * t / (tau * tau)};
            jtj += j * j.transpose();
            jtr += j * r;
            rss += r * r;
        }
        ++result.evaluations;
        const Eigen::Vector2d step = jtj.ldlt().solve(-jtr);
        if (!step.allFinite()) break;
        amp += step[0];
        tau += step[1];
        if (std::abs(step[0]) <= 1e-14 * std::abs(amp) + 1e-300 &&
            std::abs(step[1]) <= 1e-14 * std::abs(tau) + 1e-300) {
            result.converged = true;
            break;
        }
    }

    result.estimates["amplitude"] = amp;
    result.estimates["tau"] = tau;
    result.estimates["decay_rate"] =
        convention == DecayConvention::amplitude ? 1.0 / tau : 0.5 / tau;
    result.residual = rss;
    return result;
}

double golden_section_minimize(const std::function<double(double)>& f,
                               double lo, double hi, double tol,
                               int* evaluations) {
    const double phi = 0.6180339887498949;  // 1/golden ratio
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int evals = 2;
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
        ++evals;
    }
    if (evaluations) *evaluations += evals;
    return 0.5 * (a + b);
}

}  // namespace grating

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace nldiff {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t intervals = 0;
    bool converged = false;
};

/// One 15-point Kronrod rule on [a, b] with the embedded 7-point Gauss
/// estimate; abs_error is |K15 - G7|.
QuadratureResult gauss_kronrod15(const std::function<double(double)>& f, double a, double b);

/// Globally adaptive Gauss-Kronrod integration over the union of the given
/// initial panels (consecutive breakpoints).  Bisects the interval with the
/// largest error until the summed error is below max(abs_tol, rel_tol*|I|)
/// or `max_intervals` is reached (converged = false).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    const std::vector<double>& breakpoints, double abs_tol,
                                    double rel_tol, std::size_t max_intervals = 50000);

}  // namespace nldiff

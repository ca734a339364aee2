#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace vol32 {

/// Tolerances for adaptive quadrature. At least one of abs_tol / rel_tol
/// must be strictly positive.
struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t max_subdivisions = 200;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;          ///< estimated absolute error
    std::size_t evaluations = 0; ///< integrand evaluations used
};

/// Adaptive 15-point Gauss-Kronrod integration of f over [lo, hi].
/// Globally adaptive: the subinterval with the largest error estimate is
/// bisected until the tolerance is met. Throws ToleranceError (carrying the
/// best estimate) if max_subdivisions is exhausted first.
QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, const QuadratureSpec& spec = {});

/// Same, but the initial partition is given by `points` (sorted, at least
/// {lo, hi}). Useful when the integrand has a known kink.
QuadratureResult integrate_segmented(const std::function<double(double)>& f,
                                     const std::vector<double>& points,
                                     const QuadratureSpec& spec = {});

/// Integration of f over [lo, +inf) via the substitution x = lo + t/(1-t),
/// which maps the tail onto t in [0, 1).
QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         double lo,
                                         const QuadratureSpec& spec = {});

}  // namespace vol32

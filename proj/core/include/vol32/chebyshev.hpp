#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace vol32 {

/// Chebyshev polynomial interpolant of a smooth function on [lo, hi].
///
/// `build` samples f on Chebyshev-Lobatto grids of increasing size until the
/// trailing coefficients fall below `tol` relative to the largest one, then
/// trims the negligible tail. Evaluation uses Clenshaw recurrence.
class ChebyshevInterpolant {
  public:
    static ChebyshevInterpolant build(const std::function<double(double)>& f,
                                      double lo, double hi, double tol = 1e-10,
                                      std::size_t max_points = 2049);

    double operator()(double x) const;

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    std::size_t size() const { return coef_.size(); }

  private:
    ChebyshevInterpolant(double lo, double hi, std::vector<double> coef)
        : lo_(lo), hi_(hi), coef_(std::move(coef)) {}

    double lo_;
    double hi_;
    std::vector<double> coef_;
};

}  // namespace vol32

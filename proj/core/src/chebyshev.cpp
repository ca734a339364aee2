#include "vol32/chebyshev.hpp"

#include <cmath>

#include "vol32/errors.hpp"

namespace vol32 {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

// Coefficients a_k of p(x) = sum a_k T_k(t) from Lobatto samples f_j at
// t_j = cos(pi j / n), using the discrete orthogonality relations.
std::vector<double> lobatto_coefficients(const std::vector<double>& fj) {
    const std::size_t n = fj.size() - 1;
    std::vector<double> a(n + 1, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
        double s = 0.5 * (fj[0] + (k % 2 == 0 ? fj[n] : -fj[n]));
        for (std::size_t j = 1; j < n; ++j)
            s += fj[j] * std::cos(kPi * static_cast<double>(j * k) / n);
        a[k] = s * 2.0 / static_cast<double>(n);
    }
    a[0] *= 0.5;
    a[n] *= 0.5;
    return a;
}

}  // namespace

ChebyshevInterpolant ChebyshevInterpolant::build(
    const std::function<double(double)>& f, double lo, double hi, double tol,
    std::size_t max_points) {
    if (!(lo < hi)) throw DomainError("ChebyshevInterpolant: need lo < hi");
    if (!(tol > 0.0)) throw DomainError("ChebyshevInterpolant: need tol > 0");

    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    // Lobatto grids with n = 2^k nest: even-indexed nodes of the refined
    // grid are exactly the previous grid, so samples are reused.
    std::size_t n = 16;
    std::vector<double> fj(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        fj[j] = f(mid + half * std::cos(kPi * static_cast<double>(j) / n));

    for (;;) {
        std::vector<double> a = lobatto_coefficients(fj);
        double amax = 0.0;
        for (double c : a) amax = std::max(amax, std::abs(c));
        if (amax == 0.0) return ChebyshevInterpolant(lo, hi, {0.0});

        const double tail = std::max(std::abs(a[n - 1]), std::abs(a[n]));
        if (tail <= tol * amax) {
            std::size_t keep = a.size();
            while (keep > 1 && std::abs(a[keep - 1]) <= 0.5 * tol * amax)
                --keep;
            a.resize(keep);
            return ChebyshevInterpolant(lo, hi, std::move(a));
        }
        if (2 * n + 1 > max_points)
            throw ConvergenceError(
                "ChebyshevInterpolant: tolerance not reached at max_points");

        std::vector<double> fj2(2 * n + 1);
        for (std::size_t j = 0; j <= 2 * n; ++j) {
            if (j % 2 == 0)
                fj2[j] = fj[j / 2];
            else
                fj2[j] =
                    f(mid + half * std::cos(kPi * static_cast<double>(j) / (2 * n)));
        }
        n *= 2;
        fj = std::move(fj2);
    }
}

double ChebyshevInterpolant::operator()(double x) const {
    const double t = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
    // Clenshaw recurrence
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = coef_.size(); k-- > 1;) {
        const double b0 = 2.0 * t * b1 - b2 + coef_[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + coef_[0];
}

}  // namespace vol32

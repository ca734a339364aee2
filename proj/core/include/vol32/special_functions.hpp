#pragma once

#include <complex>
#include <cstddef>

namespace vol32 {

using cplx = std::complex<double>;

/// Tuning knobs for the confluent hypergeometric series evaluation.
struct SeriesControl {
    double rel_tol = 1e-12;       ///< relative truncation target
    std::size_t max_terms = 2000; ///< hard cap on series terms
    double asym_threshold = 60.0; ///< switch to asymptotic form when -Re(z) exceeds this
};

/// Principal-branch log-gamma for complex argument.
///
/// Stirling's series with an upward-recurrence shift into the region where
/// it converges fast (Re z >= 8), and the reflection formula for Re z < 1/2.
/// Accuracy is near machine precision away from the non-positive integers,
/// where the function has poles and a DomainError is thrown.
cplx log_gamma(cplx z);

/// Confluent hypergeometric function M(a, b, z) = 1F1(a; b; z).
///
/// The direct Taylor series is stable only for Re(z) >= 0. For Re(z) < 0 the
/// evaluation applies M(a,b,z) = e^z M(b-a, b, -z) first, and for large |z|
/// it switches to the divergent asymptotic expansion with automatic fallback
/// to the (transformed) series if the expansion starts to diverge before
/// reaching the tolerance. Throws ConvergenceError if no branch converges.
cplx kummer_m(cplx a, cplx b, cplx z, const SeriesControl& ctl = {});

/// Density of the noncentral chi-squared distribution with `df` degrees of
/// freedom and noncentrality `noncentrality`, evaluated at x >= 0.
///
/// Evaluated as the Poisson(noncentrality/2)-weighted mixture of central
/// chi-squared densities, expanding bidirectionally from the modal Poisson
/// index with all weights accumulated in log space, so extreme arguments
/// neither underflow nor lose the leading digits.
double noncentral_chisq_pdf(double df, double noncentrality, double x);

/// CDF counterpart of noncentral_chisq_pdf, same evaluation strategy with
/// the regularized incomplete gamma replacing the density kernel.
double noncentral_chisq_cdf(double df, double noncentrality, double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series for x < a + 1, continued fraction otherwise.
double gamma_p(double a, double x);

}  // namespace vol32

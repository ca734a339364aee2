#pragma once

#include <complex>

#include "vol32/models.hpp"
#include "vol32/special_functions.hpp"

namespace vol32 {

/// Intermediate quantities of the joint Fourier-Laplace transform
///   E[exp(iu X_T - l (RV_T - RV_t)) | X_t, V_t]
/// for the 3/2-plus-jumps model. X is the log index, RV the realized
/// variance (integrated variance plus summed squared jumps).
struct TransformTerms {
    cplx p;      ///< -kappa + i*epsilon*rho*u
    cplx q;      ///< l + iu/2 + u^2/2
    cplx alpha;  ///< exponent root with the "+" square root
    cplx gamma;  ///< 2(alpha + 1 - p/epsilon^2)
    cplx a;      ///< jump transform value
    double y;    ///< V_t (e^{kappa theta tau} - 1) / (kappa theta) > 0
};

/// Assemble p, q, alpha, gamma, a, y for given (u, l) and horizon tau.
///
/// alpha is the "+" root of the indicial equation. It is evaluated in the
/// rationalized form B / (A + sqrt(A^2 + B)) with A = 1/2 - p/eps^2,
/// B = 2q/eps^2, which is free of subtractive cancellation for small q —
/// in particular alpha is exactly 0 at the martingale point (u=-i, l=0) —
/// and stays on the principal branch for real u and Re(l) >= 0.
TransformTerms transform_terms(cplx u, cplx l, double v_t, double tau,
                               const ThreeHalvesParams& p32,
                               const JumpParams& jp);

/// E[exp(iu*xi - l*xi^2)] for one jump xi ~ N(mu, sigma^2):
///   exp(-(2 l mu^2 - 2 i mu u + sigma^2 u^2) / (2 + 4 l sigma^2))
///     / sqrt(1 + 2 l sigma^2), principal square root.
/// Requires Re(1 + 2 l sigma^2) > 0.
cplx jump_transform(cplx u, cplx l, const JumpParams& jp);

/// The joint Fourier-Laplace transform of Prop-type affine form:
///   phase * Gamma(gamma-alpha)/Gamma(gamma) * (2/(eps^2 y))^alpha
///         * M(alpha, gamma, -2/(eps^2 y)) * exp(lambda tau (a - 1))
/// with phase = exp(iu(x_t + (r - lambda mu_bar) tau)).
///
/// u must be real for production pricing. The analytic continuation to
/// u = -i (the martingale identity) is permitted when the martingale
/// condition holds; other complex u are rejected unless the derived
/// Kummer/Gamma arguments stay in the validated region.
cplx fl_transform_32j(cplx u, cplx l, double x_t, double v_t, double t,
                      double T, const ThreeHalvesParams& p32,
                      const JumpParams& jp, const MarketEnv& env,
                      const SeriesControl& ctl = {},
                      bool allow_strict_local = false);

/// Laplace transform of integrated variance for the 3/2 process:
///   E[exp(-l Int_t^T V_s ds) | V_t],
/// the u = 0 specialization of the transform with no jump or phase factor.
cplx laplace_rv_32(cplx l, double v_t, double tau,
                   const ThreeHalvesParams& p32,
                   const SeriesControl& ctl = {});

/// Expected integrated variance g(x, tau) = E[Int_0^tau V_s ds | V_0 = x]
/// for the 3/2 process, via complex-step differentiation of laplace_rv_32:
/// g = -Im(L(ih))/h with h = 1e-8 (no subtractive cancellation).
double g_32(double x, double tau, const ThreeHalvesParams& p32);

/// Same quantity for the square-root (Heston/SVJ) variance process, where
/// it is affine: g = a x + b, a = (1 - e^{-kappa_t tau})/kappa_t,
/// b = theta_t (tau - a).
double g_svj(double x, double tau, const SVJParams& sp);

/// Laplace transform E[exp(-l Int_0^tau V_s ds) | V_0 = x] for the
/// square-root variance process (closed form). Provides the independent
/// derivative path used to cross-check g_svj.
cplx laplace_iv_cir(cplx l, double x, double tau, const SVJParams& sp);

/// Complex-step derivative of laplace_iv_cir at l = 0 (equals g_svj up to
/// the differentiation step error; kept separate for two-path testing).
double g_svj_from_transform(double x, double tau, const SVJParams& sp);

}  // namespace vol32

#include "vol32/transforms.hpp"

#include <cmath>

#include "vol32/errors.hpp"

namespace vol32 {

namespace {

constexpr cplx kI(0.0, 1.0);
// Complex-step size for g = -dL/dl at l = 0. The step enters the result
// only linearly (no cancellation), so it can sit near roundoff level.
constexpr double kComplexStep = 1e-8;

}  // namespace

TransformTerms transform_terms(cplx u, cplx l, double v_t, double tau,
                               const ThreeHalvesParams& p32,
                               const JumpParams& jp) {
    if (!(v_t > 0.0)) throw DomainError("transform_terms: v_t must be > 0");
    if (!(tau > 0.0)) throw DomainError("transform_terms: tau must be > 0");

    const double e2 = p32.epsilon * p32.epsilon;
    const double ktheta = p32.kappa * p32.theta;

    TransformTerms t;
    t.y = v_t * std::expm1(ktheta * tau) / ktheta;
    t.p = -p32.kappa + kI * (p32.epsilon * p32.rho) * u;
    t.q = l + 0.5 * kI * u + 0.5 * u * u;

    // A = 1/2 - p/eps^2 has Re(A) = 1/2 + kappa/eps^2 > 0 for every real u,
    // so the rationalized "+" root B/(A + sqrt(A^2+B)) applies; it only
    // loses validity on the analytic continuation below the real axis
    // (u = -i with the martingale condition waived), where the plain form
    // -A + sqrt(A^2+B) takes over.
    const cplx A = 0.5 - t.p / e2;
    const cplx B = 2.0 * t.q / e2;
    const cplx disc = A * A + B;
    if (u.imag() != 0.0 && disc.real() < 0.0)
        throw DomainError(
            "transform_terms: complex u drives the alpha root across the "
            "branch cut (outside the validated strip)");
    if (A.real() > 0.0)
        t.alpha = (B == cplx(0.0)) ? cplx(0.0) : B / (A + std::sqrt(disc));
    else
        t.alpha = -A + std::sqrt(disc);
    t.gamma = 2.0 * (t.alpha + 1.0 - t.p / e2);
    t.a = jump_transform(u, l, jp);
    return t;
}

cplx jump_transform(cplx u, cplx l, const JumpParams& jp) {
    const double s2 = jp.sigma * jp.sigma;
    const cplx denom = 1.0 + 2.0 * l * s2;
    if (!(denom.real() > 0.0))
        throw DomainError(
            "jump_transform: 1 + 2 l sigma^2 left the right half-plane "
            "(branch of the square root undefined)");
    const cplx num =
        2.0 * l * (jp.mu * jp.mu) - 2.0 * kI * jp.mu * u + s2 * u * u;
    return std::exp(-num / (2.0 * denom)) / std::sqrt(denom);
}

namespace {

// Gamma(gamma-alpha)/Gamma(gamma) * (2/(eps^2 y))^alpha * M(alpha, gamma, z)
// with z = -2/(eps^2 y) < 0. The power has a real positive base, so it is
// evaluated as exp(alpha log(.)) without branch ambiguity.
cplx kummer_block(const TransformTerms& t, double epsilon,
                  const SeriesControl& ctl) {
    if (!(t.gamma.real() > 0.0) || !((t.gamma - t.alpha).real() > 0.0))
        throw DomainError(
            "fl_transform: Gamma arguments left the right half-plane "
            "(u outside the validated strip)");
    const double e2y = epsilon * epsilon * t.y;
    const cplx log_pref = log_gamma(t.gamma - t.alpha) - log_gamma(t.gamma) +
                          t.alpha * std::log(2.0 / e2y);
    const cplx m = kummer_m(t.alpha, t.gamma, cplx(-2.0 / e2y), ctl);
    return std::exp(log_pref) * m;
}

}  // namespace

cplx fl_transform_32j(cplx u, cplx l, double x_t, double v_t, double t,
                      double T, const ThreeHalvesParams& p32,
                      const JumpParams& jp, const MarketEnv& env,
                      const SeriesControl& ctl, bool allow_strict_local) {
    if (!(T > t)) throw DomainError("fl_transform_32j: need T > t");
    require_martingale(p32, allow_strict_local);
    validate(jp);
    validate(env);

    const double tau = T - t;
    const TransformTerms terms = transform_terms(u, l, v_t, tau, p32, jp);
    const cplx block = kummer_block(terms, p32.epsilon, ctl);
    const cplx phase =
        std::exp(kI * u * (x_t + (env.r - jp.lambda * jp.mu_bar) * tau));
    const cplx jumps = std::exp(jp.lambda * tau * (terms.a - 1.0));
    return phase * block * jumps;
}

cplx laplace_rv_32(cplx l, double v_t, double tau,
                   const ThreeHalvesParams& p32, const SeriesControl& ctl) {
    validate(p32);
    if (l == cplx(0.0)) return 1.0;
    const TransformTerms terms =
        transform_terms(cplx(0.0), l, v_t, tau, p32, JumpParams{});
    return kummer_block(terms, p32.epsilon, ctl);
}

double g_32(double x, double tau, const ThreeHalvesParams& p32) {
    const cplx L = laplace_rv_32(cplx(0.0, kComplexStep), x, tau, p32);
    return -L.imag() / kComplexStep;
}

double g_svj(double x, double tau, const SVJParams& sp) {
    if (!(x >= 0.0)) throw DomainError("g_svj: x must be >= 0");
    if (!(tau > 0.0)) throw DomainError("g_svj: tau must be > 0");
    const double a = -std::expm1(-sp.kappa_t * tau) / sp.kappa_t;
    return a * x + sp.theta_t * (tau - a);
}

cplx laplace_iv_cir(cplx l, double x, double tau, const SVJParams& sp) {
    if (!(x >= 0.0)) throw DomainError("laplace_iv_cir: x must be >= 0");
    if (!(tau > 0.0)) throw DomainError("laplace_iv_cir: tau must be > 0");
    if (l == cplx(0.0)) return 1.0;
    const double kt = sp.kappa_t;
    const double e2 = sp.epsilon_t * sp.epsilon_t;
    const cplx h = std::sqrt(kt * kt + 2.0 * e2 * l);
    // Written with e^{-h tau} throughout so large h tau cannot overflow.
    const cplx emh = std::exp(-h * tau);
    const cplx den = (h + kt) * (1.0 - emh) + 2.0 * h * emh;
    const cplx B = 2.0 * l * (1.0 - emh) / den;
    const cplx logA = (2.0 * kt * sp.theta_t / e2) *
                      (std::log(2.0 * h) + 0.5 * (kt - h) * tau - std::log(den));
    return std::exp(logA - B * x);
}

double g_svj_from_transform(double x, double tau, const SVJParams& sp) {
    const cplx L = laplace_iv_cir(cplx(0.0, kComplexStep), x, tau, sp);
    return -L.imag() / kComplexStep;
}

}  // namespace vol32

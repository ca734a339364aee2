#include "vol32/vix.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "vol32/chebyshev.hpp"
#include "vol32/errors.hpp"
#include "vol32/quadrature.hpp"
#include "vol32/special_functions.hpp"
#include "vol32/transforms.hpp"

namespace vol32 {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
// mass allowed outside the truncated integration domain, per tail
constexpr double kTailMass = 5e-11;
const QuadratureSpec kQuad{1e-9, 1e-10, 200};

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void validate_spec(const VIXSpec& spec) {
    if (!(spec.tau > 0.0)) throw DomainError("VIXSpec: tau must be > 0");
    if (!(spec.scale > 0.0)) throw DomainError("VIXSpec: scale must be > 0");
}

// Quantile of the noncentral chi-squared law by bisection on the CDF.
double chi2_quantile(double df, double nc, double p) {
    double lo = 0.0;
    double hi = df + nc;
    while (noncentral_chisq_cdf(df, nc, hi) < p) {
        hi *= 2.0;
        if (hi > 1e12)
            throw ConvergenceError("chi2_quantile: upper bracket not found");
    }
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (noncentral_chisq_cdf(df, nc, mid) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-6 * std::max(hi, 1e-300)) break;
    }
    return 0.5 * (lo + hi);
}

// The VIX pricing integrals are all of the form E[h(VIX(V_T))] where the
// law of V_T is a deterministic monotone map of a noncentral chi-squared
// variable w. Integration runs in w, where the density is smooth; the
// domain is truncated at quantiles leaving < 1e-10 total mass outside.
struct WIntegral {
    double df, nc;
    double w_lo, w_hi;
    std::function<double(double)> vix_of_w;  // monotone in w
    bool decreasing;                         // true for the 3/2 map V = G/(c w)
};

double pdf_w(const WIntegral& wi, double w) {
    return noncentral_chisq_pdf(wi.df, wi.nc, w);
}

// w where vix_of_w crosses K (caller guarantees a bracketing sign change).
double kink_w(const WIntegral& wi, double K) {
    double lo = wi.w_lo, hi = wi.w_hi;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(hi, 1.0); ++i) {
        const double mid = 0.5 * (lo + hi);
        const bool above = wi.vix_of_w(mid) > K;
        if (above == wi.decreasing)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double expect_vix(const WIntegral& wi) {
    auto f = [&](double w) { return wi.vix_of_w(w) * pdf_w(wi, w); };
    return integrate(f, wi.w_lo, wi.w_hi, kQuad).value;
}

double call_undisc(const WIntegral& wi, double K) {
    if (!(K > 0.0)) throw DomainError("vix call: strike must be > 0");
    const double v_at_lo = wi.vix_of_w(wi.w_lo);
    const double v_at_hi = wi.vix_of_w(wi.w_hi);
    const double vmax = std::max(v_at_lo, v_at_hi);
    const double vmin = std::min(v_at_lo, v_at_hi);
    if (K >= vmax) return 0.0;
    auto f = [&](double w) { return (wi.vix_of_w(w) - K) * pdf_w(wi, w); };
    double lo = wi.w_lo, hi = wi.w_hi;
    if (K > vmin) {
        const double ws = kink_w(wi, K);
        if (wi.decreasing)
            hi = ws;
        else
            lo = ws;
    }
    if (!(lo < hi)) return 0.0;
    return integrate(f, lo, hi, kQuad).value;
}

double put_undisc_direct(const WIntegral& wi, double K) {
    if (!(K > 0.0)) throw DomainError("vix put: strike must be > 0");
    const double v_at_lo = wi.vix_of_w(wi.w_lo);
    const double v_at_hi = wi.vix_of_w(wi.w_hi);
    const double vmax = std::max(v_at_lo, v_at_hi);
    const double vmin = std::min(v_at_lo, v_at_hi);
    if (K <= vmin) return 0.0;
    auto f = [&](double w) { return (K - wi.vix_of_w(w)) * pdf_w(wi, w); };
    double lo = wi.w_lo, hi = wi.w_hi;
    if (K < vmax) {
        const double ws = kink_w(wi, K);
        if (wi.decreasing)
            lo = ws;
        else
            hi = ws;
    }
    if (!(lo < hi)) return 0.0;
    return integrate(f, lo, hi, kQuad).value;
}

double jump_vix_offset(const JumpParams& jp) {
    // 2 lambda (mu_bar - mu) >= lambda sigma^2 >= 0
    return 2.0 * jp.lambda * (jp.mu_bar - jp.mu);
}

// 3/2 model: w = X_T growth / c_T, so V_T = growth / (c_T w) and the VIX
// level needs g_32 per integrand point. g is cached on a Chebyshev grid in
// log V and the cache is verified against direct evaluation.
WIntegral make_w_integral_32(const ThreeHalvesParams& p32,
                             const JumpParams& jp, const VIXSpec& spec,
                             double T, bool allow_strict_local) {
    require_martingale(p32, allow_strict_local);
    validate(jp);
    validate_spec(spec);
    if (!(T > 0.0)) throw DomainError("vix pricing: T must be > 0");

    const InverseCIRDensity den = inverse_cir_density(p32.v0, T, p32);
    WIntegral wi;
    wi.df = den.delta;
    wi.nc = den.noncentrality;
    wi.w_lo = chi2_quantile(den.delta, den.noncentrality, kTailMass);
    wi.w_hi = chi2_quantile(den.delta, den.noncentrality, 1.0 - kTailMass);
    wi.decreasing = true;

    const double v_min = den.growth / (den.c_T * wi.w_hi);
    const double v_max = den.growth / (den.c_T * wi.w_lo);
    const double s_lo = std::log(v_min), s_hi = std::log(v_max);
    auto g_direct = [p32, tau = spec.tau](double s) {
        return g_32(std::exp(s), tau, p32);
    };
    auto gcache = std::make_shared<ChebyshevInterpolant>(
        ChebyshevInterpolant::build(g_direct, s_lo, s_hi, 1e-9));

    // spot-check the cache against direct evaluation
    for (int i = 1; i <= 7; ++i) {
        const double s = s_lo + (s_hi - s_lo) * i / 8.0;
        const double direct = g_direct(s);
        if (std::abs((*gcache)(s)-direct) > 1e-8 * std::max(1.0, direct))
            throw ConvergenceError(
                "vix pricing: g-interpolant failed its verification against "
                "direct evaluation");
    }

    const double joff = jump_vix_offset(jp);
    wi.vix_of_w = [den, gcache, joff, tau = spec.tau,
                   scale = spec.scale](double w) {
        const double v = den.growth / (den.c_T * w);
        const double arg = std::max(0.0, (*gcache)(std::log(v)) / tau + joff);
        return scale * std::sqrt(arg);
    };
    return wi;
}

// Square-root model: V_T = c_T w directly, g is affine, no caching needed.
WIntegral make_w_integral_svj(const SVJParams& sp, const VIXSpec& spec,
                              double T) {
    validate(sp);
    validate_spec(spec);
    if (!(T > 0.0)) throw DomainError("vix pricing: T must be > 0");

    const double kt = sp.kappa_t;
    const double e2 = sp.epsilon_t * sp.epsilon_t;
    const double emk = std::exp(-kt * T);
    const double c_T = e2 * (1.0 - emk) / (4.0 * kt);
    const double nc = sp.v0 * emk / c_T;
    const double df = 4.0 * kt * sp.theta_t / e2;

    WIntegral wi;
    wi.df = df;
    wi.nc = nc;
    wi.w_lo = chi2_quantile(df, nc, kTailMass);
    wi.w_hi = chi2_quantile(df, nc, 1.0 - kTailMass);
    wi.decreasing = false;

    const double a = -std::expm1(-kt * spec.tau) / kt;
    const double b = sp.theta_t * (spec.tau - a);
    const double joff = jump_vix_offset(sp.jumps);
    wi.vix_of_w = [c_T, a, b, joff, tau = spec.tau,
                   scale = spec.scale](double w) {
        const double v = c_T * w;
        return scale * std::sqrt(std::max(0.0, (a * v + b) / tau + joff));
    };
    return wi;
}

VixChain run_chain(const WIntegral& wi, const std::vector<double>& strikes) {
    VixChain chain;
    chain.forward = expect_vix(wi);
    chain.strikes = strikes;
    chain.calls.reserve(strikes.size());
    chain.puts.reserve(strikes.size());
    for (double K : strikes) {
        const double c = call_undisc(wi, K);
        chain.calls.push_back(c);
        chain.puts.push_back(c - (chain.forward - K));  // parity, undiscounted
    }
    return chain;
}

}  // namespace

InverseCIRDensity inverse_cir_density(double v0, double T,
                                      const ThreeHalvesParams& p32) {
    validate(p32);
    if (!(v0 > 0.0)) throw DomainError("inverse_cir_density: v0 must be > 0");
    if (!(T > 0.0)) throw DomainError("inverse_cir_density: T must be > 0");
    const double e2 = p32.epsilon * p32.epsilon;
    const double ktheta = p32.kappa * p32.theta;
    InverseCIRDensity d;
    d.delta = 4.0 * (p32.kappa + e2) / e2;
    d.c_T = e2 * std::expm1(ktheta * T) / (4.0 * ktheta);
    d.noncentrality = 1.0 / (v0 * d.c_T);
    d.growth = std::exp(ktheta * T);
    return d;
}

double vix_squared(double v_t, const VIXSpec& spec,
                   const ThreeHalvesParams& p32, const JumpParams& jp) {
    validate(p32);
    validate(jp);
    validate_spec(spec);
    if (!(v_t > 0.0)) throw DomainError("vix_squared: v_t must be > 0");
    const double core = g_32(v_t, spec.tau, p32) / spec.tau + jump_vix_offset(jp);
    return core * spec.scale * spec.scale;
}

double vix_squared_svj(double v_t, const VIXSpec& spec, const SVJParams& sp) {
    validate(sp);
    validate_spec(spec);
    if (!(v_t >= 0.0)) throw DomainError("vix_squared_svj: v_t must be >= 0");
    const double core =
        g_svj(v_t, spec.tau, sp) / spec.tau + jump_vix_offset(sp.jumps);
    return core * spec.scale * spec.scale;
}

double transition_density_32(double v0, double T, double y,
                             const ThreeHalvesParams& p32) {
    if (!(y > 0.0)) throw DomainError("transition_density_32: y must be > 0");
    const InverseCIRDensity d = inverse_cir_density(v0, T, p32);
    const double ratio = d.growth / d.c_T;
    return ratio / (y * y) *
           noncentral_chisq_pdf(d.delta, d.noncentrality, ratio / y);
}

VixChain vix_chain(const ThreeHalvesParams& p32, const JumpParams& jp,
                   const VIXSpec& spec, double T,
                   const std::vector<double>& strikes,
                   bool allow_strict_local) {
    return run_chain(make_w_integral_32(p32, jp, spec, T, allow_strict_local),
                     strikes);
}

VixChain vix_chain_svj(const SVJParams& sp, const VIXSpec& spec, double T,
                       const std::vector<double>& strikes) {
    return run_chain(make_w_integral_svj(sp, spec, T), strikes);
}

double vix_future(const ThreeHalvesParams& p32, const JumpParams& jp,
                  const MarketEnv& env, const VIXSpec& spec, double T,
                  bool discounted, bool allow_strict_local) {
    validate(env);
    const double f =
        expect_vix(make_w_integral_32(p32, jp, spec, T, allow_strict_local));
    return discounted ? std::exp(-env.r * T) * f : f;
}

double vix_call(const ThreeHalvesParams& p32, const JumpParams& jp,
                const MarketEnv& env, const VIXSpec& spec, double T, double K,
                bool discounted, bool allow_strict_local) {
    validate(env);
    const double c = call_undisc(
        make_w_integral_32(p32, jp, spec, T, allow_strict_local), K);
    return discounted ? std::exp(-env.r * T) * c : c;
}

double vix_put(const ThreeHalvesParams& p32, const JumpParams& jp,
               const MarketEnv& env, const VIXSpec& spec, double T, double K,
               bool discounted, bool allow_strict_local) {
    validate(env);
    const WIntegral wi = make_w_integral_32(p32, jp, spec, T, allow_strict_local);
    const double p = call_undisc(wi, K) - (expect_vix(wi) - K);
    return discounted ? std::exp(-env.r * T) * p : p;
}

double vix_put_direct(const ThreeHalvesParams& p32, const JumpParams& jp,
                      const MarketEnv& env, const VIXSpec& spec, double T,
                      double K, bool discounted, bool allow_strict_local) {
    validate(env);
    const double p = put_undisc_direct(
        make_w_integral_32(p32, jp, spec, T, allow_strict_local), K);
    return discounted ? std::exp(-env.r * T) * p : p;
}

double vix_future_svj(const SVJParams& sp, const MarketEnv& env,
                      const VIXSpec& spec, double T, bool discounted) {
    validate(env);
    const double f = expect_vix(make_w_integral_svj(sp, spec, T));
    return discounted ? std::exp(-env.r * T) * f : f;
}

double vix_call_svj(const SVJParams& sp, const MarketEnv& env,
                    const VIXSpec& spec, double T, double K, bool discounted) {
    validate(env);
    const double c = call_undisc(make_w_integral_svj(sp, spec, T), K);
    return discounted ? std::exp(-env.r * T) * c : c;
}

double vix_put_svj(const SVJParams& sp, const MarketEnv& env,
                   const VIXSpec& spec, double T, double K, bool discounted) {
    validate(env);
    const WIntegral wi = make_w_integral_svj(sp, spec, T);
    const double p = call_undisc(wi, K) - (expect_vix(wi) - K);
    return discounted ? std::exp(-env.r * T) * p : p;
}

double vix_put_svj_direct(const SVJParams& sp, const MarketEnv& env,
                          const VIXSpec& spec, double T, double K,
                          bool discounted) {
    validate(env);
    const double p = put_undisc_direct(make_w_integral_svj(sp, spec, T), K);
    return discounted ? std::exp(-env.r * T) * p : p;
}

double black_call(double forward, double strike, double T, double zeta) {
    if (!(forward > 0.0) || !(strike > 0.0) || !(T > 0.0))
        throw DomainError("black_call: need forward, strike, T > 0");
    if (!(zeta >= 0.0)) throw DomainError("black_call: zeta must be >= 0");
    if (zeta == 0.0) return std::max(forward - strike, 0.0);
    const double sq = zeta * std::sqrt(T);
    const double d1 = (std::log(forward / strike) + 0.5 * zeta * zeta * T) / sq;
    const double d2 = d1 - sq;
    return forward * norm_cdf(d1) - strike * norm_cdf(d2);
}

double black_implied_vol(double price, double forward, double strike,
                         double T) {
    if (!(forward > 0.0) || !(strike > 0.0) || !(T > 0.0))
        throw DomainError("black_implied_vol: need forward, strike, T > 0");
    const double lower = std::max(forward - strike, 0.0);
    const double slack = 1e-12 * forward;
    if (price < lower - slack || price > forward + slack)
        throw DomainError("black_implied_vol: price outside no-arbitrage bounds");
    if (price <= lower + slack) return 0.0;

    double lo = 1e-12, hi = 1.0;
    while (black_call(forward, strike, T, hi) < price) {
        hi *= 2.0;
        if (hi > 64.0)
            throw ConvergenceError("black_implied_vol: no vol below 64 matches");
    }
    double z = std::min(std::max(0.5, lo), hi);
    for (int it = 0; it < 100; ++it) {
        const double pv = black_call(forward, strike, T, z);
        const double diff = pv - price;
        if (diff > 0.0)
            hi = z;
        else
            lo = z;
        const double sq = z * std::sqrt(T);
        const double d1 = (std::log(forward / strike) + 0.5 * z * z * T) / sq;
        const double vega = forward * std::sqrt(T) *
                            std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * kPi);
        double next = (vega > 1e-12) ? z - diff / vega : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - z) < 1e-12 * std::max(1.0, z)) return next;
        z = next;
    }
    throw ConvergenceError("black_implied_vol: did not converge");
}

}  // namespace vol32

#include "vol32/equity.hpp"

#include <algorithm>
#include <cmath>

#include "vol32/errors.hpp"
#include "vol32/threading.hpp"
#include "vol32/transforms.hpp"

namespace vol32 {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

cplx char_fn(double u, double T, double x0, double v0,
             const ThreeHalvesParams& p32, const JumpParams& jp,
             const MarketEnv& env, const SeriesControl& ctl,
             bool allow_strict_local) {
    return fl_transform_32j(cplx(u), cplx(0.0), x0, v0, 0.0, T, p32, jp, env,
                            ctl, allow_strict_local);
}

namespace {

// chi_k = Int_c^d e^z cos(k pi (z-a)/(b-a)) dz on [a, b].
double cos_chi(double k_pi_over_w, double a, double c, double d) {
    const double uc = k_pi_over_w * (c - a);
    const double ud = k_pi_over_w * (d - a);
    const double ec = std::exp(c);
    const double ed = std::exp(d);
    return (std::cos(ud) * ed - std::cos(uc) * ec +
            k_pi_over_w * (std::sin(ud) * ed - std::sin(uc) * ec)) /
           (1.0 + k_pi_over_w * k_pi_over_w);
}

// psi_k = Int_c^d cos(k pi (z-a)/(b-a)) dz on [a, b].
double cos_psi(double k_pi_over_w, double a, double c, double d) {
    if (k_pi_over_w == 0.0) return d - c;
    return (std::sin(k_pi_over_w * (d - a)) - std::sin(k_pi_over_w * (c - a))) /
           k_pi_over_w;
}

struct Cumulants {
    double c1, c2, c4;
};

// First, second, and fourth cumulants of log S_T from the characteristic
// function: Richardson-extrapolated central differences of psi = log phi
// at u = 0, using the conjugate symmetry phi(-u) = conj(phi(u)).
Cumulants cumulants_from_char_fn(const std::function<cplx(double)>& phi) {
    const double h = 1e-4;
    const cplx p1 = std::log(phi(h));
    const cplx p2 = std::log(phi(2.0 * h));
    const double c1 = (8.0 * p1.imag() - p2.imag()) / (6.0 * h);
    const double c2 = -(16.0 * p1.real() - p2.real()) / (6.0 * h * h);

    const double H = 0.25;  // wide step: the 4th difference needs signal
    const cplx q1 = std::log(phi(H));
    const cplx q2 = std::log(phi(2.0 * H));
    const double c4 =
        std::max(0.0, (2.0 * q2.real() - 8.0 * q1.real()) / (H * H * H * H));

    if (!(c2 > 0.0) || !std::isfinite(c1) || !std::isfinite(c4))
        throw ConvergenceError(
            "cos_price: cumulant estimation from the characteristic function "
            "failed (c2 <= 0 or non-finite)");
    return {c1, c2, c4};
}

}  // namespace

std::vector<double> cos_price(const std::vector<double>& strikes,
                              OptionKind kind, double T, const MarketEnv& env,
                              const ThreeHalvesParams& p32,
                              const JumpParams& jp, const CosConfig& cfg,
                              bool allow_strict_local) {
    if (strikes.empty()) throw DomainError("cos_price: empty strike list");
    for (double k : strikes)
        if (!(k > 0.0)) throw DomainError("cos_price: strikes must be > 0");
    if (!(T > 0.0)) throw DomainError("cos_price: maturity must be > 0");
    if (cfg.n_terms < 32) throw DomainError("cos_price: n_terms must be >= 32");
    if (!(cfg.trunc_width > 0.0))
        throw DomainError("cos_price: trunc_width must be > 0");
    require_martingale(p32, allow_strict_local);
    validate(jp);
    validate(env);

    const double x0 = std::log(env.s0);
    SeriesControl ctl;
    auto phi = [&](double u) {
        return char_fn(u, T, x0, p32.v0, p32, jp, env, ctl, allow_strict_local);
    };

    double c1 = cfg.c1, c2 = cfg.c2, c4 = 0.0;
    if (std::isnan(c1) || std::isnan(c2)) {
        const Cumulants cum = cumulants_from_char_fn(phi);
        if (std::isnan(c1)) c1 = cum.c1;
        if (std::isnan(c2)) c2 = cum.c2;
        c4 = cum.c4;
    }
    if (!(c2 > 0.0)) throw DomainError("cos_price: c2 must be > 0");

    const double width = cfg.trunc_width * std::sqrt(c2 + std::sqrt(c4));
    const double w2 = 2.0 * width;  // interval length b - a, strike-invariant

    // phi values on the shared grid u_k = k pi / (b-a); grown lazily as the
    // term count doubles (the grid nests).
    std::vector<cplx> phik;
    auto extend_phi = [&](std::size_t n) {
        const std::size_t old = phik.size();
        if (n <= old) return;
        phik.resize(n);
        const std::size_t n_threads = resolve_threads();
        const std::size_t chunk = 64;
        const std::size_t n_blocks = (n - old + chunk - 1) / chunk;
        parallel_for_blocks(n_blocks, n_threads, [&](std::size_t blk) {
            const std::size_t first = old + blk * chunk;
            const std::size_t last = std::min(n, first + chunk);
            for (std::size_t k = first; k < last; ++k) {
                const double u = static_cast<double>(k) * kPi / w2;
                // fold in the strike-independent part of the interval phase
                phik[k] = phi(u) * std::exp(cplx(0.0, -u * (c1 - width)));
            }
        });
    };

    const double disc = std::exp(-env.r * T);
    auto price_all = [&](std::size_t n) {
        extend_phi(n);
        std::vector<double> out(strikes.size());
        for (std::size_t s = 0; s < strikes.size(); ++s) {
            const double K = strikes[s];
            const double a = c1 - std::log(K) - width;
            const double b = a + w2;
            // payoff support clamped to where the option is in the money
            double lo, hi;
            if (kind == OptionKind::call) {
                lo = std::max(a, 0.0);
                hi = b;
            } else {
                lo = a;
                hi = std::min(b, 0.0);
            }
            if (!(lo < hi)) {
                out[s] = 0.0;
                continue;
            }
            // phase bookkeeping: phi_z(u_k) e^{-i u_k a} =
            // phi(u_k) e^{-i u_k (log K + a)} = phi(u_k) e^{-i u_k (c1 - width)},
            // which is exactly the strike-independent factor folded into phik;
            // all strike dependence lives in the payoff coefficients.
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double kw = static_cast<double>(k) * kPi / w2;
                const double chi = cos_chi(kw, a, lo, hi);
                const double psi = cos_psi(kw, a, lo, hi);
                const double payoff_coef =
                    (kind == OptionKind::call) ? (chi - psi) : (psi - chi);
                const double term = phik[k].real() * payoff_coef;
                acc += (k == 0) ? 0.5 * term : term;
            }
            out[s] = disc * K * (2.0 / w2) * acc;
        }
        return out;
    };

    std::size_t n = std::max<std::size_t>(32, cfg.n_terms);
    std::vector<double> prices = price_all(n);
    const double tol = 1e-7 * env.s0;
    while (true) {
        if (2 * n > cfg.max_terms)
            throw ConvergenceError(
                "cos_price: doubling n_terms still moves prices by more than "
                "1e-7 * s0 at the max_terms cap");
        std::vector<double> refined = price_all(2 * n);
        double shift = 0.0;
        for (std::size_t s = 0; s < prices.size(); ++s)
            shift = std::max(shift, std::abs(refined[s] - prices[s]));
        prices = std::move(refined);
        n *= 2;
        if (shift <= tol) break;
    }
    // negative dust from series truncation is numerically possible on
    // far-out-of-the-money strikes; clip at zero
    for (double& p : prices) p = std::max(p, 0.0);
    return prices;
}

double black_scholes_price(double s0, double strike, double T, double r,
                           double vol, OptionKind kind) {
    if (!(s0 > 0.0) || !(strike > 0.0) || !(T > 0.0))
        throw DomainError("black_scholes_price: need s0, strike, T > 0");
    if (!(vol >= 0.0)) throw DomainError("black_scholes_price: vol must be >= 0");
    const double df = std::exp(-r * T);
    if (vol == 0.0) {
        const double fwd = s0 / df;
        const double call = df * std::max(fwd - strike, 0.0);
        return kind == OptionKind::call ? call : call - s0 + strike * df;
    }
    const double sq = vol * std::sqrt(T);
    const double d1 = (std::log(s0 / strike) + (r + 0.5 * vol * vol) * T) / sq;
    const double d2 = d1 - sq;
    const double call = s0 * norm_cdf(d1) - strike * df * norm_cdf(d2);
    return kind == OptionKind::call ? call : call - s0 + strike * df;
}

double bs_implied_vol(double price, double s0, double strike, double T,
                      double r, OptionKind kind) {
    if (!(s0 > 0.0) || !(strike > 0.0) || !(T > 0.0))
        throw DomainError("bs_implied_vol: need s0, strike, T > 0");
    const double df = std::exp(-r * T);
    const double lower = (kind == OptionKind::call)
                             ? std::max(s0 - strike * df, 0.0)
                             : std::max(strike * df - s0, 0.0);
    const double upper = (kind == OptionKind::call) ? s0 : strike * df;
    const double slack = 1e-12 * s0;
    if (price < lower - slack || price > upper + slack)
        throw DomainError("bs_implied_vol: price outside arbitrage bounds");
    if (price <= lower + slack) return 0.0;

    double lo = 1e-12, hi = 1.0;
    while (black_scholes_price(s0, strike, T, r, hi, kind) < price) {
        hi *= 2.0;
        if (hi > 64.0)
            throw ConvergenceError("bs_implied_vol: no vol below 64 matches");
    }
    double v = std::min(std::max(0.5, lo), hi);
    for (int it = 0; it < 100; ++it) {
        const double pv = black_scholes_price(s0, strike, T, r, v, kind);
        const double diff = pv - price;
        if (diff > 0.0)
            hi = v;
        else
            lo = v;
        // vega, guarded: fall back to bisection when it is too flat
        const double sq = v * std::sqrt(T);
        const double d1 = (std::log(s0 / strike) + (r + 0.5 * v * v) * T) / sq;
        const double vega =
            s0 * std::sqrt(T) * std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * kPi);
        double next = (vega > 1e-12) ? v - diff / vega : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - v) < 1e-12 * std::max(1.0, v)) return next;
        v = next;
    }
    throw ConvergenceError("bs_implied_vol: did not converge");
}

double variance_swap_strike(double T, const ThreeHalvesParams& p32,
                            const JumpParams& jp) {
    if (!(T > 0.0)) throw DomainError("variance_swap_strike: T must be > 0");
    validate(p32);
    validate(jp);
    const double xi2 = jp.mu * jp.mu + jp.sigma * jp.sigma;
    return (g_32(p32.v0, T, p32) + jp.lambda * T * xi2) / T;
}

}  // namespace vol32

#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "vol32/models.hpp"
#include "vol32/special_functions.hpp"

namespace vol32 {

/// Controls for the Fourier-cosine expansion pricer.
///
/// c1/c2 are the first/second cumulants of log S_T; left at NaN they are
/// estimated from the characteristic function by Richardson-extrapolated
/// central differences of log phi at u = 0. The truncation interval is
/// [c1 - W, c1 + W] with W = trunc_width * sqrt(c2 + sqrt(c4)); the
/// fourth-cumulant widening keeps the interval honest for jump models,
/// whose tails a two-cumulant rule badly underestimates.
struct CosConfig {
    std::size_t n_terms = 512;  ///< initial number of cosine terms (>= 32)
    double trunc_width = 12.0;  ///< interval half-width multiplier L
    double c1 = std::numeric_limits<double>::quiet_NaN();
    double c2 = std::numeric_limits<double>::quiet_NaN();
    std::size_t max_terms = 1u << 15;  ///< doubling cap for the stability check
};

/// Characteristic function of log S_T under the 3/2-plus-jumps model:
/// the l = 0 slice of the joint transform, E[e^{iu log S_T}].
cplx char_fn(double u, double T, double x0, double v0,
             const ThreeHalvesParams& p32, const JumpParams& jp,
             const MarketEnv& env, const SeriesControl& ctl = {},
             bool allow_strict_local = false);

/// COS-method European option prices for a batch of strikes sharing one
/// maturity. The cosine grid (and hence every characteristic-function
/// evaluation) is shared across strikes; per-strike work is trigonometric
/// assembly only. n_terms is doubled until no price moves by more than
/// 1e-7 * s0, erroring out if max_terms cannot achieve that.
std::vector<double> cos_price(const std::vector<double>& strikes,
                              OptionKind kind, double T, const MarketEnv& env,
                              const ThreeHalvesParams& p32,
                              const JumpParams& jp, const CosConfig& cfg = {},
                              bool allow_strict_local = false);

/// Black-Scholes price (vol = 0 degenerates to discounted intrinsic).
double black_scholes_price(double s0, double strike, double T, double r,
                           double vol, OptionKind kind);

/// Implied Black-Scholes vol by safeguarded Newton/bisection to 1e-12.
/// Throws DomainError when the price sits outside arbitrage bounds.
double bs_implied_vol(double price, double s0, double strike, double T,
                      double r, OptionKind kind);

/// Fair variance-swap strike (1/T) E[RV_T] in variance units:
/// (g_32(v0, T) + lambda T (mu^2 + sigma^2)) / T, since E[xi^2] = mu^2+sigma^2.
double variance_swap_strike(double T, const ThreeHalvesParams& p32,
                            const JumpParams& jp);

}  // namespace vol32

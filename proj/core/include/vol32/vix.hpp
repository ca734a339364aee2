#pragma once

#include <vector>

#include "vol32/models.hpp"

namespace vol32 {

/// VIX contract convention: horizon tau (30/365 by default) and quoting
/// scale (100 = annualized vol points).
struct VIXSpec {
    double tau = 30.0 / 365.0;
    double scale = 100.0;
};

/// Parameters of the V_T | V_0 transition law of the 3/2 process, read off
/// the reciprocal CIR process X = 1/V: w = X_T * growth / c_T follows a
/// noncentral chi-squared law with `delta` degrees of freedom and
/// noncentrality `noncentrality`, where growth = e^{kappa theta T}.
struct InverseCIRDensity {
    double delta;          ///< 4(kappa + epsilon^2)/epsilon^2, > 4
    double c_T;            ///< epsilon^2 (e^{kappa theta T} - 1)/(4 kappa theta)
    double noncentrality;  ///< 1/(v0 c_T)
    double growth;         ///< e^{kappa theta T}
};

/// A VIX option quote: forward level, strike, maturity, Black vol.
struct VIXQuote {
    double maturity;
    double strike;
    double price;        ///< discounted price
    double implied_vol;  ///< Black vol zeta from the undiscounted price
};

InverseCIRDensity inverse_cir_density(double v0, double T,
                                      const ThreeHalvesParams& p32);

/// VIX^2 in quoted points^2 given the instantaneous variance:
/// (g_32(v_t, tau)/tau + 2 lambda (mu_bar - mu)) * scale^2.
double vix_squared(double v_t, const VIXSpec& spec,
                   const ThreeHalvesParams& p32, const JumpParams& jp);

/// Same for the square-root model, with the affine g = a v_t + b.
double vix_squared_svj(double v_t, const VIXSpec& spec, const SVJParams& sp);

/// Transition density of V_T | V_0 = v0 for the 3/2 process, in 1/variance:
/// f(y) = (1/y^2) (growth/c_T) p(delta, noncentrality, growth/(y c_T)).
double transition_density_32(double v0, double T, double y,
                             const ThreeHalvesParams& p32);

/// Batch pricing of the full VIX chain at one maturity: the forward
/// E[VIX_T] and undiscounted calls/puts per strike. Prices are stored
/// undiscounted (the Black implied-vol convention); apply e^{-rT} for
/// present values. Puts are calls via parity.
struct VixChain {
    double forward;  ///< E[VIX_T] in VIX points
    std::vector<double> strikes;
    std::vector<double> calls;  ///< undiscounted E[(VIX_T - K)^+]
    std::vector<double> puts;   ///< undiscounted E[(K - VIX_T)^+]
};

VixChain vix_chain(const ThreeHalvesParams& p32, const JumpParams& jp,
                   const VIXSpec& spec, double T,
                   const std::vector<double>& strikes,
                   bool allow_strict_local = false);

VixChain vix_chain_svj(const SVJParams& sp, const VIXSpec& spec, double T,
                       const std::vector<double>& strikes);

/// Futures / single-option wrappers. `discounted` applies e^{-rT} (the
/// printed-formula convention); pass false for the market quoting form.
double vix_future(const ThreeHalvesParams& p32, const JumpParams& jp,
                  const MarketEnv& env, const VIXSpec& spec, double T,
                  bool discounted = true, bool allow_strict_local = false);
double vix_call(const ThreeHalvesParams& p32, const JumpParams& jp,
                const MarketEnv& env, const VIXSpec& spec, double T, double K,
                bool discounted = true, bool allow_strict_local = false);
double vix_put(const ThreeHalvesParams& p32, const JumpParams& jp,
               const MarketEnv& env, const VIXSpec& spec, double T, double K,
               bool discounted = true, bool allow_strict_local = false);
/// Direct quadrature of the put payoff (not via parity); exists so parity
/// can be *tested* as a quadrature-consistency property.
double vix_put_direct(const ThreeHalvesParams& p32, const JumpParams& jp,
                      const MarketEnv& env, const VIXSpec& spec, double T,
                      double K, bool discounted = true,
                      bool allow_strict_local = false);

double vix_future_svj(const SVJParams& sp, const MarketEnv& env,
                      const VIXSpec& spec, double T, bool discounted = true);
double vix_call_svj(const SVJParams& sp, const MarketEnv& env,
                    const VIXSpec& spec, double T, double K,
                    bool discounted = true);
double vix_put_svj(const SVJParams& sp, const MarketEnv& env,
                   const VIXSpec& spec, double T, double K,
                   bool discounted = true);
double vix_put_svj_direct(const SVJParams& sp, const MarketEnv& env,
                          const VIXSpec& spec, double T, double K,
                          bool discounted = true);

/// Undiscounted Black call on a forward: F N(d1) - K N(d2) with
/// d1 = (log(F/K) + zeta^2 T / 2)/(zeta sqrt(T)).
double black_call(double forward, double strike, double T, double zeta);

/// Invert black_call for zeta by safeguarded Newton/bisection to 1e-12.
/// `price` is the undiscounted option price E[(VIX_T - K)^+].
double black_implied_vol(double price, double forward, double strike,
                         double T);

}  // namespace vol32

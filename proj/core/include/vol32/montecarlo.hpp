#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "vol32/models.hpp"

namespace vol32 {

struct MCConfig {
    std::size_t n_paths = 100000;
    std::size_t n_steps = 250;  ///< recorded time steps per year (>= 50)
    std::uint64_t seed = 1;
    bool antithetic = true;
    /// Grid refinement inside each step; the simulation runs on the fine
    /// grid of n_steps * sub_steps points per year.
    std::size_t sub_steps = 8;
    std::size_t threads = 0;  ///< 0 = resolve via VOL32_THREADS / hardware
    /// Store per-path Brownian functionals (w1_T, w_T) for statistical
    /// tests of the correlation structure. Costs one extra normal per path.
    bool diagnostics = false;
};

struct MCEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

/// Terminal state of one simulated path: log index, integrated variance,
/// summed squared jump sizes, terminal instantaneous variance.
struct PathState {
    double x_T;
    double int_v;
    double sum_xi2;
    double v_T;
};

struct SimResult {
    std::vector<PathState> paths;
    bool antithetic_pairs = false;  ///< adjacent paths form antithetic pairs
    double horizon = 0.0;
    /// Richardson half-step check on the trapezoidal Int V: the mean shift
    /// (fine - coarse)/3 that was applied, its standard error, and whether
    /// the shift exceeded 0.2 standard errors of E[Int V] (a step-resolution
    /// warning, not an error).
    double int_v_correction = 0.0;
    double int_v_correction_se = 0.0;
    bool step_warning = false;
    /// Filled only in diagnostics mode.
    std::vector<double> w1_T;  ///< variance-driving Brownian at T (recovered)
    std::vector<double> w_T;   ///< index-driving Brownian at T
};

/// Exact transition sample of the CIR process
///   dX = a (b - X) dt + vol sqrt(X) dW
/// over a step dt, via the scaled noncentral chi-squared law. Strictly
/// positive when 4ab/vol^2 > 2 (always true for the 3/2 reciprocal).
double sample_cir_transition(double x0, double dt, double a, double b,
                             double vol, std::mt19937_64& rng);

/// Simulate terminal path bundles of the 3/2-plus-jumps model.
///
/// X = 1/V is stepped with exact CIR transitions on the fine grid, Int V
/// is trapezoidal with Richardson extrapolation from a half-resolution
/// check, and the variance-leg stochastic integral uses the pathwise
/// identity (an exact consequence of the X dynamics)
///   Int sqrt(V) dW1 = [(kappa + eps^2/2) Int V - kappa theta T
///                      - log(X_T/X_0)] / eps,
/// so no Brownian increments need to be recovered for the price drift.
/// The independent leg is drawn exactly as sqrt(Int V) * Z. Jumps are
/// Poisson(lambda T) with N(mu, sigma^2) sizes.
///
/// Paths are generated in fixed-size blocks with RNG streams keyed on
/// (seed, block index): results are bitwise reproducible and independent
/// of the thread count. Antithetic pairs flip every normal draw and reuse
/// the gamma and Poisson draws.
SimResult simulate_32j(const ThreeHalvesParams& p32, const JumpParams& jp,
                       const MarketEnv& env, double T, const MCConfig& cfg,
                       bool allow_strict_local = false);

/// Mean and standard error of payoff over the simulated paths. For
/// antithetic results the standard error is computed on pair averages.
MCEstimate mc_price(const SimResult& sim,
                    const std::function<double(const PathState&)>& payoff);

}  // namespace vol32

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vol32/models.hpp"

namespace vol32 {

/// One implied-vol observation. Equity quotes are Black-Scholes vols on the
/// index; vix quotes are Black vols on the VIX future.
struct Quote {
    double maturity;
    double strike;
    OptionKind kind;
    UnderlyingKind underlying;
    double implied_vol;
    double weight = 1.0;
};

struct QuoteSet {
    std::vector<Quote> quotes;
    MarketEnv env;
};

/// Parse a quote CSV with header exactly
///   maturity_yrs,strike,kind,underlying,implied_vol,weight
/// (kind call|put, underlying equity|vix).
QuoteSet load_quotes_csv(const std::string& path, const MarketEnv& env);
void save_quotes_csv(const std::string& path, const QuoteSet& qs,
                     const std::string& header_comment = {});

enum class CalibrationMethod { nelder_mead, lm };

/// Box bounds for the fitted parameters (positivity built in). The single
/// short maturity of a typical smile identifies kappa and theta poorly;
/// the deliberately wide defaults are documented rather than hidden.
struct CalibrationBounds {
    double kappa_lo = 0.1, kappa_hi = 100.0;
    double theta_lo = 1e-4, theta_hi = 1.0;
    double epsilon_lo = 1e-2, epsilon_hi = 200.0;
    double rho_lo = -0.999, rho_hi = 0.999;
    double v0_lo = 1e-4, v0_hi = 1.0;
    double lambda_lo = 1e-6, lambda_hi = 10.0;
    double mu_bar_lo = -0.9, mu_bar_hi = 2.0;
    double sigma_lo = 1e-4, sigma_hi = 3.0;
};

/// `nelder_mead` (the default) runs the simplex search from the initial
/// point plus jittered restarts and, once the simplex has collapsed,
/// finishes with a Levenberg-Marquardt polish from the best point: the
/// kappa-theta trade-off leaves a long curved valley in the objective and
/// the raw simplex stalls on its floor. `lm` is the plain least-squares
/// iteration from the single start, for when the initial point is already
/// trusted.
struct CalibrationConfig {
    CalibrationMethod method = CalibrationMethod::nelder_mead;
    bool jumps = true;        ///< fit (lambda, mu_bar, sigma) as well
    std::size_t max_iter = 0; ///< 0 = method default (2000 NM, 200 LM)
    std::size_t restarts = 3; ///< Nelder-Mead random restarts
    std::uint64_t seed = 42;  ///< seeds the restart perturbations
    CalibrationBounds bounds;
};

struct CalibrationResult {
    ThreeHalvesParams params;
    JumpParams jumps;
    double rmse = 0.0;           ///< weighted vol-point RMSE
    std::size_t iterations = 0;
    bool converged = false;
    /// model_vol - market_vol per quote, NaN where pricing failed
    std::vector<double> per_quote_residuals;
    std::size_t failed_quotes = 0;
};

/// Weighted implied-vol RMSE of the model against the quotes:
/// sqrt(sum w_i (model_vol_i - market_vol_i)^2 / sum w_i). Quotes whose
/// pricing fails are excluded (flagged via residuals = NaN if requested).
double objective(const ThreeHalvesParams& p32, const JumpParams& jp,
                 const QuoteSet& qs,
                 std::vector<double>* residuals = nullptr,
                 std::size_t* failures = nullptr);

/// Local least-squares fit starting from `init`. Positive parameters are
/// optimized in log space and rho through atanh; box bounds are enforced
/// by clamping plus penalty, and the martingale condition by penalty plus
/// a final hard check. Deterministic given (quotes, init, config).
CalibrationResult calibrate(const QuoteSet& qs, const ThreeHalvesParams& init,
                            const JumpParams& init_jumps,
                            const CalibrationConfig& cfg = {});

}  // namespace vol32

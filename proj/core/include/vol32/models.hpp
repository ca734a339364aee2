#pragma once

#include <string>

namespace vol32 {

/// Diffusion parameters of the 3/2 variance process
///   dV = kappa V (theta - V) dt + epsilon V^{3/2} dW.
/// Note the non-standard roles: kappa*theta is the mean-reversion *rate*
/// and kappa scales with the variance level itself.
struct ThreeHalvesParams {
    double kappa;    ///< mean-reversion scale, > 0
    double theta;    ///< long-run variance level, > 0
    double epsilon;  ///< vol-of-vol, > 0
    double rho;      ///< spot-variance correlation, in [-1, 1]
    double v0;       ///< initial instantaneous variance, > 0
};

/// Compound-Poisson jumps in the log index: sizes xi ~ N(mu, sigma^2),
/// intensity lambda. mu_bar = E[e^xi - 1] is kept alongside mu and the
/// identity mu = log(1 + mu_bar) - sigma^2/2 is enforced on construction.
struct JumpParams {
    double lambda = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double mu_bar = 0.0;
};

/// Square-root (Heston) variance process plus the same jump structure:
///   dV = kappa_t (theta_t - V) dt + epsilon_t sqrt(V) dW.
struct SVJParams {
    double kappa_t;
    double theta_t;
    double epsilon_t;
    double rho;
    double v0;
    JumpParams jumps;
};

struct MarketEnv {
    double r = 0.0;   ///< continuously compounded risk-free rate
    double s0 = 1.0;  ///< spot index level, > 0
};

enum class OptionKind { call, put };
enum class UnderlyingKind { equity, vix, variance_swap };

struct OptionSpec {
    double strike;
    double maturity;
    OptionKind kind;
    UnderlyingKind underlying;
};

/// Throws DomainError when a field is outside its domain.
void validate(const ThreeHalvesParams& p);
void validate(const JumpParams& jp);
void validate(const SVJParams& sp);
void validate(const MarketEnv& env);

/// True iff the discounted index is a true martingale:
///   kappa - epsilon*rho >= -epsilon^2/2.
bool check_martingale(const ThreeHalvesParams& p);

/// Pricing gate: throws MartingaleError unless check_martingale passes or
/// `allow_strict_local` explicitly waives the requirement (research use).
void require_martingale(const ThreeHalvesParams& p,
                        bool allow_strict_local = false);

/// Fill the missing member of {mu, mu_bar} from mu = log(1+mu_bar) - sigma^2/2.
JumpParams complete_jump_params_from_mu(double lambda, double sigma, double mu);
JumpParams complete_jump_params_from_mu_bar(double lambda, double sigma,
                                            double mu_bar);

/// Raw contents of a parameter file. Which optional keys were present is
/// recorded so the jump identity can be completed or cross-checked.
struct ParamFileData {
    ThreeHalvesParams diffusion{};  // kappa/theta/epsilon/rho/v0 as written
    double lambda = 0.0;
    double mu = 0.0;
    double mu_bar = 0.0;
    double sigma = 0.0;
    bool has_mu = false;
    bool has_mu_bar = false;
    MarketEnv env{};
};

/// Parse a flat key=value parameter file. Recognized keys are exactly
/// kappa, theta, epsilon, rho, v0, lambda, mu, mu_bar, sigma, r, s0;
/// '#' starts a comment. Unknown keys and malformed lines are errors.
/// kappa, theta, epsilon, rho, v0 are required; the rest default to
/// lambda=0, sigma=0, r=0, s0=1.
ParamFileData load_param_file(const std::string& path);

void save_param_file(const std::string& path, const ThreeHalvesParams& p,
                     const JumpParams& jp, const MarketEnv& env,
                     const std::string& header_comment = {});

/// Resolve the jump parameters recorded in a file: completes whichever of
/// mu / mu_bar is missing and errors if both are present but inconsistent.
JumpParams resolve_jumps(const ParamFileData& data);

/// Reinterpret the same five diffusion fields as Heston/SVJ parameters
/// (the file format is shared; the model flag decides the reading).
SVJParams as_svj(const ParamFileData& data);

}  // namespace vol32

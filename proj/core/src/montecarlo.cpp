#include "vol32/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "vol32/errors.hpp"
#include "vol32/threading.hpp"

namespace vol32 {

namespace {

constexpr std::size_t kBlockPairs = 2048;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
    return splitmix64(seed ^ splitmix64(block + 1));
}

void validate_config(const MCConfig& cfg) {
    if (cfg.n_paths < 100) throw DomainError("MCConfig: n_paths must be >= 100");
    if (cfg.n_steps < 50)
        throw DomainError("MCConfig: n_steps must be >= 50 per year");
    if (cfg.sub_steps < 1) throw DomainError("MCConfig: sub_steps must be >= 1");
}

}  // namespace

double sample_cir_transition(double x0, double dt, double a, double b,
                             double vol, std::mt19937_64& rng) {
    if (!(x0 >= 0.0)) throw DomainError("sample_cir_transition: x0 must be >= 0");
    if (!(dt > 0.0)) throw DomainError("sample_cir_transition: dt must be > 0");
    if (!(a > 0.0) || !(b > 0.0) || !(vol > 0.0))
        throw DomainError("sample_cir_transition: a, b, vol must be > 0");

    const double ead = std::exp(-a * dt);
    const double cbar = 2.0 * a / (vol * vol * -std::expm1(-a * dt));
    const double delta = 4.0 * a * b / (vol * vol);
    const double lambda_nc = 2.0 * cbar * x0 * ead;

    double q;
    if (delta > 1.0) {
        std::normal_distribution<double> normal;
        std::gamma_distribution<double> gamma(0.5 * (delta - 1.0), 2.0);
        const double s = normal(rng) + std::sqrt(lambda_nc);
        q = s * s + gamma(rng);
    } else {
        // low degrees of freedom: Poisson mixture of central chi-squareds
        long mix = 0;
        if (lambda_nc > 0.0) {
            std::poisson_distribution<long> pois(0.5 * lambda_nc);
            mix = pois(rng);
        }
        std::gamma_distribution<double> gamma(
            0.5 * delta + static_cast<double>(mix), 2.0);
        q = gamma(rng);
    }
    return q / (2.0 * cbar);
}

SimResult simulate_32j(const ThreeHalvesParams& p32, const JumpParams& jp,
                       const MarketEnv& env, double T, const MCConfig& cfg,
                       bool allow_strict_local) {
    require_martingale(p32, allow_strict_local);
    validate(jp);
    validate(env);
    validate_config(cfg);
    if (!(T > 0.0)) throw DomainError("simulate_32j: T must be > 0");

    // fine grid: even number of steps so the half-resolution check can use
    // every second node
    std::size_t m = static_cast<std::size_t>(
        std::ceil(static_cast<double>(cfg.n_steps * cfg.sub_steps) * T));
    if (m < 2) m = 2;
    if (m % 2 == 1) ++m;
    const double dt = T / static_cast<double>(m);

    // reciprocal process X = 1/V: dX = (kappa + eps^2 - kappa theta X) dt
    //                                  - eps sqrt(X) dW1
    const double eps = p32.epsilon;
    const double e2 = eps * eps;
    const double a = p32.kappa * p32.theta;           // mean-reversion rate
    const double delta = 4.0 * (p32.kappa + e2) / e2; // > 4 always
    const double ead = std::exp(-a * dt);
    const double cbar = 2.0 * a / (e2 * -std::expm1(-a * dt));
    const double inv2c = 1.0 / (2.0 * cbar);
    const double x_init = 1.0 / p32.v0;
    const double rho = p32.rho;
    const double rho_perp = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const double drift = (env.r - jp.lambda * jp.mu_bar) * T;
    const double x0_log = std::log(env.s0);
    const double i1_coef = (p32.kappa + 0.5 * e2) / eps;

    const std::size_t n_pairs = cfg.antithetic
                                    ? (cfg.n_paths + 1) / 2
                                    : cfg.n_paths;
    const std::size_t paths_out = cfg.antithetic ? 2 * n_pairs : n_pairs;
    const std::size_t n_blocks = (n_pairs + kBlockPairs - 1) / kBlockPairs;

    SimResult sim;
    sim.paths.resize(paths_out);
    sim.antithetic_pairs = cfg.antithetic;
    sim.horizon = T;
    if (cfg.diagnostics) {
        sim.w1_T.resize(paths_out);
        sim.w_T.resize(paths_out);
    }
    std::vector<double> block_corr_sum(n_blocks, 0.0);   // sum of (fine-coarse)/3
    std::vector<double> block_corr_sum2(n_blocks, 0.0);

    auto run_block = [&](std::size_t blk) {
        std::mt19937_64 rng(block_seed(cfg.seed, blk));
        std::normal_distribution<double> normal;
        std::gamma_distribution<double> gamma(0.5 * (delta - 1.0), 2.0);
        // mean must be positive to construct; only drawn from when lambda > 0
        std::poisson_distribution<long> pois(jp.lambda > 0.0 ? jp.lambda * T
                                                             : 1.0);

        const std::size_t pair_first = blk * kBlockPairs;
        const std::size_t pair_last = std::min(n_pairs, pair_first + kBlockPairs);
        const std::size_t legs = cfg.antithetic ? 2 : 1;

        for (std::size_t pair = pair_first; pair < pair_last; ++pair) {
            double x[2] = {x_init, x_init};
            double intv_f[2] = {0.0, 0.0};   // fine trapezoid of V = 1/X
            double intv_c[2] = {0.0, 0.0};   // half-resolution trapezoid
            double v_even[2] = {1.0 / x_init, 1.0 / x_init};
            double w1[2] = {0.0, 0.0};
            double sqv_int[2] = {0.0, 0.0};

            for (std::size_t k = 0; k < m; ++k) {
                const double z = normal(rng);
                const double g = gamma(rng);
                for (std::size_t leg = 0; leg < legs; ++leg) {
                    const double zl = (leg == 0) ? z : -z;
                    const double lam = 2.0 * cbar * x[leg] * ead;
                    const double s = zl + std::sqrt(lam);
                    const double xn = (s * s + g) * inv2c;
                    const double v = 1.0 / x[leg];
                    const double vn = 1.0 / xn;
                    intv_f[leg] += 0.5 * dt * (v + vn);
                    if (k % 2 == 1) {  // coarse node reached (step 2*dt)
                        intv_c[leg] += dt * (v_even[leg] + vn);
                        v_even[leg] = vn;
                    }
                    if (cfg.diagnostics) {
                        w1[leg] += ((p32.kappa + e2 - a * x[leg]) * dt -
                                    (xn - x[leg])) /
                                   (eps * std::sqrt(x[leg]));
                        sqv_int[leg] +=
                            0.5 * dt * (std::sqrt(v) + std::sqrt(vn));
                    }
                    x[leg] = xn;
                }
            }

            const double z_w2 = normal(rng);
            double z_diag = 0.0;
            if (cfg.diagnostics) z_diag = normal(rng);

            long n_jumps = 0;
            double jump_sum[2] = {0.0, 0.0};
            double jump_sq[2] = {0.0, 0.0};
            if (jp.lambda > 0.0) {
                n_jumps = pois(rng);
                for (long j = 0; j < n_jumps; ++j) {
                    const double zj = normal(rng);
                    for (std::size_t leg = 0; leg < legs; ++leg) {
                        const double xi =
                            jp.mu + jp.sigma * ((leg == 0) ? zj : -zj);
                        jump_sum[leg] += xi;
                        jump_sq[leg] += xi * xi;
                    }
                }
            }

            for (std::size_t leg = 0; leg < legs; ++leg) {
                const double corr = (intv_f[leg] - intv_c[leg]) / 3.0;
                const double intv = intv_f[leg] + corr;  // Richardson
                block_corr_sum[blk] += corr;
                block_corr_sum2[blk] += corr * corr;

                const double i1 =
                    i1_coef * intv - (a * T + std::log(x[leg] / x_init)) / eps;
                const double zl = (leg == 0) ? z_w2 : -z_w2;
                const double i2 = std::sqrt(intv) * zl;
                const double x_t = x0_log + drift - 0.5 * intv + rho * i1 +
                                   rho_perp * i2 + jump_sum[leg];

                const std::size_t idx = legs * pair + leg;
                sim.paths[idx] =
                    PathState{x_t, intv, jump_sq[leg], 1.0 / x[leg]};
                if (cfg.diagnostics) {
                    // draw W2_T jointly with its integral against sqrt(V):
                    // Cov(I2, W2_T) = Int sqrt(V) ds, Var(W2_T) = T
                    const double beta = sqv_int[leg] / intv;
                    const double resid = std::sqrt(std::max(
                        0.0, T - sqv_int[leg] * sqv_int[leg] / intv));
                    const double zd = (leg == 0) ? z_diag : -z_diag;
                    const double w2 = beta * i2 + resid * zd;
                    sim.w1_T[idx] = w1[leg];
                    sim.w_T[idx] = rho * w1[leg] + rho_perp * w2;
                }
            }
        }
    };

    parallel_for_blocks(n_blocks, resolve_threads(cfg.threads), run_block);

    // Richardson half-step diagnostics: was the grid fine enough that the
    // applied correction is buried in the Monte Carlo noise of E[Int V]?
    double corr_sum = 0.0, corr_sum2 = 0.0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        corr_sum += block_corr_sum[b];
        corr_sum2 += block_corr_sum2[b];
    }
    const double n = static_cast<double>(paths_out);
    sim.int_v_correction = corr_sum / n;
    const double corr_var =
        std::max(0.0, corr_sum2 / n - sim.int_v_correction * sim.int_v_correction);
    sim.int_v_correction_se = std::sqrt(corr_var / n);

    double iv_sum = 0.0, iv_sum2 = 0.0;
    for (const auto& p : sim.paths) {
        iv_sum += p.int_v;
        iv_sum2 += p.int_v * p.int_v;
    }
    const double iv_mean = iv_sum / n;
    const double iv_se =
        std::sqrt(std::max(0.0, iv_sum2 / n - iv_mean * iv_mean) / n);
    sim.step_warning = std::abs(sim.int_v_correction) > 0.2 * iv_se;
    return sim;
}

MCEstimate mc_price(const SimResult& sim,
                    const std::function<double(const PathState&)>& payoff) {
    if (sim.paths.empty()) throw DomainError("mc_price: no paths");
    const std::size_t stride = sim.antithetic_pairs ? 2 : 1;
    const std::size_t n_units = sim.paths.size() / stride;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t u = 0; u < n_units; ++u) {
        double v = payoff(sim.paths[stride * u]);
        if (stride == 2) v = 0.5 * (v + payoff(sim.paths[stride * u + 1]));
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(n_units);
    MCEstimate est;
    est.value = sum / n;
    est.std_error =
        std::sqrt(std::max(0.0, sum2 / n - est.value * est.value) / n);
    est.n_paths = sim.paths.size();
    return est;
}

}  // namespace vol32

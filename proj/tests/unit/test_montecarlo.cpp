#include <cmath>
#include <cstring>
#include <doctest.h>
#include <random>
#include <vector>

#include "vol32/errors.hpp"
#include "vol32/models.hpp"
#include "vol32/montecarlo.hpp"
#include "vol32/transforms.hpp"

using namespace vol32;

namespace {

const ThreeHalvesParams kP32{30.84, 0.01, 50.56, -0.57, 0.00675684};
const ThreeHalvesParams kDrimus{22.84, 0.4669 * 0.4669, 8.56, -0.99,
                                0.2450 * 0.2450};
const MarketEnv kEnv{0.01, 1370.0};

JumpParams test_jumps() { return complete_jump_params_from_mu(0.18, 0.39, -0.30); }

MCConfig base_config() {
    MCConfig cfg;
    cfg.n_paths = 40000;
    cfg.seed = 11;
    cfg.diagnostics = true;
    return cfg;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

bool same_paths(const SimResult& a, const SimResult& b) {
    if (a.paths.size() != b.paths.size()) return false;
    return std::memcmp(a.paths.data(), b.paths.data(),
                       a.paths.size() * sizeof(PathState)) == 0;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("configuration limits are enforced") {
    const JumpParams jj = test_jumps();
    MCConfig cfg;
    cfg.n_paths = 50;
    CHECK_THROWS_AS(simulate_32j(kP32, jj, kEnv, 0.25, cfg), DomainError);
    cfg = MCConfig{};
    cfg.n_steps = 10;
    CHECK_THROWS_AS(simulate_32j(kP32, jj, kEnv, 0.25, cfg), DomainError);
    cfg = MCConfig{};
    cfg.sub_steps = 0;
    CHECK_THROWS_AS(simulate_32j(kP32, jj, kEnv, 0.25, cfg), DomainError);
    CHECK_THROWS_AS(simulate_32j(kP32, jj, kEnv, -1.0, MCConfig{}),
                    DomainError);
}

TEST_CASE("CIR transition sampler: support and exact moments") {
    // reciprocal-variance parameterization of the test diffusion
    const double a = kDrimus.kappa * kDrimus.theta;
    const double e2 = kDrimus.epsilon * kDrimus.epsilon;
    const double b = (kDrimus.kappa + e2) / a;
    const double x0 = 1.0 / kDrimus.v0, dt = 0.1;

    std::mt19937_64 rng(99);
    const std::size_t n = 200000;
    std::vector<double> draws(n);
    for (double& d : draws) {
        d = sample_cir_transition(x0, dt, a, b, kDrimus.epsilon, rng);
        CHECK(d > 0.0);
    }
    const double m = mean(draws);
    double var = 0.0;
    for (double d : draws) var += (d - m) * (d - m);
    var /= static_cast<double>(n - 1);

    const double decay = std::exp(-a * dt);
    const double want_mean = x0 * decay + b * (1.0 - decay);
    const double want_var = x0 * (e2 / a) * (decay - decay * decay) +
                            b * (e2 / (2.0 * a)) * (1.0 - decay) *
                                (1.0 - decay);
    const double se_mean = std::sqrt(var / static_cast<double>(n));
    CHECK(std::abs(m - want_mean) < 3.0 * se_mean);
    // SE of the sample variance ~ var * sqrt(2/n + kurtosis slack)
    CHECK(std::abs(var - want_var) < 5.0 * want_var * std::sqrt(2.0 / n));

    CHECK_THROWS_AS(sample_cir_transition(-1.0, dt, a, b, 1.0, rng),
                    DomainError);
    CHECK_THROWS_AS(sample_cir_transition(x0, 0.0, a, b, 1.0, rng),
                    DomainError);
}

TEST_CASE("simulation statistics against the analytic transforms") {
    const JumpParams jj = test_jumps();
    const double T = 0.25;
    MCConfig cfg = base_config();
    const SimResult sim = simulate_32j(kP32, jj, kEnv, T, cfg);

    REQUIRE(sim.paths.size() == cfg.n_paths);
    CHECK(sim.horizon == T);
    CHECK(sim.antithetic_pairs);
    CHECK_FALSE(sim.step_warning);
    for (const PathState& p : sim.paths) {
        CHECK(p.v_T > 0.0);
        CHECK(p.int_v > 0.0);
        CHECK(std::isfinite(p.x_T));
        CHECK(p.sum_xi2 >= 0.0);
    }

    // discounted index is a martingale
    const MCEstimate idx = mc_price(sim, [&](const PathState& p) {
        return std::exp(p.x_T - kEnv.r * T);
    });
    CHECK(std::abs(idx.value - kEnv.s0) < 3.0 * idx.std_error);
    CHECK(idx.n_paths == cfg.n_paths);

    // integrated variance mean matches the transform derivative
    const MCEstimate iv =
        mc_price(sim, [](const PathState& p) { return p.int_v; });
    CHECK(std::abs(iv.value - g_32(kP32.v0, T, kP32)) < 3.0 * iv.std_error);

    // summed squared jumps: E = lambda T (mu^2 + sigma^2)
    const MCEstimate j2 =
        mc_price(sim, [](const PathState& p) { return p.sum_xi2; });
    const double want_j2 =
        jj.lambda * T * (jj.mu * jj.mu + jj.sigma * jj.sigma);
    CHECK(std::abs(j2.value - want_j2) < 3.0 * j2.std_error);

    // terminal reciprocal variance has the square-root-process mean
    const double a = kP32.kappa * kP32.theta;
    const double b = (kP32.kappa + kP32.epsilon * kP32.epsilon) / a;
    const double want_x =
        std::exp(-a * T) / kP32.v0 + b * (-std::expm1(-a * T));
    const MCEstimate xr =
        mc_price(sim, [](const PathState& p) { return 1.0 / p.v_T; });
    CHECK(std::abs(xr.value - want_x) < 3.0 * xr.std_error);
}

TEST_CASE("Brownian diagnostics: correlation and scaling") {
    const double T = 0.5;
    MCConfig cfg = base_config();
    cfg.n_paths = 30000;
    const SimResult sim = simulate_32j(kDrimus, JumpParams{}, kEnv, T, cfg);
    REQUIRE(sim.w1_T.size() == cfg.n_paths);
    REQUIRE(sim.w_T.size() == cfg.n_paths);

    const double m1 = mean(sim.w1_T), mw = mean(sim.w_T);
    double v1 = 0.0, vw = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < sim.w1_T.size(); ++i) {
        v1 += (sim.w1_T[i] - m1) * (sim.w1_T[i] - m1);
        vw += (sim.w_T[i] - mw) * (sim.w_T[i] - mw);
        cov += (sim.w1_T[i] - m1) * (sim.w_T[i] - mw);
    }
    const double n = static_cast<double>(sim.w1_T.size());
    v1 /= n - 1;
    vw /= n - 1;
    cov /= n - 1;
    // Var W_T = T for both drivers, corr = rho
    CHECK(v1 == doctest::Approx(T).epsilon(0.05));
    CHECK(vw == doctest::Approx(T).epsilon(0.05));
    CHECK(cov / std::sqrt(v1 * vw) ==
          doctest::Approx(kDrimus.rho).epsilon(0.02));
}

TEST_CASE("fixed seed reproduces bitwise, independent of thread count") {
    const JumpParams jj = test_jumps();
    MCConfig cfg = base_config();
    cfg.n_paths = 12000;  // several RNG blocks, so threading actually splits
    const SimResult a = simulate_32j(kP32, jj, kEnv, 0.25, cfg);
    const SimResult b = simulate_32j(kP32, jj, kEnv, 0.25, cfg);
    CHECK(same_paths(a, b));

    MCConfig threaded = cfg;
    threaded.threads = 3;
    const SimResult c = simulate_32j(kP32, jj, kEnv, 0.25, threaded);
    CHECK(same_paths(a, c));

    MCConfig other = cfg;
    other.seed = 12;
    const SimResult d = simulate_32j(kP32, jj, kEnv, 0.25, other);
    CHECK_FALSE(same_paths(a, d));
}

TEST_CASE("antithetic pairing: flag off disables it, pairs anticorrelate") {
    MCConfig cfg = base_config();
    cfg.n_paths = 20000;
    const SimResult sim = simulate_32j(kDrimus, JumpParams{}, kEnv, 0.25, cfg);
    CHECK(sim.antithetic_pairs);

    // the log-index of pair members moves oppositely
    double cov = 0.0, va = 0.0, vb = 0.0, ma = 0.0, mb = 0.0;
    const std::size_t pairs = sim.paths.size() / 2;
    for (std::size_t i = 0; i < pairs; ++i) {
        ma += sim.paths[2 * i].x_T;
        mb += sim.paths[2 * i + 1].x_T;
    }
    ma /= static_cast<double>(pairs);
    mb /= static_cast<double>(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
        const double da = sim.paths[2 * i].x_T - ma;
        const double db = sim.paths[2 * i + 1].x_T - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    CHECK(cov / std::sqrt(va * vb) < -0.5);

    MCConfig plain = cfg;
    plain.antithetic = false;
    const SimResult ind = simulate_32j(kDrimus, JumpParams{}, kEnv, 0.25,
                                       plain);
    CHECK_FALSE(ind.antithetic_pairs);
}

TEST_CASE("no jump intensity means no jump contributions") {
    MCConfig cfg = base_config();
    cfg.n_paths = 2000;
    const SimResult sim = simulate_32j(kDrimus, JumpParams{}, kEnv, 0.25, cfg);
    for (const PathState& p : sim.paths) CHECK(p.sum_xi2 == 0.0);
}

TEST_CASE("estimator basics") {
    MCConfig cfg = base_config();
    cfg.n_paths = 1000;
    const SimResult sim = simulate_32j(kDrimus, JumpParams{}, kEnv, 0.1, cfg);
    const MCEstimate c =
        mc_price(sim, [](const PathState&) { return 2.5; });
    CHECK(c.value == 2.5);
    CHECK(c.std_error == 0.0);
    const SimResult empty;
    CHECK_THROWS_AS(
        mc_price(empty, [](const PathState&) { return 0.0; }),
        DomainError);
}

}  // TEST_SUITE

#include <cmath>
#include <complex>
#include <doctest.h>
#include <numbers>
#include <vector>

#include "vol32/equity.hpp"
#include "vol32/errors.hpp"
#include "vol32/models.hpp"
#include "vol32/quadrature.hpp"
#include "vol32/transforms.hpp"

using namespace vol32;

namespace {

// Fourier-space pricing along the Im(z) = -1/2 contour:
//   C = s0 - sqrt(F K) e^{-rT}/pi *
//       Int_0^inf Re[e^{iu kbar} phi(u - i/2)] / (u^2 + 1/4) du,
// kbar = log(F/K), phi the characteristic function of log(S_T/F).
// (The at-the-money r = 0 reduction is F erf(vol sqrt(T) / (2 sqrt 2)),
// which pins the constant.) A completely different discretization from
// the cosine expansion, so the two agreeing pins both.
double contour_call(const std::function<cplx(cplx)>& phi_centered, double s0,
                    double strike, double T, double r) {
    const double fwd = s0 * std::exp(r * T);
    const double kbar = std::log(fwd / strike);
    auto integrand = [&](double u) {
        const cplx z(u, -0.5);
        const cplx val = std::exp(cplx(0.0, u * kbar)) * phi_centered(z);
        return val.real() / (u * u + 0.25);
    };
    QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-12;
    spec.max_subdivisions = 500;
    const double tail = integrate_semi_infinite(integrand, 0.0, spec).value;
    return s0 - std::sqrt(fwd * strike) * std::exp(-r * T) /
                    std::numbers::pi * tail;
}

const ThreeHalvesParams kFig3{30.84, 0.2304, 70.56, -0.55, 0.0361};
const ThreeHalvesParams kFig4{30.84, 0.01, 50.56, -0.57, 0.00675684};
const MarketEnv kEnv{0.01, 1370.0};

JumpParams fig4_jumps() {
    return complete_jump_params_from_mu(0.18, 0.39, -0.30);
}

}  // namespace

TEST_SUITE("equity") {

TEST_CASE("characteristic function normalization and symmetry") {
    const JumpParams jj = fig4_jumps();
    const double x0 = std::log(kEnv.s0);
    CHECK(std::abs(char_fn(0.0, 0.25, x0, kFig4.v0, kFig4, jj, kEnv) - 1.0) <
          1e-14);
    for (double u : {0.5, 3.0, 17.0, 60.0}) {
        const cplx plus = char_fn(u, 0.25, x0, kFig4.v0, kFig4, jj, kEnv);
        const cplx minus = char_fn(-u, 0.25, x0, kFig4.v0, kFig4, jj, kEnv);
        CHECK(std::abs(minus - std::conj(plus)) < 1e-13);
        CHECK(std::abs(plus) <= 1.0 + 1e-12);
    }
}

TEST_CASE("contour pricer reproduces Black-Scholes") {
    // validates the independent pricing path before it is used as a witness
    const double s0 = 100.0, r = 0.03, T = 0.7, vol = 0.25;
    auto phi = [&](cplx z) {
        // log(S_T/F) = -vol^2 T/2 + vol sqrt(T) Z
        const double a = 0.5 * vol * vol * T;
        return std::exp(-a * (z * z + cplx(0.0, 1.0) * z));
    };
    for (double k : {80.0, 100.0, 125.0}) {
        const double ref = black_scholes_price(s0, k, T, r, vol,
                                               OptionKind::call);
        CHECK(contour_call(phi, s0, k, T, r) ==
              doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("cosine expansion agrees with the contour integral") {
    const JumpParams jj = fig4_jumps();
    const JumpParams none{};
    struct Case {
        const ThreeHalvesParams* p;
        const JumpParams* j;
        double T;
    } cases[] = {{&kFig4, &jj, 9.0 / 365.0},
                 {&kFig4, &jj, 0.25},
                 {&kFig3, &none, 9.0 / 365.0}};
    for (const auto& c : cases) {
        const double x0 = std::log(kEnv.s0);
        const double logf = x0 + kEnv.r * c.T;
        auto phi = [&](cplx z) {
            return fl_transform_32j(z, cplx(0.0), x0, c.p->v0, 0.0, c.T,
                                    *c.p, *c.j, kEnv) *
                   std::exp(-cplx(0.0, 1.0) * z * logf);
        };
        const std::vector<double> strikes{0.9 * kEnv.s0, kEnv.s0,
                                          1.1 * kEnv.s0};
        const std::vector<double> cos_prices =
            cos_price(strikes, OptionKind::call, c.T, kEnv, *c.p, *c.j);
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            const double ref =
                contour_call(phi, kEnv.s0, strikes[i], c.T, kEnv.r);
            CHECK(std::abs(cos_prices[i] - ref) < 1e-6 * kEnv.s0);
        }
    }
}

TEST_CASE("put-call parity") {
    const JumpParams jj = fig4_jumps();
    for (double T : {9.0 / 365.0, 0.5}) {
        std::vector<double> strikes;
        for (double m = 0.8; m <= 1.2001; m += 0.1)
            strikes.push_back(m * kEnv.s0);
        const auto calls =
            cos_price(strikes, OptionKind::call, T, kEnv, kFig4, jj);
        const auto puts =
            cos_price(strikes, OptionKind::put, T, kEnv, kFig4, jj);
        const double df = std::exp(-kEnv.r * T);
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            const double rhs = kEnv.s0 - strikes[i] * df;
            CHECK(std::abs(calls[i] - puts[i] - rhs) < 1e-8 * kEnv.s0);
        }
    }
}

TEST_CASE("call prices are decreasing and convex in strike") {
    const JumpParams jj = fig4_jumps();
    std::vector<double> strikes;
    for (double m = 0.70; m <= 1.3001; m += 0.02)
        strikes.push_back(m * kEnv.s0);
    const auto calls =
        cos_price(strikes, OptionKind::call, 0.25, kEnv, kFig4, jj);
    for (std::size_t i = 1; i < calls.size(); ++i)
        CHECK(calls[i] < calls[i - 1] + 1e-10);
    // smallest true butterfly on this grid is ~5e-3; 1e-7*s0 absorbs any
    // per-strike truncation wiggle without masking a real violation
    for (std::size_t i = 1; i + 1 < calls.size(); ++i)
        CHECK(calls[i + 1] - 2.0 * calls[i] + calls[i - 1] >
              -1e-7 * kEnv.s0);
}

TEST_CASE("Black-Scholes degenerate and reference values") {
    // vol = 0 collapses to discounted intrinsic value
    CHECK(black_scholes_price(100.0, 90.0, 1.0, 0.05, 0.0, OptionKind::call) ==
          doctest::Approx(100.0 - 90.0 * std::exp(-0.05)).epsilon(1e-14));
    CHECK(black_scholes_price(100.0, 120.0, 1.0, 0.05, 0.0,
                              OptionKind::call) == 0.0);
    CHECK(black_scholes_price(100.0, 120.0, 1.0, 0.05, 0.0, OptionKind::put) ==
          doctest::Approx(120.0 * std::exp(-0.05) - 100.0).epsilon(1e-14));
    // ATM r=0 closed form: s0 * erf(vol sqrt(T) / (2 sqrt(2)))
    const double v = 0.2, T = 1.0;
    CHECK(black_scholes_price(100.0, 100.0, T, 0.0, v, OptionKind::call) ==
          doctest::Approx(100.0 * std::erf(v * std::sqrt(T) /
                                           (2.0 * std::numbers::sqrt2)))
              .epsilon(1e-13));
}

TEST_CASE("implied volatility round trip and bounds") {
    for (double vol : {0.05, 0.2, 0.8}) {
        // the low-vol grid stays near the money: at |d| ~ 10 the extrinsic
        // value is below double precision and the vol is unrecoverable
        const std::vector<double> ks = vol < 0.1
                                           ? std::vector<double>{92.0, 100.0,
                                                                 108.0}
                                           : std::vector<double>{70.0, 100.0,
                                                                 140.0};
        for (double k : ks)
            for (OptionKind kind : {OptionKind::call, OptionKind::put}) {
                const double p =
                    black_scholes_price(100.0, k, 0.5, 0.02, vol, kind);
                CHECK(bs_implied_vol(p, 100.0, k, 0.5, 0.02, kind) ==
                      doctest::Approx(vol).epsilon(1e-9));
            }
    }
    // outside no-arbitrage bounds
    CHECK_THROWS_AS(bs_implied_vol(101.0, 100.0, 90.0, 0.5, 0.02,
                                   OptionKind::call),
                    DomainError);
    CHECK_THROWS_AS(bs_implied_vol(5.0, 100.0, 90.0, 0.5, 0.02,
                                   OptionKind::call),
                    DomainError);  // below intrinsic
    CHECK_THROWS_AS(bs_implied_vol(-1.0, 100.0, 110.0, 0.5, 0.02,
                                   OptionKind::put),
                    DomainError);
}

TEST_CASE("variance swap strike: jumps add lambda E[xi^2]") {
    const JumpParams jj = fig4_jumps();
    const JumpParams none{};
    for (double T : {0.1, 0.25, 1.0}) {
        const double with = variance_swap_strike(T, kFig4, jj);
        const double without = variance_swap_strike(T, kFig4, none);
        const double add = jj.lambda * (jj.mu * jj.mu + jj.sigma * jj.sigma);
        CHECK(with - without == doctest::Approx(add).epsilon(1e-12));
        CHECK(without == doctest::Approx(g_32(kFig4.v0, T, kFig4) / T)
                             .epsilon(1e-14));
        CHECK(with > 0.0);
    }
}

TEST_CASE("cosine expansion is stable against the starting resolution") {
    const JumpParams jj = fig4_jumps();
    const std::vector<double> strikes{0.95 * kEnv.s0, 1.05 * kEnv.s0};
    CosConfig small;
    small.n_terms = 64;
    CosConfig large;
    large.n_terms = 1024;
    const auto a =
        cos_price(strikes, OptionKind::call, 0.25, kEnv, kFig4, jj, small);
    const auto b =
        cos_price(strikes, OptionKind::call, 0.25, kEnv, kFig4, jj, large);
    for (std::size_t i = 0; i < strikes.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) < 2e-7 * kEnv.s0);
}

TEST_CASE("explicit cumulant override matches the estimated ones") {
    const JumpParams jj = fig4_jumps();
    const double T = 0.25;
    const std::vector<double> strikes{kEnv.s0};
    const double kvar = variance_swap_strike(T, kFig4, jj);
    CosConfig manual;
    manual.c1 = std::log(kEnv.s0) + (kEnv.r - 0.5 * kvar) * T;
    manual.c2 = kvar * T;
    const auto a = cos_price(strikes, OptionKind::call, T, kEnv, kFig4, jj);
    const auto b =
        cos_price(strikes, OptionKind::call, T, kEnv, kFig4, jj, manual);
    CHECK(std::abs(a[0] - b[0]) < 1e-6 * kEnv.s0);
}

}  // TEST_SUITE

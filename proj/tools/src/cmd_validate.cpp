#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "commands.hpp"
#include "manifest.hpp"
#include "vol32/chebyshev.hpp"
#include "vol32/equity.hpp"
#include "vol32/errors.hpp"
#include "vol32/models.hpp"
#include "vol32/montecarlo.hpp"
#include "vol32/quadrature.hpp"
#include "vol32/special_functions.hpp"
#include "vol32/transforms.hpp"
#include "vol32/vix.hpp"

namespace vol32::cli {

namespace {

struct CheckResult {
    std::string suite, name;
    double observed = 0.0, tolerance = 0.0;
    enum class Status { pass, fail, inconclusive } status = Status::pass;
    std::string note;
};
using Status = CheckResult::Status;

// an MC check is only conclusive when the standard error is small enough to
// resolve a deviation at the tolerance scale
constexpr double kPowerFraction = 0.05;

CheckResult det_check(std::string suite, std::string name, double observed,
                      double tol, std::string note = {}) {
    CheckResult c{std::move(suite), std::move(name), observed, tol,
                  observed <= tol ? Status::pass : Status::fail,
                  std::move(note)};
    return c;
}

CheckResult mc_check(std::string suite, std::string name, double deviation,
                     double se, double scale, std::string note = {}) {
    CheckResult c;
    c.suite = std::move(suite);
    c.name = std::move(name);
    c.tolerance = 3.0;
    c.observed = std::abs(deviation) / se;
    c.note = std::move(note);
    if (se > kPowerFraction * std::max(std::abs(scale), 1e-12))
        c.status = Status::inconclusive;
    else
        c.status = c.observed <= 3.0 ? Status::pass : Status::fail;
    return c;
}

// asymptotic Kolmogorov-Smirnov p-value
double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term =
            2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

struct Fixtures {
    ParamFileData vix32, heston, eq_nojumps, eq_jumps;
};

Fixtures load_fixtures(const std::string& dir) {
    return {load_param_file(dir + "/params_32_vix.txt"),
            load_param_file(dir + "/params_heston_vix.txt"),
            load_param_file(dir + "/params_32_equity_nojumps.txt"),
            load_param_file(dir + "/params_32j_equity.txt")};
}

void transforms_suite(const Fixtures& fx, const ValidateArgs& a,
                      std::vector<CheckResult>& out) {
    // martingale identity Phi(-i, 0) = S0 e^{rT} on both bundled 3/2 sets
    for (const auto* d : {&fx.vix32, &fx.eq_jumps}) {
        const JumpParams jp = resolve_jumps(*d);
        double worst = 0.0;
        for (double T : {9.0 / 365.0, 0.25, 0.5}) {
            const double fwd = d->env.s0 * std::exp(d->env.r * T);
            const cplx phi =
                fl_transform_32j(cplx(0, -1), 0.0, std::log(d->env.s0),
                                 d->diffusion.v0, 0.0, T, d->diffusion, jp,
                                 d->env);
            worst = std::max(worst, std::abs(phi - fwd) / fwd);
        }
        out.push_back(det_check(
            "transforms",
            d == &fx.vix32 ? "martingale identity (3/2 vix set)"
                           : "martingale identity (3/2 jump set)",
            worst, 1e-8, "max rel err over T in {9/365, 0.25, 0.5}"));
    }

    // the gate must reject a strict-local-martingale parameter set
    {
        ThreeHalvesParams bad{0.2, 0.04, 1.0, 0.9, 0.04};
        bool rejected = false, overridden = false;
        try {
            fl_transform_32j(cplx(1.0, 0.0), 0.0, 0.0, bad.v0, 0.0, 0.25, bad,
                             {}, {});
        } catch (const MartingaleError&) {
            rejected = true;
        }
        try {
            fl_transform_32j(cplx(1.0, 0.0), 0.0, 0.0, bad.v0, 0.0, 0.25, bad,
                             {}, {}, {}, /*allow_strict_local=*/true);
            overridden = true;
        } catch (const Error&) {
        }
        out.push_back(det_check("transforms", "martingale gate",
                                (rejected && overridden) ? 0.0 : 1.0, 0.0,
                                "reject by default, price under override"));
    }

    // g via complex step against a central difference of the same Laplace
    // transform, on a grid of states and horizons
    {
        const ThreeHalvesParams& p = fx.vix32.diffusion;
        double worst = 0.0;
        for (double x : {0.01, 0.04, 0.09, 0.16, 0.30})
            for (double tau : {9.0 / 365.0, 0.1, 0.25, 0.5, 1.0}) {
                const double g = g_32(x, tau, p);
                const double h = 1e-4 / std::max(1.0, g);
                const double gc = (laplace_rv_32(-h, x, tau, p).real() -
                                   laplace_rv_32(h, x, tau, p).real()) /
                                  (2.0 * h);
                worst = std::max(worst, std::abs(g - gc) / std::abs(g));
            }
        out.push_back(det_check("transforms", "g two-path (3/2)", worst, 1e-6,
                                "complex step vs central difference, 5x5 grid"));
    }
    {
        const SVJParams sp = as_svj(fx.heston);
        double worst = 0.0;
        for (double x : {0.01, 0.065, 0.16})
            for (double tau : {30.0 / 365.0, 0.25, 1.0}) {
                const double g = g_svj(x, tau, sp);
                const double gt = g_svj_from_transform(x, tau, sp);
                worst = std::max(worst, std::abs(g - gt) / std::abs(g));
            }
        out.push_back(det_check("transforms", "g two-path (sqrt)", worst, 1e-8,
                                "analytic vs transform derivative"));
    }

    // MC cross-checks on the jump set
    {
        const ParamFileData& d = fx.eq_jumps;
        const JumpParams jp = resolve_jumps(d);
        MCConfig cfg;
        cfg.n_paths = a.paths;
        cfg.seed = a.seed;
        const double T = 0.25;
        SimResult sim = simulate_32j(d.diffusion, jp, d.env, T, cfg);

        const double kvar = variance_swap_strike(T, d.diffusion, jp) * T;
        MCEstimate rv = mc_price(sim, [](const PathState& s) {
            return s.int_v + s.sum_xi2;
        });
        out.push_back(mc_check("transforms", "variance swap vs MC",
                               rv.value - kvar, rv.std_error, kvar));

        const double gref = g_32(d.diffusion.v0, T, d.diffusion);
        MCEstimate iv = mc_price(sim, [](const PathState& s) {
            return s.int_v;
        });
        out.push_back(mc_check("transforms", "E[int V] vs g", iv.value - gref,
                               iv.std_error, gref));

        const double fwd = d.env.s0 * std::exp(d.env.r * T);
        MCEstimate mart = mc_price(sim, [](const PathState& s) {
            return std::exp(s.x_T);
        });
        out.push_back(mc_check("transforms", "index martingale vs MC",
                               mart.value - fwd, mart.std_error, fwd));
    }
}

void equity_suite(const Fixtures& fx, const ValidateArgs& a,
                  std::vector<CheckResult>& out) {
    const ParamFileData& d = fx.eq_jumps;
    const JumpParams jp = resolve_jumps(d);
    const double s0 = d.env.s0;
    const std::vector<double> strikes{0.9 * s0, 0.95 * s0, s0, 1.05 * s0,
                                      1.1 * s0};

    for (double T : {9.0 / 365.0, 0.5}) {
        const std::vector<double> cos =
            cos_price(strikes, OptionKind::call, T, d.env, d.diffusion, jp);
        MCConfig cfg;
        cfg.n_paths = a.paths;
        cfg.seed = a.seed + 1;
        SimResult sim = simulate_32j(d.diffusion, jp, d.env, T, cfg);
        const double disc = std::exp(-d.env.r * T);
        double worst = 0.0;
        bool underpowered = false;
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            const double K = strikes[i];
            MCEstimate est = mc_price(sim, [&](const PathState& s) {
                return disc * std::max(std::exp(s.x_T) - K, 0.0);
            });
            worst = std::max(worst, std::abs(est.value - cos[i]) / est.std_error);
            underpowered = underpowered ||
                           est.std_error > kPowerFraction * std::abs(cos[i]);
        }
        CheckResult c;
        c.suite = "equity";
        std::ostringstream nm;
        nm << "COS vs MC calls (T=" << T << ")";
        c.name = nm.str();
        c.observed = worst;
        c.tolerance = 3.0;
        c.note = "max |dev|/SE over 5 strikes";
        c.status = underpowered ? Status::inconclusive
                                : (worst <= 3.0 ? Status::pass : Status::fail);
        out.push_back(c);
    }

    // put-call parity, deterministic
    {
        const double T = 0.25;
        const std::vector<double> calls =
            cos_price(strikes, OptionKind::call, T, d.env, d.diffusion, jp);
        const std::vector<double> puts =
            cos_price(strikes, OptionKind::put, T, d.env, d.diffusion, jp);
        double worst = 0.0;
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            const double rhs = s0 - strikes[i] * std::exp(-d.env.r * T);
            worst = std::max(worst,
                             std::abs(calls[i] - puts[i] - rhs) / s0);
        }
        out.push_back(det_check("equity", "put-call parity", worst, 1e-8,
                                "|C - P - (S0 - K e^{-rT})| / S0"));
    }

    // the answer must not depend on the starting series length
    {
        const double T = 9.0 / 365.0;
        CosConfig small;
        small.n_terms = 64;
        CosConfig large;
        large.n_terms = 1024;
        const std::vector<double> p1 = cos_price(strikes, OptionKind::call, T,
                                                 d.env, d.diffusion, jp, small);
        const std::vector<double> p2 = cos_price(strikes, OptionKind::call, T,
                                                 d.env, d.diffusion, jp, large);
        double worst = 0.0;
        for (std::size_t i = 0; i < strikes.size(); ++i)
            worst = std::max(worst, std::abs(p1[i] - p2[i]) / s0);
        out.push_back(det_check("equity", "COS stability vs series length",
                                worst, 2e-7, "64-term vs 1024-term start"));
    }

    // implied-vol round trip
    {
        double worst = 0.0;
        for (double vol : {0.1, 0.2, 0.4, 0.8})
            for (double K : {0.8 * s0, s0, 1.3 * s0}) {
                const double px =
                    black_scholes_price(s0, K, 0.25, d.env.r, vol,
                                        OptionKind::call);
                const double iv =
                    bs_implied_vol(px, s0, K, 0.25, d.env.r, OptionKind::call);
                worst = std::max(worst, std::abs(iv - vol) / vol);
            }
        out.push_back(det_check("equity", "implied-vol round trip", worst,
                                1e-9));
    }
}

void vix_suite(const Fixtures& fx, const ValidateArgs& a,
               std::vector<CheckResult>& out) {
    const ParamFileData& d = fx.vix32;
    const JumpParams jp = resolve_jumps(d);
    const VIXSpec spec;
    const double T = 0.25;

    const double fwd = vix_future(d.diffusion, jp, d.env, spec, T, false);
    std::vector<double> strikes;
    for (double mny : {0.8, 0.95, 1.0, 1.1, 1.3}) strikes.push_back(mny * fwd);
    const VixChain chain = vix_chain(d.diffusion, jp, spec, T, strikes);

    MCConfig cfg;
    cfg.n_paths = a.paths;
    cfg.seed = a.seed + 2;
    SimResult sim = simulate_32j(d.diffusion, jp, d.env, T, cfg);

    // VIX_T per path through a cached g (direct g_32 per path would repeat
    // the same Kummer evaluation millions of times)
    double vmin = 1e300, vmax = 0.0;
    for (const auto& s : sim.paths) {
        vmin = std::min(vmin, s.v_T);
        vmax = std::max(vmax, s.v_T);
    }
    ChebyshevInterpolant gcache = ChebyshevInterpolant::build(
        [&](double lv) {
            return g_32(std::exp(lv), spec.tau, d.diffusion);
        },
        std::log(vmin * 0.999), std::log(vmax * 1.001), 1e-9);
    const double offset = 2.0 * jp.lambda * (jp.mu_bar - jp.mu);
    auto vix_of = [&](double v) {
        return spec.scale *
               std::sqrt(gcache(std::log(v)) / spec.tau + offset);
    };

    MCEstimate fmc = mc_price(sim, [&](const PathState& s) {
        return vix_of(s.v_T);
    });
    out.push_back(mc_check("vix", "VIX future vs MC", fmc.value - fwd,
                           fmc.std_error, fwd));

    double worst = 0.0;
    bool underpowered = false;
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const double K = strikes[i];
        MCEstimate est = mc_price(sim, [&](const PathState& s) {
            return std::max(vix_of(s.v_T) - K, 0.0);
        });
        worst = std::max(worst, std::abs(est.value - chain.calls[i]) /
                                    est.std_error);
        underpowered =
            underpowered || est.std_error > kPowerFraction * chain.calls[i];
    }
    {
        CheckResult c;
        c.suite = "vix";
        c.name = "VIX calls vs MC";
        c.observed = worst;
        c.tolerance = 3.0;
        c.note = "max |dev|/SE over 5 strikes";
        c.status = underpowered ? Status::inconclusive
                                : (worst <= 3.0 ? Status::pass : Status::fail);
        out.push_back(c);
    }

    // parity and the independent put quadrature
    {
        double wp = 0.0, wd = 0.0;
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            const double put_parity = chain.puts[i];
            const double parity_residual = chain.calls[i] - put_parity -
                                           (chain.forward - strikes[i]);
            wp = std::max(wp, std::abs(parity_residual) / fwd);
            const double put_direct =
                vix_put_direct(d.diffusion, jp, d.env, spec, T, strikes[i],
                               /*discounted=*/false);
            wd = std::max(wd, std::abs(put_parity - put_direct) / fwd);
        }
        out.push_back(det_check("vix", "put-call parity", wp, 1e-6,
                                "|C - P - (F - K)| / F"));
        out.push_back(det_check("vix", "put parity vs direct quadrature", wd,
                                1e-6));
    }

    // transition density normalizes to one
    {
        QuadratureSpec qs;
        qs.abs_tol = 1e-11;
        qs.rel_tol = 1e-11;
        const double mass =
            integrate_semi_infinite(
                [&](double y) {
                    return transition_density_32(d.diffusion.v0, T, y,
                                                 d.diffusion);
                },
                0.0, qs)
                .value;
        out.push_back(det_check("vix", "V_T density normalization",
                                std::abs(mass - 1.0), 1e-8));
    }

    // exact CIR sampling against the transition law (KS test)
    {
        const std::size_t n = a.paths;
        const InverseCIRDensity dens =
            inverse_cir_density(d.diffusion.v0, T, d.diffusion);
        const double a_cir = d.diffusion.kappa * d.diffusion.theta;
        const double b_cir =
            (d.diffusion.kappa + d.diffusion.epsilon * d.diffusion.epsilon) /
            a_cir;
        std::mt19937_64 rng(a.seed + 3);
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x =
                sample_cir_transition(1.0 / d.diffusion.v0, T, a_cir, b_cir,
                                      d.diffusion.epsilon, rng);
            w[i] = x * dens.growth / dens.c_T;
        }
        std::sort(w.begin(), w.end());
        double dstat = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double F =
                noncentral_chisq_cdf(dens.delta, dens.noncentrality, w[i]);
            const double lo = static_cast<double>(i) / n;
            const double hi = static_cast<double>(i + 1) / n;
            dstat = std::max({dstat, std::abs(F - lo), std::abs(F - hi)});
        }
        const double p = ks_pvalue(dstat, n);
        CheckResult c;
        c.suite = "vix";
        c.name = "exact CIR sampling KS test";
        c.observed = p;
        c.tolerance = 0.01;
        c.note = "p-value (pass when above tolerance)";
        c.status = n < 1000 ? Status::inconclusive
                            : (p > 0.01 ? Status::pass : Status::fail);
        out.push_back(c);
    }
}

}  // namespace

int run_validate(const ValidateArgs& a) {
    if (a.suite != "all" && a.suite != "transforms" && a.suite != "vix" &&
        a.suite != "equity")
        throw DomainError("--suite must be transforms|vix|equity|all");
    Fixtures fx = load_fixtures(a.fixtures_dir);

    std::vector<CheckResult> checks;
    if (a.suite == "all" || a.suite == "transforms")
        transforms_suite(fx, a, checks);
    if (a.suite == "all" || a.suite == "equity") equity_suite(fx, a, checks);
    if (a.suite == "all" || a.suite == "vix") vix_suite(fx, a, checks);

    std::ostringstream rep;
    rep << "validation report (suite=" << a.suite << ", paths=" << a.paths
        << ", seed=" << a.seed << ")\n";
    std::size_t pass = 0, fail = 0, inconclusive = 0;
    for (const auto& c : checks) {
        const char* st = c.status == Status::pass ? "PASS"
                         : c.status == Status::fail ? "FAIL"
                                                    : "INCONCLUSIVE";
        (c.status == Status::pass
             ? pass
             : c.status == Status::fail ? fail : inconclusive)++;
        char line[256];
        std::snprintf(line, sizeof line, "%-13s [%-10s] %-38s observed=%-12.4g tol=%-8.4g %s\n",
                      st, c.suite.c_str(), c.name.c_str(), c.observed,
                      c.tolerance, c.note.c_str());
        rep << line;
    }
    rep << pass << " passed, " << fail << " failed, " << inconclusive
        << " inconclusive\n";
    std::cout << rep.str();

    RunManifest m;
    m.command = "validate --suite " + a.suite + " --paths " +
                std::to_string(a.paths) + " --seed " + std::to_string(a.seed);
    m.input_files = {a.fixtures_dir + "/params_32_vix.txt",
                     a.fixtures_dir + "/params_heston_vix.txt",
                     a.fixtures_dir + "/params_32_equity_nojumps.txt",
                     a.fixtures_dir + "/params_32j_equity.txt"};
    m.seed = a.seed;
    std::string manifest_path = "run.manifest.json";
    if (!a.out.empty()) {
        std::ofstream f(a.out);
        if (!f) throw Error("cannot write " + a.out);
        f << rep.str();
        f.close();
        m.output_files = {a.out};
        manifest_path = a.out + ".manifest.json";
    }
    write_manifest(m, manifest_path);

    return fail == 0 ? kExitOk : kExitValidationFailed;
}

}  // namespace vol32::cli

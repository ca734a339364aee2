#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "manifest.hpp"
#include "vol32/equity.hpp"
#include "vol32/errors.hpp"
#include "vol32/models.hpp"
#include "vol32/transforms.hpp"
#include "vol32/vix.hpp"

namespace vol32::cli {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_strike_list(const std::string& arg) {
    std::vector<double> out;
    std::stringstream ss(arg);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        std::size_t pos = 0;
        double k = std::stod(cell, &pos);
        if (pos != cell.size()) throw DomainError("bad strike: " + cell);
        if (!(k > 0.0)) throw DomainError("strikes must be positive");
        out.push_back(k);
    }
    if (out.empty()) throw DomainError("empty strike list");
    return out;
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) /
                        static_cast<double>(n - 1);
    return v;
}

struct Row {
    double strike, price, implied_vol;
};

void emit(const std::vector<Row>& rows, const PriceArgs& a,
          std::uint64_t seed) {
    std::ostringstream csv;
    csv << "strike,price,implied_vol\n";
    for (const auto& r : rows)
        csv << g17(r.strike) << ',' << g17(r.price) << ','
            << g17(r.implied_vol) << "\n";

    RunManifest m;
    m.command = "price " + a.product + " --params " + a.params_file +
                " --maturity " + g17(a.maturity) + " --strikes " + a.strikes +
                " --model " + a.model + " --kind " + a.kind;
    m.input_files = {a.params_file};
    m.seed = seed;

    if (a.out.empty()) {
        std::cout << csv.str();
        write_manifest(m, "run.manifest.json");
    } else {
        std::ofstream f(a.out);
        if (!f) throw Error("cannot write " + a.out);
        f << csv.str();
        f.close();
        m.output_files = {a.out};
        write_manifest(m, a.out + ".manifest.json");
    }
}

}  // namespace

int run_price(const PriceArgs& a) {
    const ParamFileData data = load_param_file(a.params_file);
    const JumpParams jp = resolve_jumps(data);
    const MarketEnv env = data.env;
    const double T = a.maturity;
    if (!(T > 0.0)) throw DomainError("--maturity must be > 0");
    if (a.model != "32j" && a.model != "svj")
        throw DomainError("--model must be 32j or svj");
    const bool svj = a.model == "svj";
    const OptionKind kind =
        a.kind == "put" ? OptionKind::put : OptionKind::call;
    if (a.kind != "call" && a.kind != "put")
        throw DomainError("--kind must be call or put");

    std::vector<Row> rows;

    if (a.product == "equity") {
        if (svj)
            throw DomainError(
                "equity pricing is provided for the 3/2-plus-jumps model "
                "only; the square-root model is the VIX/variance baseline");
        std::vector<double> strikes =
            a.strikes == "auto"
                ? linspace(0.8 * env.s0, 1.2 * env.s0, 21)
                : parse_strike_list(a.strikes);
        const std::vector<double> prices =
            cos_price(strikes, kind, T, env, data.diffusion, jp, {},
                      a.allow_strict_local);
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            double iv;
            try {
                iv = bs_implied_vol(prices[i], env.s0, strikes[i], T, env.r,
                                    kind);
            } catch (const DomainError&) {
                iv = std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back({strikes[i], prices[i], iv});
        }
    } else if (a.product == "vix") {
        const VIXSpec spec;
        double fwd;
        std::vector<double> strikes;
        if (svj) {
            const SVJParams sp = as_svj(data);
            fwd = vix_future_svj(sp, env, spec, T, /*discounted=*/false);
            strikes = a.strikes == "auto" ? linspace(0.8 * fwd, 1.3 * fwd, 11)
                                          : parse_strike_list(a.strikes);
            VixChain chain = vix_chain_svj(sp, spec, T, strikes);
            const double disc = std::exp(-env.r * T);
            for (std::size_t i = 0; i < strikes.size(); ++i) {
                const double undisc = kind == OptionKind::call
                                          ? chain.calls[i]
                                          : chain.puts[i];
                const double call_eq =
                    kind == OptionKind::call
                        ? undisc
                        : undisc + chain.forward - strikes[i];
                rows.push_back({strikes[i], disc * undisc,
                                black_implied_vol(call_eq, chain.forward,
                                                  strikes[i], T)});
            }
        } else {
            fwd = vix_future(data.diffusion, jp, env, spec, T,
                             /*discounted=*/false, a.allow_strict_local);
            strikes = a.strikes == "auto" ? linspace(0.8 * fwd, 1.3 * fwd, 11)
                                          : parse_strike_list(a.strikes);
            VixChain chain = vix_chain(data.diffusion, jp, spec, T, strikes,
                                       a.allow_strict_local);
            const double disc = std::exp(-env.r * T);
            for (std::size_t i = 0; i < strikes.size(); ++i) {
                const double undisc = kind == OptionKind::call
                                          ? chain.calls[i]
                                          : chain.puts[i];
                const double call_eq =
                    kind == OptionKind::call
                        ? undisc
                        : undisc + chain.forward - strikes[i];
                rows.push_back({strikes[i], disc * undisc,
                                black_implied_vol(call_eq, chain.forward,
                                                  strikes[i], T)});
            }
        }
    } else if (a.product == "varswap") {
        // one row: fair strike in variance units; a swap dealt at the fair
        // strike has zero value; implied_vol column carries the vol-units
        // equivalent sqrt(K_var)
        double kvar;
        if (svj) {
            const SVJParams sp = as_svj(data);
            kvar = (g_svj(sp.v0, T, sp) +
                    jp.lambda * T * (jp.mu * jp.mu + jp.sigma * jp.sigma)) /
                   T;
        } else {
            kvar = variance_swap_strike(T, data.diffusion, jp);
        }
        rows.push_back({kvar, 0.0, std::sqrt(kvar)});
    } else {
        throw DomainError("unknown product: " + a.product +
                          " (expected equity|vix|varswap)");
    }

    emit(rows, a, 0);
    return kExitOk;
}

}  // namespace vol32::cli

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "vol32/errors.hpp"
#include "vol32/version.hpp"

#ifndef VOL32_DEFAULT_FIXTURE_DIR
#define VOL32_DEFAULT_FIXTURE_DIR "fixtures"
#endif

using namespace vol32;

int main(int argc, char** argv) {
    CLI::App app{"vol32 - consistent equity / VIX / variance-swap pricing "
                 "under a 3/2-plus-jumps stochastic volatility model"};
    app.set_version_flag("--version", VOL32_VERSION);
    app.require_subcommand(1);

    std::size_t threads = 0;
    app.add_option("--threads", threads,
                   "worker thread cap (default: VOL32_THREADS or hardware)");

    cli::PriceArgs pa;
    CLI::App* price = app.add_subcommand(
        "price", "price equity options, VIX options, or a variance swap");
    price->add_option("product", pa.product, "equity|vix|varswap")
        ->required();
    price->add_option("--params", pa.params_file, "parameter file")
        ->required();
    price->add_option("--maturity", pa.maturity, "maturity in years")
        ->required();
    price->add_option("--strikes", pa.strikes,
                      "comma-separated strikes, or 'auto'");
    price->add_option("--model", pa.model, "32j|svj (default 32j)");
    price->add_option("--kind", pa.kind, "call|put (default call)");
    price->add_option("--out", pa.out, "output CSV (default: stdout)");
    price->add_flag("--allow-strict-local", pa.allow_strict_local,
                    "waive the martingale gate (research use)");

    cli::FigureArgs fa;
    fa.fixtures_dir = VOL32_DEFAULT_FIXTURE_DIR;
    CLI::App* fig = app.add_subcommand(
        "reproduce-figure", "regenerate a bundled figure's curve data");
    fig->add_option("number", fa.number, "figure number 1-4")->required();
    fig->add_option("--fixtures", fa.fixtures_dir,
                    "directory with bundled parameter/quote files");
    fig->add_option("--out-dir", fa.out_dir, "output directory (default .)");

    cli::ValidateArgs va;
    va.fixtures_dir = VOL32_DEFAULT_FIXTURE_DIR;
    CLI::App* val = app.add_subcommand(
        "validate", "run the MC-vs-analytic cross-check suite");
    val->add_option("--suite", va.suite, "transforms|vix|equity|all");
    val->add_option("--paths", va.paths, "MC paths per check (default 200000)");
    val->add_option("--seed", va.seed, "RNG seed (default 7)");
    val->add_option("--fixtures", va.fixtures_dir,
                    "directory with bundled parameter files");
    val->add_option("--out", va.out, "write the report to a file as well");

    cli::CalibrateArgs ca;
    CLI::App* cal = app.add_subcommand(
        "calibrate", "least-squares fit of model parameters to quotes");
    cal->add_option("--quotes", ca.quotes_file, "quote CSV")->required();
    cal->add_option("--init", ca.init_file, "initial parameter file")
        ->required();
    cal->add_option("--jumps", ca.jumps, "on|off (default: from init file)");
    cal->add_option("--method", ca.method, "nm|lm (default nm)");
    cal->add_option("--max-iter", ca.max_iter,
                    "iteration cap (0 = method default)");
    cal->add_option("--seed", ca.seed, "restart seed (default 42)");
    cal->add_option("--out", ca.out, "output prefix (default 'calibration')");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitInvalidInput;
    }

    if (threads > 0) {
        // downstream code resolves worker counts through this variable
        setenv("VOL32_THREADS", std::to_string(threads).c_str(), 1);
    }

    try {
        if (price->parsed()) {
            if (pa.strikes.empty() && pa.product != "varswap")
                throw DomainError("--strikes is required for " + pa.product);
            return cli::run_price(pa);
        }
        if (fig->parsed()) return cli::run_figure(fa);
        if (val->parsed()) return cli::run_validate(va);
        if (cal->parsed()) return cli::run_calibrate(ca);
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure (series/iteration): " << e.what()
                  << "\n";
        return cli::kExitNumericalFailure;
    } catch (const ToleranceError& e) {
        std::cerr << "numerical failure (quadrature tolerance): " << e.what()
                  << "\n";
        return cli::kExitNumericalFailure;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return cli::kExitInvalidInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return cli::kExitNumericalFailure;
    }
    return cli::kExitOk;
}

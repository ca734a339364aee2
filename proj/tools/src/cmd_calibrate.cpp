#include <cmath>
#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "manifest.hpp"
#include "vol32/calibration.hpp"
#include "vol32/errors.hpp"
#include "vol32/models.hpp"

namespace vol32::cli {

int run_calibrate(const CalibrateArgs& a) {
    const ParamFileData init = load_param_file(a.init_file);
    const JumpParams init_jumps = resolve_jumps(init);
    const QuoteSet quotes = load_quotes_csv(a.quotes_file, init.env);

    CalibrationConfig cfg;
    if (a.method == "nm")
        cfg.method = CalibrationMethod::nelder_mead;
    else if (a.method == "lm")
        cfg.method = CalibrationMethod::lm;
    else
        throw DomainError("--method must be nm or lm");
    if (a.jumps == "on")
        cfg.jumps = true;
    else if (a.jumps == "off")
        cfg.jumps = false;
    else if (a.jumps == "auto")
        cfg.jumps = init_jumps.lambda > 0.0;
    else
        throw DomainError("--jumps must be on or off");
    cfg.max_iter = a.max_iter;
    cfg.seed = a.seed;

    const CalibrationResult res = calibrate(quotes, init.diffusion,
                                            init_jumps, cfg);

    const std::string params_path = a.out + "_params.txt";
    const std::string resid_path = a.out + "_residuals.csv";
    save_param_file(params_path, res.params, res.jumps, init.env,
                    "calibrated parameters\nrmse " + g17(res.rmse) +
                        ", iterations " + std::to_string(res.iterations) +
                        (res.converged ? ", converged" : ", NOT converged"));

    std::ofstream rf(resid_path);
    if (!rf) throw Error("cannot write " + resid_path);
    rf << "maturity_yrs,strike,kind,underlying,market_vol,model_vol,"
          "residual\n";
    for (std::size_t i = 0; i < quotes.quotes.size(); ++i) {
        const Quote& q = quotes.quotes[i];
        const double r = res.per_quote_residuals[i];
        rf << g17(q.maturity) << ',' << g17(q.strike) << ','
           << (q.kind == OptionKind::call ? "call" : "put") << ','
           << (q.underlying == UnderlyingKind::equity ? "equity" : "vix")
           << ',' << g17(q.implied_vol) << ',';
        if (std::isnan(r))
            rf << "failed,failed\n";
        else
            rf << g17(q.implied_vol + r) << ',' << g17(r) << "\n";
    }
    rf.close();

    std::cout << "rmse " << g17(res.rmse) << " after " << res.iterations
              << " iterations ("
              << (res.converged ? "converged" : "NOT converged") << ", "
              << res.failed_quotes << " failed quotes)\n"
              << "parameters written to " << params_path << "\n";

    RunManifest m;
    m.command = "calibrate --quotes " + a.quotes_file + " --init " +
                a.init_file + " --jumps " + (cfg.jumps ? "on" : "off") +
                " --method " + a.method;
    m.input_files = {a.quotes_file, a.init_file};
    m.output_files = {params_path, resid_path};
    m.seed = a.seed;
    write_manifest(m, a.out + ".manifest.json");

    return res.converged ? kExitOk : kExitNotConverged;
}

}  // namespace vol32::cli

#pragma once

#include <string>
#include <vector>

namespace vol32::cli {

// exit codes shared by every subcommand
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNumericalFailure = 3;
inline constexpr int kExitNotConverged = 4;

struct PriceArgs {
    std::string product;  // equity | vix | varswap
    std::string params_file;
    double maturity = 0.0;
    std::string strikes;  // "K1,K2,..." or "auto"
    std::string model = "32j";
    std::string kind = "call";
    std::string out;  // empty = stdout
    bool allow_strict_local = false;
};

struct FigureArgs {
    int number = 0;
    std::string fixtures_dir;
    std::string out_dir = ".";
};

struct ValidateArgs {
    std::string suite = "all";  // transforms | vix | equity | all
    std::size_t paths = 200000;
    std::uint64_t seed = 7;
    std::string fixtures_dir;
    std::string out;  // optional report copy
};

struct CalibrateArgs {
    std::string quotes_file;
    std::string init_file;
    std::string jumps = "auto";  // on | off | auto (init file decides)
    std::string method = "nm";   // nm | lm
    std::size_t max_iter = 0;    // 0 = method default
    std::uint64_t seed = 42;
    std::string out = "calibration";  // output prefix
};

int run_price(const PriceArgs& a);
int run_figure(const FigureArgs& a);
int run_validate(const ValidateArgs& a);
int run_calibrate(const CalibrateArgs& a);

/// Full round-trippable precision for CSV cells.
std::string g17(double v);

std::vector<double> parse_strike_list(const std::string& arg);

}  // namespace vol32::cli

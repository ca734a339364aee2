#include "vol32/models.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "vol32/errors.hpp"

namespace vol32 {

void validate(const ThreeHalvesParams& p) {
    if (!(p.kappa > 0.0)) throw DomainError("ThreeHalvesParams: kappa must be > 0");
    if (!(p.theta > 0.0)) throw DomainError("ThreeHalvesParams: theta must be > 0");
    if (!(p.epsilon > 0.0))
        throw DomainError("ThreeHalvesParams: epsilon must be > 0");
    if (!(p.rho >= -1.0 && p.rho <= 1.0))
        throw DomainError("ThreeHalvesParams: rho must be in [-1, 1]");
    if (!(p.v0 > 0.0)) throw DomainError("ThreeHalvesParams: v0 must be > 0");
}

void validate(const JumpParams& jp) {
    if (!(jp.lambda >= 0.0)) throw DomainError("JumpParams: lambda must be >= 0");
    if (!(jp.sigma >= 0.0)) throw DomainError("JumpParams: sigma must be >= 0");
    if (!(jp.mu_bar > -1.0)) throw DomainError("JumpParams: mu_bar must be > -1");
    const double mu_implied = std::log1p(jp.mu_bar) - 0.5 * jp.sigma * jp.sigma;
    if (std::abs(jp.mu - mu_implied) >
        1e-9 * std::max(1.0, std::abs(jp.mu)))
        throw DomainError(
            "JumpParams: mu and mu_bar violate mu = log(1+mu_bar) - sigma^2/2");
}

void validate(const SVJParams& sp) {
    if (!(sp.kappa_t > 0.0)) throw DomainError("SVJParams: kappa_t must be > 0");
    if (!(sp.theta_t > 0.0)) throw DomainError("SVJParams: theta_t must be > 0");
    if (!(sp.epsilon_t > 0.0))
        throw DomainError("SVJParams: epsilon_t must be > 0");
    if (!(sp.rho >= -1.0 && sp.rho <= 1.0))
        throw DomainError("SVJParams: rho must be in [-1, 1]");
    if (!(sp.v0 > 0.0)) throw DomainError("SVJParams: v0 must be > 0");
    validate(sp.jumps);
}

void validate(const MarketEnv& env) {
    if (!(env.s0 > 0.0)) throw DomainError("MarketEnv: s0 must be > 0");
    if (!std::isfinite(env.r)) throw DomainError("MarketEnv: r must be finite");
}

bool check_martingale(const ThreeHalvesParams& p) {
    return p.kappa - p.epsilon * p.rho >= -0.5 * p.epsilon * p.epsilon;
}

void require_martingale(const ThreeHalvesParams& p, bool allow_strict_local) {
    validate(p);
    if (check_martingale(p) || allow_strict_local) return;
    std::ostringstream os;
    os << "martingale condition kappa - epsilon*rho >= -epsilon^2/2 fails ("
       << p.kappa - p.epsilon * p.rho << " < " << -0.5 * p.epsilon * p.epsilon
       << "); the discounted index is a strict local martingale and "
          "risk-neutral pricing is refused (pass the override to proceed)";
    throw MartingaleError(os.str());
}

JumpParams complete_jump_params_from_mu(double lambda, double sigma, double mu) {
    if (!(lambda >= 0.0)) throw DomainError("jump params: lambda must be >= 0");
    if (!(sigma >= 0.0)) throw DomainError("jump params: sigma must be >= 0");
    JumpParams jp;
    jp.lambda = lambda;
    jp.sigma = sigma;
    jp.mu = mu;
    jp.mu_bar = std::expm1(mu + 0.5 * sigma * sigma);
    return jp;
}

JumpParams complete_jump_params_from_mu_bar(double lambda, double sigma,
                                            double mu_bar) {
    if (!(lambda >= 0.0)) throw DomainError("jump params: lambda must be >= 0");
    if (!(sigma >= 0.0)) throw DomainError("jump params: sigma must be >= 0");
    if (!(mu_bar > -1.0)) throw DomainError("jump params: mu_bar must be > -1");
    JumpParams jp;
    jp.lambda = lambda;
    jp.sigma = sigma;
    jp.mu_bar = mu_bar;
    jp.mu = std::log1p(mu_bar) - 0.5 * sigma * sigma;
    return jp;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ParamFileData load_param_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open parameter file: " + path);

    ParamFileData d;
    bool seen[5] = {false, false, false, false, false};  // kappa..v0
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string valstr = trim(line.substr(eq + 1));
        double val;
        try {
            std::size_t used = 0;
            val = std::stod(valstr, &used);
            if (used != valstr.size()) throw std::invalid_argument(valstr);
        } catch (const std::exception&) {
            throw Error(path + ":" + std::to_string(lineno) +
                        ": malformed numeric value '" + valstr + "'");
        }

        if (key == "kappa") {
            d.diffusion.kappa = val;
            seen[0] = true;
        } else if (key == "theta") {
            d.diffusion.theta = val;
            seen[1] = true;
        } else if (key == "epsilon") {
            d.diffusion.epsilon = val;
            seen[2] = true;
        } else if (key == "rho") {
            d.diffusion.rho = val;
            seen[3] = true;
        } else if (key == "v0") {
            d.diffusion.v0 = val;
            seen[4] = true;
        } else if (key == "lambda") {
            d.lambda = val;
        } else if (key == "mu") {
            d.mu = val;
            d.has_mu = true;
        } else if (key == "mu_bar") {
            d.mu_bar = val;
            d.has_mu_bar = true;
        } else if (key == "sigma") {
            d.sigma = val;
        } else if (key == "r") {
            d.env.r = val;
        } else if (key == "s0") {
            d.env.s0 = val;
        } else {
            throw Error(path + ":" + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
        }
    }
    static const char* names[5] = {"kappa", "theta", "epsilon", "rho", "v0"};
    for (int i = 0; i < 5; ++i)
        if (!seen[i])
            throw Error(path + ": missing required key '" +
                        std::string(names[i]) + "'");
    return d;
}

void save_param_file(const std::string& path, const ThreeHalvesParams& p,
                     const JumpParams& jp, const MarketEnv& env,
                     const std::string& header_comment) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write parameter file: " + path);
    out << std::setprecision(17);
    if (!header_comment.empty()) {
        std::istringstream hs(header_comment);
        std::string hl;
        while (std::getline(hs, hl)) out << "# " << hl << "\n";
    }
    out << "kappa = " << p.kappa << "\n"
        << "theta = " << p.theta << "\n"
        << "epsilon = " << p.epsilon << "\n"
        << "rho = " << p.rho << "\n"
        << "v0 = " << p.v0 << "\n"
        << "lambda = " << jp.lambda << "\n"
        << "mu = " << jp.mu << "\n"
        << "mu_bar = " << jp.mu_bar << "\n"
        << "sigma = " << jp.sigma << "\n"
        << "r = " << env.r << "\n"
        << "s0 = " << env.s0 << "\n";
    if (!out) throw Error("write failed: " + path);
}

JumpParams resolve_jumps(const ParamFileData& d) {
    if (d.has_mu && d.has_mu_bar) {
        JumpParams jp{d.lambda, d.mu, d.sigma, d.mu_bar};
        validate(jp);  // enforces the identity between mu and mu_bar
        return jp;
    }
    if (d.has_mu) return complete_jump_params_from_mu(d.lambda, d.sigma, d.mu);
    if (d.has_mu_bar)
        return complete_jump_params_from_mu_bar(d.lambda, d.sigma, d.mu_bar);
    if (d.lambda != 0.0)
        throw Error("parameter file sets lambda but neither mu nor mu_bar");
    return JumpParams{};
}

SVJParams as_svj(const ParamFileData& d) {
    SVJParams sp;
    sp.kappa_t = d.diffusion.kappa;
    sp.theta_t = d.diffusion.theta;
    sp.epsilon_t = d.diffusion.epsilon;
    sp.rho = d.diffusion.rho;
    sp.v0 = d.diffusion.v0;
    sp.jumps = resolve_jumps(d);
    return sp;
}

}  // namespace vol32

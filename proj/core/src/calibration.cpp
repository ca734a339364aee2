#include "vol32/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "vol32/equity.hpp"
#include "vol32/errors.hpp"
#include "vol32/threading.hpp"
#include "vol32/vix.hpp"

namespace vol32 {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

// std::stod alone accepts trailing garbage ("1x0" -> 1); require that the
// whole cell parses
double to_num(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size())
        throw std::invalid_argument("trailing characters in numeric field");
    return v;
}

}  // namespace

QuoteSet load_quotes_csv(const std::string& path, const MarketEnv& env) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open quote file: " + path);
    std::string line;
    std::size_t lineno = 0;
    // skip leading comment lines, then require the exact header
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || trim(line)[0] == '#') continue;
        break;
    }
    if (trim(line) != "maturity_yrs,strike,kind,underlying,implied_vol,weight")
        throw Error(path + ": expected header "
                    "'maturity_yrs,strike,kind,underlying,implied_vol,weight'");

    QuoteSet qs;
    qs.env = env;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto cells = split_csv_line(t);
        if (cells.size() != 6)
            throw Error(path + ":" + std::to_string(lineno) +
                        ": expected 6 columns");
        Quote q;
        try {
            q.maturity = to_num(cells[0]);
            q.strike = to_num(cells[1]);
            q.implied_vol = to_num(cells[4]);
            q.weight = to_num(cells[5]);
        } catch (const std::exception&) {
            throw Error(path + ":" + std::to_string(lineno) +
                        ": malformed numeric field");
        }
        if (cells[2] == "call")
            q.kind = OptionKind::call;
        else if (cells[2] == "put")
            q.kind = OptionKind::put;
        else
            throw Error(path + ":" + std::to_string(lineno) +
                        ": kind must be call|put");
        if (cells[3] == "equity")
            q.underlying = UnderlyingKind::equity;
        else if (cells[3] == "vix")
            q.underlying = UnderlyingKind::vix;
        else
            throw Error(path + ":" + std::to_string(lineno) +
                        ": underlying must be equity|vix");
        if (!(q.maturity > 0.0) || !(q.strike > 0.0) || !(q.implied_vol > 0.0) ||
            !(q.weight >= 0.0))
            throw Error(path + ":" + std::to_string(lineno) +
                        ": quote fields out of domain");
        qs.quotes.push_back(q);
    }
    if (qs.quotes.empty()) throw Error(path + ": no quotes");
    bool any_weight = false;
    for (const auto& q : qs.quotes) any_weight |= q.weight > 0.0;
    if (!any_weight) throw Error(path + ": all weights are zero");
    return qs;
}

void save_quotes_csv(const std::string& path, const QuoteSet& qs,
                     const std::string& header_comment) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write quote file: " + path);
    out.precision(17);
    if (!header_comment.empty()) {
        std::istringstream hs(header_comment);
        std::string hl;
        while (std::getline(hs, hl)) out << "# " << hl << "\n";
    }
    out << "maturity_yrs,strike,kind,underlying,implied_vol,weight\n";
    for (const auto& q : qs.quotes) {
        out << q.maturity << ',' << q.strike << ','
            << (q.kind == OptionKind::call ? "call" : "put") << ','
            << (q.underlying == UnderlyingKind::equity ? "equity" : "vix")
            << ',' << q.implied_vol << ',' << q.weight << "\n";
    }
    if (!out) throw Error("write failed: " + path);
}

namespace {

// Model implied vols for every quote; NaN where pricing or inversion failed.
std::vector<double> model_vols(const ThreeHalvesParams& p32,
                               const JumpParams& jp, const QuoteSet& qs) {
    std::vector<double> vols(qs.quotes.size(), kNaN);

    // batch equity quotes by (maturity, kind) so each group shares one COS
    // grid, and vix quotes by maturity so each group shares one chain
    std::map<std::pair<double, int>, std::vector<std::size_t>> equity_groups;
    std::map<double, std::vector<std::size_t>> vix_groups;
    for (std::size_t i = 0; i < qs.quotes.size(); ++i) {
        const Quote& q = qs.quotes[i];
        if (q.underlying == UnderlyingKind::equity)
            equity_groups[{q.maturity, q.kind == OptionKind::call ? 0 : 1}]
                .push_back(i);
        else if (q.underlying == UnderlyingKind::vix)
            vix_groups[q.maturity].push_back(i);
    }

    // groups touch disjoint slots of `vols`, so they can price concurrently
    std::vector<std::function<void()>> tasks;
    for (const auto& [key, idx_ref] : equity_groups) {
        tasks.push_back([&, T = key.first, kind_i = key.second,
                         idx = &idx_ref] {
            const OptionKind kind =
                kind_i == 0 ? OptionKind::call : OptionKind::put;
            std::vector<double> strikes(idx->size());
            for (std::size_t j = 0; j < idx->size(); ++j)
                strikes[j] = qs.quotes[(*idx)[j]].strike;
            std::vector<double> prices;
            try {
                prices = cos_price(strikes, kind, T, qs.env, p32, jp);
            } catch (const Error&) {
                return;  // whole group failed; vols stay NaN
            }
            for (std::size_t j = 0; j < idx->size(); ++j) {
                try {
                    vols[(*idx)[j]] = bs_implied_vol(
                        prices[j], qs.env.s0, strikes[j], T, qs.env.r, kind);
                } catch (const Error&) {
                }
            }
        });
    }
    const VIXSpec vspec;
    for (const auto& [T_ref, idx_ref] : vix_groups) {
        tasks.push_back([&, T = T_ref, idx = &idx_ref] {
            std::vector<double> strikes(idx->size());
            for (std::size_t j = 0; j < idx->size(); ++j)
                strikes[j] = qs.quotes[(*idx)[j]].strike;
            VixChain chain;
            try {
                chain = vix_chain(p32, jp, vspec, T, strikes);
            } catch (const Error&) {
                return;
            }
            for (std::size_t j = 0; j < idx->size(); ++j) {
                const Quote& q = qs.quotes[(*idx)[j]];
                // Black vols are quoted off the undiscounted call; a put
                // quote maps to the parity-equivalent call first
                const double call =
                    q.kind == OptionKind::call
                        ? chain.calls[j]
                        : chain.puts[j] + chain.forward - q.strike;
                try {
                    vols[(*idx)[j]] =
                        black_implied_vol(call, chain.forward, q.strike, T);
                } catch (const Error&) {
                }
            }
        });
    }
    parallel_for_blocks(tasks.size(), resolve_threads(0),
                        [&](std::size_t b) { tasks[b](); });
    return vols;
}

}  // namespace

double objective(const ThreeHalvesParams& p32, const JumpParams& jp,
                 const QuoteSet& qs, std::vector<double>* residuals,
                 std::size_t* failures) {
    if (qs.quotes.empty()) throw DomainError("objective: no quotes");
    const std::vector<double> vols = model_vols(p32, jp, qs);
    double wsum = 0.0, acc = 0.0;
    std::size_t failed = 0;
    if (residuals) residuals->assign(qs.quotes.size(), kNaN);
    for (std::size_t i = 0; i < qs.quotes.size(); ++i) {
        if (std::isnan(vols[i])) {
            ++failed;
            continue;
        }
        const double res = vols[i] - qs.quotes[i].implied_vol;
        if (residuals) (*residuals)[i] = res;
        acc += qs.quotes[i].weight * res * res;
        wsum += qs.quotes[i].weight;
    }
    if (failures) *failures = failed;
    if (wsum <= 0.0)
        throw Error("objective: every quote failed to price under these "
                    "parameters");
    return std::sqrt(acc / wsum);
}

namespace {

// Map between physical parameters and the unconstrained optimization
// coordinates: log for the positive ones, atanh for rho, log(1 + mu_bar)
// for the jump mean. Out-of-bound proposals are clamped to the box and the
// clamping distance is returned as a penalty.
struct Codec {
    bool jumps;
    CalibrationBounds b;

    std::size_t dim() const { return jumps ? 8 : 5; }

    std::vector<double> pack(const ThreeHalvesParams& p,
                             const JumpParams& jp) const {
        std::vector<double> t{std::log(p.kappa), std::log(p.theta),
                              std::log(p.epsilon),
                              std::atanh(std::clamp(p.rho, -0.9989, 0.9989)),
                              std::log(p.v0)};
        if (jumps) {
            t.push_back(std::log(std::max(jp.lambda, b.lambda_lo)));
            t.push_back(std::log1p(std::max(jp.mu_bar, b.mu_bar_lo)));
            t.push_back(std::log(std::max(jp.sigma, b.sigma_lo)));
        }
        return t;
    }

    double clamp_log(double raw, double lo, double hi, double& pen) const {
        const double c = std::clamp(raw, lo, hi);
        if (c != raw) {
            const double d = std::log(raw / c);
            pen += d * d;
        }
        return c;
    }

    double unpack(const std::vector<double>& t, ThreeHalvesParams& p,
                  JumpParams& jp) const {
        double pen = 0.0;
        p.kappa = clamp_log(std::exp(t[0]), b.kappa_lo, b.kappa_hi, pen);
        p.theta = clamp_log(std::exp(t[1]), b.theta_lo, b.theta_hi, pen);
        p.epsilon = clamp_log(std::exp(t[2]), b.epsilon_lo, b.epsilon_hi, pen);
        const double rho_raw = std::tanh(t[3]);
        p.rho = std::clamp(rho_raw, b.rho_lo, b.rho_hi);
        pen += (rho_raw - p.rho) * (rho_raw - p.rho);
        p.v0 = clamp_log(std::exp(t[4]), b.v0_lo, b.v0_hi, pen);
        if (jumps) {
            const double lam =
                clamp_log(std::exp(t[5]), b.lambda_lo, b.lambda_hi, pen);
            double mb_raw = std::expm1(t[6]);
            const double mb = std::clamp(mb_raw, b.mu_bar_lo, b.mu_bar_hi);
            pen += (mb_raw - mb) * (mb_raw - mb);
            const double sg =
                clamp_log(std::exp(t[7]), b.sigma_lo, b.sigma_hi, pen);
            jp = complete_jump_params_from_mu_bar(lam, sg, mb);
        } else {
            jp = JumpParams{};
        }
        return pen;
    }
};

struct OptProblem {
    const QuoteSet& qs;
    Codec codec;

    // scalar objective: vol RMSE + box and martingale penalties + a bump
    // per failed quote so the optimizer backs away from degenerate regions
    double value(const std::vector<double>& t) const {
        ThreeHalvesParams p;
        JumpParams jp;
        const double pen = codec.unpack(t, p, jp);
        const double defect =
            p.kappa - p.epsilon * p.rho + 0.5 * p.epsilon * p.epsilon;
        if (defect < 0.0) return 1.0 - defect + 10.0 * pen;
        double rmse;
        std::size_t failed = 0;
        try {
            rmse = objective(p, jp, qs, nullptr, &failed);
        } catch (const Error&) {
            return 1e3 + 10.0 * pen;
        }
        return rmse + 10.0 * pen +
               static_cast<double>(failed) / qs.quotes.size();
    }

    // residual vector for least squares; sentinel residual for failures
    std::vector<double> residuals(const std::vector<double>& t) const {
        ThreeHalvesParams p;
        JumpParams jp;
        const double pen = codec.unpack(t, p, jp);
        const double defect =
            p.kappa - p.epsilon * p.rho + 0.5 * p.epsilon * p.epsilon;
        std::vector<double> r(qs.quotes.size() + 1, 0.5);
        double wsum = 0.0;
        for (const auto& q : qs.quotes) wsum += q.weight;
        if (defect >= 0.0) {
            std::vector<double> vols = model_vols(p, jp, qs);
            for (std::size_t i = 0; i < qs.quotes.size(); ++i)
                if (!std::isnan(vols[i]))
                    r[i] = std::sqrt(qs.quotes[i].weight / wsum) *
                           (vols[i] - qs.quotes[i].implied_vol);
        }
        r.back() = std::sqrt(10.0 * pen +
                             (defect < 0.0 ? 1.0 - defect : 0.0));
        return r;
    }
};

double sum_sq(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

// Solve A x = b in place, partial pivoting; returns false if singular.
bool solve_linear(std::vector<std::vector<double>>& A, std::vector<double>& b) {
    const std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
        if (std::abs(A[piv][col]) < 1e-300) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = A[row][col] / A[col][col];
            for (std::size_t k = col; k < n; ++k) A[row][k] -= f * A[col][k];
            b[row] -= f * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * b[k];
        b[i] = s / A[i][i];
    }
    return true;
}

struct OptOutcome {
    std::vector<double> t;
    double f;
    std::size_t iterations;
    bool converged;
};

OptOutcome nelder_mead(const OptProblem& prob, std::vector<double> t0,
                       std::size_t max_iter) {
    const std::size_t d = t0.size();
    std::vector<std::vector<double>> xs(d + 1, t0);
    for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += 0.15;
    std::vector<double> fs(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fs[i] = prob.value(xs[i]);

    std::size_t it = 0;
    bool converged = false;
    for (; it < max_iter; ++it) {
        // order: best first
        std::vector<std::size_t> ord(d + 1);
        for (std::size_t i = 0; i <= d; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = ord[0], worst = ord[d], second = ord[d - 1];
        if (fs[worst] - fs[best] < 1e-10 * (1.0 + std::abs(fs[best]))) {
            converged = true;
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < d; ++k) centroid[k] += xs[i][k];
        }
        for (double& c : centroid) c /= static_cast<double>(d);

        auto blend = [&](double coef) {
            std::vector<double> x(d);
            for (std::size_t k = 0; k < d; ++k)
                x[k] = centroid[k] + coef * (xs[worst][k] - centroid[k]);
            return x;
        };

        const std::vector<double> xr = blend(-1.0);
        const double fr = prob.value(xr);
        if (fr < fs[best]) {
            const std::vector<double> xe = blend(-2.0);
            const double fe = prob.value(xe);
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            const std::vector<double> xc = blend(fr < fs[worst] ? -0.5 : 0.5);
            const double fc = prob.value(xc);
            if (fc < std::min(fr, fs[worst])) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {  // shrink toward best
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < d; ++k)
                        xs[i][k] = xs[best][k] + 0.5 * (xs[i][k] - xs[best][k]);
                    fs[i] = prob.value(xs[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= d; ++i)
        if (fs[i] < fs[best]) best = i;
    return {xs[best], fs[best], it, converged};
}

OptOutcome levenberg_marquardt(const OptProblem& prob, std::vector<double> t,
                               std::size_t max_iter) {
    const std::size_t d = t.size();
    std::vector<double> r = prob.residuals(t);
    double f = sum_sq(r);
    double lambda = 1e-3;
    std::size_t it = 0;
    bool converged = false;

    for (; it < max_iter; ++it) {
        // finite-difference Jacobian
        const std::size_t m = r.size();
        std::vector<std::vector<double>> J(m, std::vector<double>(d));
        for (std::size_t j = 0; j < d; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(t[j]));
            std::vector<double> tp = t;
            tp[j] += h;
            const std::vector<double> rp = prob.residuals(tp);
            for (std::size_t i = 0; i < m; ++i) J[i][j] = (rp[i] - r[i]) / h;
        }
        std::vector<std::vector<double>> JtJ(d, std::vector<double>(d, 0.0));
        std::vector<double> Jtr(d, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t a = 0; a < d; ++a) {
                Jtr[a] += J[i][a] * r[i];
                for (std::size_t c = a; c < d; ++c)
                    JtJ[a][c] += J[i][a] * J[i][c];
            }
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t c = 0; c < a; ++c) JtJ[a][c] = JtJ[c][a];

        bool stepped = false;
        double step_norm = 0.0;
        for (int inner = 0; inner < 12; ++inner) {
            std::vector<std::vector<double>> A = JtJ;
            std::vector<double> rhs(d);
            for (std::size_t a = 0; a < d; ++a) {
                A[a][a] += lambda * (JtJ[a][a] + 1e-12);
                rhs[a] = -Jtr[a];
            }
            if (!solve_linear(A, rhs)) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> tn = t;
            step_norm = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                tn[a] += rhs[a];
                step_norm = std::max(step_norm, std::abs(rhs[a]));
            }
            const std::vector<double> rn = prob.residuals(tn);
            const double fn = sum_sq(rn);
            if (fn < f) {
                t = tn;
                r = rn;
                const double improvement = f - fn;
                f = fn;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (step_norm < 1e-9 || improvement < 1e-16 + 1e-12 * f)
                    converged = true;
                break;
            }
            lambda *= 5.0;
        }
        if (!stepped) {
            converged = step_norm < 1e-6 || f < 1e-18;
            break;
        }
        if (converged) break;
    }
    return {t, f, it, converged};
}

}  // namespace

CalibrationResult calibrate(const QuoteSet& qs, const ThreeHalvesParams& init,
                            const JumpParams& init_jumps,
                            const CalibrationConfig& cfg) {
    validate(init);
    validate(init_jumps);
    if (qs.quotes.empty()) throw DomainError("calibrate: no quotes");

    Codec codec{cfg.jumps, cfg.bounds};
    OptProblem prob{qs, codec};
    const std::vector<double> t0 = codec.pack(init, init_jumps);

    OptOutcome best{};
    bool have = false;
    if (cfg.method == CalibrationMethod::nelder_mead) {
        const std::size_t iters = cfg.max_iter ? cfg.max_iter : 2000;
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> jitter(0.0, 0.25);
        for (std::size_t rs = 0; rs < std::max<std::size_t>(1, cfg.restarts);
             ++rs) {
            std::vector<double> ts = t0;
            if (rs > 0)
                for (double& c : ts) c += jitter(rng);
            OptOutcome out = nelder_mead(prob, ts, iters);
            if (!have || out.f < best.f) {
                best = out;
                have = true;
            }
        }
        // The simplex collapses along the kappa-theta valley floor well
        // short of the minimum; a least-squares polish from the collapsed
        // point costs a handful of iterations and lands on the actual
        // minimizer. A budget-starved simplex keeps its best-so-far and
        // stays flagged unconverged.
        if (best.converged) {
            const std::size_t polish_iters = cfg.max_iter ? cfg.max_iter : 200;
            OptOutcome polish =
                levenberg_marquardt(prob, best.t, polish_iters);
            polish.iterations += best.iterations;
            best = polish;  // only improving steps are accepted, f <= best.f
        }
    } else {
        const std::size_t iters = cfg.max_iter ? cfg.max_iter : 200;
        best = levenberg_marquardt(prob, t0, iters);
        have = true;
    }

    CalibrationResult result;
    double pen = codec.unpack(best.t, result.params, result.jumps);
    (void)pen;
    validate(result.params);
    require_martingale(result.params);  // final hard check
    result.rmse = objective(result.params, result.jumps, qs,
                            &result.per_quote_residuals, &result.failed_quotes);
    result.iterations = best.iterations;
    result.converged = best.converged;
    return result;
}

}  // namespace vol32

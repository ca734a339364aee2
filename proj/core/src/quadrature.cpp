#include "vol32/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vol32/errors.hpp"

namespace vol32 {

namespace {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15).
// Abscissae are the positive half; Gauss nodes sit at the odd indices and
// the centre.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Segment {
    double lo, hi;
    double value;
    double error;
};

Segment gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    const double fc = f(centre);
    double resg = kWg[3] * fc;
    double resk = kWgk[7] * fc;
    double resabs = kWgk[7] * std::abs(fc);

    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        fv1[j] = f(centre - dx);
        fv2[j] = f(centre + dx);
        const double fsum = fv1[j] + fv2[j];
        resk += kWgk[j] * fsum;
        resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    }

    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc +=
            kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    const double value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / eps50)
        err = std::max(eps50 * resabs, err);
    // a non-finite sample poisons resasc with inf - inf; keep the error
    // comparable so the adaptor keeps splitting this segment
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    return {lo, hi, value, err};
}

QuadratureResult adapt(const std::function<double(double)>& f,
                       std::vector<Segment> segs, const QuadratureSpec& spec,
                       std::size_t evals) {
    if (spec.abs_tol <= 0.0 && spec.rel_tol <= 0.0)
        throw DomainError("integrate: need a positive tolerance");

    auto total = [&segs] {
        double v = 0.0, e = 0.0;
        for (const auto& s : segs) {
            v += s.value;
            e += s.error;
        }
        return std::pair<double, double>(v, e);
    };

    // an infinite estimate must not satisfy the relative test (inf <= inf)
    auto converged = [&spec](double value, double error) {
        return std::isfinite(value) &&
               error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
    };

    for (std::size_t iter = 0; iter < spec.max_subdivisions; ++iter) {
        auto [value, error] = total();
        if (converged(value, error)) return {value, error, evals};

        auto worst = std::max_element(
            segs.begin(), segs.end(),
            [](const Segment& a, const Segment& b) { return a.error < b.error; });
        const double mid = 0.5 * (worst->lo + worst->hi);
        if (mid <= worst->lo || mid >= worst->hi) break;  // interval exhausted
        const Segment left = gk15(f, worst->lo, mid);
        const Segment right = gk15(f, mid, worst->hi);
        evals += 30;
        *worst = left;
        segs.push_back(right);
    }

    auto [value, error] = total();
    if (converged(value, error)) return {value, error, evals};
    throw ToleranceError("integrate: tolerance not met after max subdivisions",
                         value, error);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, const QuadratureSpec& spec) {
    if (!(lo < hi)) throw DomainError("integrate: need lo < hi");
    std::vector<Segment> segs{gk15(f, lo, hi)};
    return adapt(f, std::move(segs), spec, 15);
}

QuadratureResult integrate_segmented(const std::function<double(double)>& f,
                                     const std::vector<double>& points,
                                     const QuadratureSpec& spec) {
    if (points.size() < 2)
        throw DomainError("integrate_segmented: need at least two points");
    std::vector<Segment> segs;
    segs.reserve(points.size() - 1);
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i] < points[i + 1]))
            throw DomainError("integrate_segmented: points must be increasing");
        segs.push_back(gk15(f, points[i], points[i + 1]));
    }
    return adapt(f, std::move(segs), spec, 15 * (points.size() - 1));
}

QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         double lo, const QuadratureSpec& spec) {
    // x = lo + t/(1-t), dx = dt/(1-t)^2; t = 1 is never an abscissa.
    auto g = [&f, lo](double t) {
        const double om = 1.0 - t;
        return f(lo + t / om) / (om * om);
    };
    std::vector<Segment> segs{gk15(g, 0.0, 0.5), gk15(g, 0.5, 1.0)};
    return adapt(g, std::move(segs), spec, 30);
}

}  // namespace vol32

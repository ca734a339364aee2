#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vol32/errors.hpp"

namespace vol32::cli {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 40, kTop = 45, kBottom = 55;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

// round the raw span to a 1/2/5 tick step
double tick_step(double span) {
    if (!(span > 0)) return 1.0;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    if (frac < 1.5) return mag;
    if (frac < 3.5) return 2 * mag;
    if (frac < 7.5) return 5 * mag;
    return 10 * mag;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

void SvgPlot::add_line(const std::string& name, const std::vector<double>& x,
                       const std::vector<double>& y) {
    series_.push_back({name, x, y, false});
}

void SvgPlot::add_points(const std::string& name, const std::vector<double>& x,
                         const std::vector<double>& y) {
    series_.push_back({name, x, y, true});
}

void SvgPlot::write(const std::string& path) const {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmin < xmax)) {
        xmin -= 1;
        xmax += 1;
    }
    if (!(ymin < ymax)) {
        ymin -= 1;
        ymax += 1;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) {
        return kLeft + (x - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
    };
    auto py = [&](double y) {
        return kHeight - kBottom -
               (y - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
    };

    std::ofstream out(path);
    if (!out) throw Error("cannot write svg: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
        << "' height='" << kHeight << "' font-family='sans-serif'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' "
        << "font-size='16'>" << title_ << "</text>\n";

    // axes box and ticks
    out << "<rect x='" << kLeft << "' y='" << kTop << "' width='"
        << kWidth - kLeft - kRight << "' height='" << kHeight - kTop - kBottom
        << "' fill='none' stroke='black'/>\n";
    const double xs = tick_step(xmax - xmin), ys = tick_step(ymax - ymin);
    for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-12 * xs; t += xs) {
        out << "<line x1='" << px(t) << "' y1='" << kHeight - kBottom
            << "' x2='" << px(t) << "' y2='" << kHeight - kBottom + 5
            << "' stroke='black'/>\n"
            << "<text x='" << px(t) << "' y='" << kHeight - kBottom + 20
            << "' text-anchor='middle' font-size='11'>" << fmt(t)
            << "</text>\n";
    }
    for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-12 * ys; t += ys) {
        out << "<line x1='" << kLeft - 5 << "' y1='" << py(t) << "' x2='"
            << kLeft << "' y2='" << py(t) << "' stroke='black'/>\n"
            << "<text x='" << kLeft - 8 << "' y='" << py(t) + 4
            << "' text-anchor='end' font-size='11'>" << fmt(t) << "</text>\n";
    }
    out << "<text x='" << (kLeft + kWidth - kRight) / 2 << "' y='"
        << kHeight - 12 << "' text-anchor='middle' font-size='13'>" << x_label_
        << "</text>\n"
        << "<text x='16' y='" << (kTop + kHeight - kBottom) / 2
        << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
        << (kTop + kHeight - kBottom) / 2 << ")'>" << y_label_ << "</text>\n";

    // series + legend
    double ly = kTop + 16;
    for (std::size_t si = 0; si < series_.size(); ++si) {
        const auto& s = series_[si];
        const char* color = kColors[si % 6];
        if (s.scatter) {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i])
                    << "' r='3' fill='" << color << "'/>\n";
        } else {
            out << "<polyline fill='none' stroke='" << color
                << "' stroke-width='1.5' points='";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            out << "'/>\n";
        }
        out << "<rect x='" << kWidth - kRight - 170 << "' y='" << ly - 9
            << "' width='12' height='4' fill='" << color << "'/>\n"
            << "<text x='" << kWidth - kRight - 152 << "' y='" << ly
            << "' font-size='12'>" << s.name << "</text>\n";
        ly += 16;
    }
    out << "</svg>\n";
}

}  // namespace vol32::cli

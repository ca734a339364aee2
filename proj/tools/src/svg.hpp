#pragma once

#include <string>
#include <vector>

namespace vol32::cli {

/// Bare-bones SVG line plot: series of (x, y) polylines plus optional
/// scatter markers, linear axes with tick labels. No external
/// dependencies; enough to eyeball a smile or a skew.
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)),
          x_label_(std::move(x_label)),
          y_label_(std::move(y_label)) {}

    void add_line(const std::string& name, const std::vector<double>& x,
                  const std::vector<double>& y);
    void add_points(const std::string& name, const std::vector<double>& x,
                    const std::vector<double>& y);

    void write(const std::string& path) const;

  private:
    struct Series {
        std::string name;
        std::vector<double> x, y;
        bool scatter;
    };
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

}  // namespace vol32::cli

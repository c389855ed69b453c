#pragma once

#include <string>
#include <vector>

namespace armlab {

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Standalone SVG line chart; no external plotting dependencies.
std::string render_line_chart_svg(const std::string& title,
                                  const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<ChartSeries>& series);

}  // namespace armlab

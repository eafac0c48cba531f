#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stnoma {

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
  bool markers = false;
  bool dashed = false;
};

/// Standalone SVG line plot with linear axes starting at zero.
std::string render_svg(const std::vector<PlotSeries>& series, std::string_view title,
                       std::string_view x_label, std::string_view y_label);

}  // namespace stnoma

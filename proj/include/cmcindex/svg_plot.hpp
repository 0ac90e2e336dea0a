#pragma once

#include <string>
#include <vector>

namespace cmc {

struct PlotSeries {
  std::string name;
  std::string color;
  std::vector<double> y;
  bool step = false;
};

/// Static SVG line chart of several series sharing one x axis; each series
/// is scaled to its own range and labelled with it in the legend.
std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::vector<double>& x, const std::vector<PlotSeries>& series);

}  // namespace cmc

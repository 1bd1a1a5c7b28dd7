#pragma once

#include <string>
#include <vector>

namespace plebo {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> se;
};

// Mean lines with +/- one standard error bands, one colour per series, and a
// dashed zero-reference line in difference mode. Returns a complete SVG
// document.
std::string render_curves_svg(const std::vector<PlotSeries>& series,
                              bool difference_mode, const std::string& title);

}  // namespace plebo

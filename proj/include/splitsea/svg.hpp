#pragma once

#include <string>
#include <vector>

namespace splitsea {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string colour = "#1f77b4";
};

struct SvgPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
};

/// Panels stacked vertically, each a set of polylines on its own axes.
std::string render_svg(const std::vector<SvgPanel> &panels, int width = 640, int panel_height = 240);
void write_svg(const std::string &path, const std::vector<SvgPanel> &panels);

} // namespace splitsea

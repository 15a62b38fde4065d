#include "splitsea/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "splitsea/errors.hpp"

namespace splitsea {

namespace {

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    default: out += c;
    }
  }
  return out;
}

} // namespace

std::string render_svg(const std::vector<SvgPanel> &panels, int width, int panel_height) {
  const int margin = 48;
  std::ostringstream svg;
  svg.precision(6);
  const int height = panel_height * static_cast<int>(std::max<std::size_t>(panels.size(), 1));
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const SvgPanel &panel = panels[p];
    const double top = static_cast<double>(p) * panel_height;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const auto &s : panel.series)
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
          continue;
        x0 = std::min(x0, s.x[i]);
        x1 = std::max(x1, s.x[i]);
        y0 = std::min(y0, s.y[i]);
        y1 = std::max(y1, s.y[i]);
      }
    if (!(x1 > x0)) {
      x0 = 0.0;
      x1 = 1.0;
    }
    if (!(y1 > y0)) {
      y0 -= 0.5;
      y1 += 0.5;
    }
    const double pw = width - 2.0 * margin;
    const double ph = panel_height - 2.0 * margin;
    auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + margin + (y1 - y) / (y1 - y0) * ph; };
    svg << "<g>\n<text x=\"" << width / 2 << "\" y=\"" << top + 18
        << "\" text-anchor=\"middle\">" << escape(panel.title) << "</text>\n";
    svg << "<rect x=\"" << margin << "\" y=\"" << top + margin << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << top + panel_height - 12 << "\">" << x0 << "</text>\n";
    svg << "<text x=\"" << width - margin << "\" y=\"" << top + panel_height - 12
        << "\" text-anchor=\"end\">" << x1 << "</text>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"" << top + panel_height - 12
        << "\" text-anchor=\"middle\">" << escape(panel.x_label) << "</text>\n";
    svg << "<text x=\"4\" y=\"" << top + margin + 10 << "\">" << y1 << "</text>\n";
    svg << "<text x=\"4\" y=\"" << top + margin + ph << "\">" << y0 << "</text>\n";
    svg << "<text x=\"4\" y=\"" << top + margin + ph / 2 << "\">" << escape(panel.y_label) << "</text>\n";
    int legend = 0;
    for (const auto &s : panel.series) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          svg << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      svg << "\"/>\n";
      if (!s.label.empty())
        svg << "<text x=\"" << width - margin - 4 << "\" y=\"" << top + margin + 14 + 13 * legend++
            << "\" text-anchor=\"end\" fill=\"" << s.colour << "\">" << escape(s.label) << "</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const std::string &path, const std::vector<SvgPanel> &panels) {
  std::ofstream out(path);
  if (!out)
    throw ConfigError("cannot write " + path);
  out << render_svg(panels);
}

} // namespace splitsea

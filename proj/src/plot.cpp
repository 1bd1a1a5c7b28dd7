#include "plebo/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "plebo/errors.hpp"

namespace plebo {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;  // room for the legend
constexpr double kTop = 50.0;
constexpr double kBottom = 55.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_curves_svg(const std::vector<PlotSeries>& series,
                              bool difference_mode, const std::string& title) {
  if (series.empty()) throw ParseError("render_curves_svg: no series");

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -y_lo;
  for (const PlotSeries& s : series) {
    if (s.x.empty() || s.x.size() != s.mean.size() ||
        s.x.size() != s.se.size())
      throw ParseError("render_curves_svg: ragged series '" + s.name + "'");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.mean[i] - s.se[i]);
      y_hi = std::max(y_hi, s.mean[i] + s.se[i]);
    }
  }
  if (difference_mode) {
    y_lo = std::min(y_lo, 0.0);
    y_hi = std::max(y_hi, 0.0);
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  const double pad = (y_hi - y_lo) * 0.05 + 1e-12;
  y_lo -= pad;
  y_hi += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto map_x = [&](double v) {
    return kLeft + (v - x_lo) / (x_hi - x_lo) * plot_w;
  };
  const auto map_y = [&](double v) {
    return kTop + (1.0 - (v - y_lo) / (y_hi - y_lo)) * plot_h;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  if (!title.empty())
    svg << "<text x=\"" << kWidth / 2
        << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << escape_xml(title) << "</text>\n";

  // Axes with ticks.
  svg << "<g stroke=\"#333\" stroke-width=\"1\" font-family=\"sans-serif\" "
         "font-size=\"11\">\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h << "\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double fx = x_lo + (x_hi - x_lo) * t / 5.0;
    const double px = map_x(fx);
    svg << "<line x1=\"" << px << "\" y1=\"" << kTop + plot_h << "\" x2=\""
        << px << "\" y2=\"" << kTop + plot_h + 5 << "\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333\">"
        << fmt(fx) << "</text>\n";
    const double fy = y_lo + (y_hi - y_lo) * t / 5.0;
    const double py = map_y(fy);
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\""
        << kLeft << "\" y2=\"" << py << "\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#333\">" << fmt(fy)
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333\">iteration"
      << "</text>\n";
  svg << "</g>\n";

  if (difference_mode) {
    const double zy = map_y(0.0);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << zy << "\" x2=\""
        << kLeft + plot_w << "\" y2=\"" << zy
        << "\" stroke=\"#555\" stroke-dasharray=\"5,4\"/>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const PlotSeries& sr = series[s];
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(*kPalette))];

    // +/- one standard error band.
    svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" "
        << "stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < sr.x.size(); ++i)
      svg << fmt(map_x(sr.x[i])) << "," << fmt(map_y(sr.mean[i] + sr.se[i]))
          << " ";
    for (std::size_t i = sr.x.size(); i-- > 0;)
      svg << fmt(map_x(sr.x[i])) << "," << fmt(map_y(sr.mean[i] - sr.se[i]))
          << " ";
    svg << "\"/>\n";

    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < sr.x.size(); ++i)
      svg << fmt(map_x(sr.x[i])) << "," << fmt(map_y(sr.mean[i])) << " ";
    svg << "\"/>\n";

    const double ly = kTop + 18.0 * static_cast<double>(s);
    svg << "<rect x=\"" << kLeft + plot_w + 14 << "\" y=\"" << ly
        << "\" width=\"14\" height=\"4\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w + 32 << "\" y=\"" << ly + 6
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(sr.name) << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace plebo

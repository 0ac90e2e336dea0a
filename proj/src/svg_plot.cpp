#include "cmcindex/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "cmcindex/errors.hpp"

namespace cmc {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::vector<double>& x, const std::vector<PlotSeries>& series) {
  if (x.empty()) throw ParameterError("plot needs at least one point");
  for (const PlotSeries& s : series) {
    if (s.y.size() != x.size()) throw ParameterError("plot series length mismatch");
  }
  const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
  const double xmin = *xmin_it;
  const double xmax = *xmax_it > xmin ? *xmax_it : xmin + 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * plot_w; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << escape(title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = xmin + (xmax - xmin) * t / 5.0;
    svg << "<text x=\"" << num(px(v)) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(v)
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(x_label) << "</text>\n";

  int legend_row = 0;
  for (const PlotSeries& s : series) {
    const auto [lo_it, hi_it] = std::minmax_element(s.y.begin(), s.y.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    auto py = [&](double v) { return kTop + plot_h - (v - lo) / (hi - lo) * plot_h * 0.9 - plot_h * 0.05; };
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (s.step && i > 0) svg << num(px(x[i])) << ',' << num(py(s.y[i - 1])) << ' ';
      svg << num(px(x[i])) << ',' << num(py(s.y[i])) << ' ';
    }
    svg << "\"/>\n";
    const double ly = kTop + 16 + 16 * legend_row++;
    svg << "<line x1=\"" << kLeft + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + 30
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + 36 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.name) << " [" << num(*lo_it)
        << ", " << num(*hi_it) << "]</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace cmc

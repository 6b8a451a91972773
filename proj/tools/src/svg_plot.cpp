#include "svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace expcorr::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 6> kColors = {"#000000", "#1f5fa8", "#b03a2e",
                                                "#2e8b57", "#8e44ad", "#b7950b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

// Tick spacing of 1, 2 or 5 times a power of ten giving about 6 ticks.
double nice_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi <= lo) hi = lo + 1.0;
  }
};

}  // namespace

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_svg(const Plot& plot) {
  Range xr, yr;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xr.add(s.x[i]);
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      yr.add(s.y[i] - e);
      yr.add(s.y[i] + e);
    }
  }
  if (plot.band) {
    yr.add(plot.band->lower);
    yr.add(plot.band->upper);
  }
  xr.settle();
  yr.settle();
  const double x0 = plot.x_min.value_or(xr.lo), x1 = plot.x_max.value_or(xr.hi);
  const double y0 = plot.y_min.value_or(yr.lo), y1 = plot.y_max.value_or(yr.hi);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         xml_escape(plot.title) + "</text>\n";

  if (plot.band) {
    const double top = py(std::min(plot.band->upper, y1));
    const double bottom = py(std::max(plot.band->lower, y0));
    if (bottom > top) {
      svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) +
             "\" height=\"" + num(bottom - top) + "\" fill=\"#d5d8dc\" opacity=\"0.7\"/>\n";
    }
  }

  // Axes and ticks.
  svg += "<g stroke=\"black\" fill=\"none\">\n";
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" +
         num(ph) + "\"/>\n";
  svg += "</g>\n<g text-anchor=\"middle\">\n";
  const double xs = nice_step(x1 - x0);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    svg += "<line x1=\"" + num(px(t)) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(px(t)) +
           "\" y2=\"" + num(kTop + ph + 5) + "\" stroke=\"black\"/>";
    svg += "<text x=\"" + num(px(t)) + "\" y=\"" + num(kTop + ph + 18) + "\">" + tick_label(t) + "</text>\n";
  }
  svg += "</g>\n<g text-anchor=\"end\">\n";
  const double ys = nice_step(y1 - y0);
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py(t)) + "\" x2=\"" + num(kLeft) +
           "\" y2=\"" + num(py(t)) + "\" stroke=\"black\"/>";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(t) + 4) + "\">" + tick_label(t) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 15) + "\" text-anchor=\"middle\">" +
         xml_escape(plot.x_label) + "</text>\n";
  svg += "<text transform=\"translate(18," + num(kTop + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-weight=\"bold\">" + xml_escape(plot.y_label) +
         "</text>\n";

  // Data, clipped to the plot area.
  svg += "<clipPath id=\"area\"><rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\"/></clipPath>\n<g clip-path=\"url(#area)\">\n";
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const std::string color = kColors[k % kColors.size()];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      points += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"" +
           (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + " points=\"" + points + "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      if (i < s.err.size()) {
        svg += "<line x1=\"" + num(px(s.x[i])) + "\" y1=\"" + num(py(s.y[i] - s.err[i])) + "\" x2=\"" +
               num(px(s.x[i])) + "\" y2=\"" + num(py(s.y[i] + s.err[i])) + "\" stroke=\"" + color + "\"/>\n";
      }
      if (s.markers) {
        svg += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" + num(py(s.y[i])) + "\" r=\"3\" fill=\"" +
               (s.dashed ? "white" : color) + "\" stroke=\"" + color + "\"/>\n";
      }
    }
  }
  svg += "</g>\n";

  // Legend.
  double ly = kTop + 16;
  auto legend_row = [&](const std::string& swatch, const std::string& label) {
    svg += swatch + "<text x=\"" + num(kLeft + 42) + "\" y=\"" + num(ly + 4) + "\">" + xml_escape(label) +
           "</text>\n";
    ly += 18;
  };
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    if (s.label.empty()) continue;
    const std::string color = kColors[k % kColors.size()];
    legend_row("<line x1=\"" + num(kLeft + 10) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(kLeft + 36) +
                   "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"1.5\"" +
                   (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>",
               s.label);
  }
  if (plot.band && !plot.band->label.empty()) {
    legend_row("<rect x=\"" + num(kLeft + 10) + "\" y=\"" + num(ly - 5) +
                   "\" width=\"26\" height=\"10\" fill=\"#d5d8dc\"/>",
               plot.band->label);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace expcorr::cli

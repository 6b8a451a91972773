#pragma once

#include <optional>
#include <string>
#include <vector>

namespace expcorr::cli {

/// One polyline of a line chart, optionally with vertical +-err bars.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  ///< empty for no error bars
  bool dashed = false;
  bool markers = true;
};

/// Horizontal shaded band, e.g. a confidence interval.
struct PlotBand {
  double lower = 0.0;
  double upper = 0.0;
  std::string label;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<double> x_min, x_max, y_min, y_max;
  std::vector<PlotSeries> series;
  std::optional<PlotBand> band;
};

/// Renders a static SVG document. Output depends only on the plot contents.
std::string render_svg(const Plot& plot);

/// Escapes text for XML character data and attribute values.
std::string xml_escape(const std::string& text);

}  // namespace expcorr::cli

#pragma once

// Static SVG line charts with optional shaded bands.

#include <optional>
#include <string>
#include <vector>

namespace cnc {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma;  // empty: no band
  bool step = false;          // draw as a staircase
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<double> reference;  // horizontal dashed line
  std::optional<double> y_min;
  std::optional<double> y_max;
  int width = 720;
  int height = 420;
};

// Deterministic for identical input. Throws std::invalid_argument when no
// series has a finite point.
std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace cnc

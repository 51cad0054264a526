// SPDX-License-Identifier: Apache-2.0
//
// Minimal static line charts.
#pragma once

#include <string>
#include <vector>

namespace dtqw {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  double y_min = 0.0;
  double y_max = 1.0;
  std::vector<PlotSeries> series;
};

/// Standalone SVG document with axes, ticks, one polyline per series and a
/// legend. The output depends only on the chart, so equal charts give equal bytes.
std::string render_svg(const LineChart& chart);

}  // namespace dtqw

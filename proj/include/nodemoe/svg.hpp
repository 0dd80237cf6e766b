// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nodemoe {

struct PlotSeries {
  std::string name;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<PlotSeries> series;
};

// Standalone SVG document; non-finite points break the polyline.
void write_svg(std::ostream& out, const LinePlot& plot);

}  // namespace nodemoe

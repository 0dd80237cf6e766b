// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <ostream>

#include "nodemoe/common.hpp"

namespace nodemoe {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kMargin = 56;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                   "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

void write_svg(std::ostream& out, const LinePlot& plot) {
  for (const auto& s : plot.series) {
    require(s.y.size() == plot.x.size(), "plot series '" + s.name + "' length != x length");
  }
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (double v : plot.x) {
    if (std::isfinite(v)) x0 = std::min(x0, v), x1 = std::max(x1, v);
  }
  for (const auto& s : plot.series) {
    for (double v : s.y) {
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
  }
  if (!(x1 > x0)) x0 = 0, x1 = 1;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  const double pw = kWidth - 2 * kMargin;
  const double ph = kHeight - 2 * kMargin;
  auto px = [&](double v) { return kMargin + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kHeight - kMargin - (v - y0) / (y1 - y0) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(plot.title) << "</text>\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << pw << "\" height=\""
      << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0;
    const double fy = y0 + (y1 - y0) * i / 4.0;
    out << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(kHeight - kMargin + 16)
        << "\" text-anchor=\"middle\">" << tick(fx) << "</text>\n";
    out << "<text x=\"" << num(kMargin - 6) << "\" y=\"" << num(py(fy) + 4)
        << "\" text-anchor=\"end\">" << tick(fy) << "</text>\n";
  }
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n";
  out << "<text transform=\"translate(14," << kHeight / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
            << points << "\"/>\n";
      }
      points.clear();
    };
    for (std::size_t i = 0; i < plot.x.size(); ++i) {
      const double v = plot.series[s].y[i];
      if (!std::isfinite(v) || !std::isfinite(plot.x[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += num(px(plot.x[i])) + "," + num(py(v));
    }
    flush();
    const double ly = kMargin + 14 + 16 * static_cast<double>(s);
    out << "<line x1=\"" << num(kWidth - kMargin - 120) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
        << num(kWidth - kMargin - 100) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(kWidth - kMargin - 96) << "\" y=\"" << num(ly) << "\">"
        << escape(plot.series[s].name) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace nodemoe

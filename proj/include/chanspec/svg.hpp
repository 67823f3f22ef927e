#pragma once

#include <string>
#include <vector>

namespace chanspec {

// Minimal static SVG plotting: polyline series, scatter markers, axes with
// ticks, and a unit-circle pole plot.

struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
  std::string color = "#1f77b4";
  bool markers = false;  // draw point markers instead of a polyline
};

void svg_line_plot(const std::string& path, const std::vector<SvgSeries>& series,
                   const std::string& title, const std::string& xlabel,
                   const std::string& ylabel);

struct SvgPoleSet {
  std::vector<double> re;
  std::vector<double> im;
  std::string label;
  std::string color = "#d62728";
  std::string marker = "circle";  // "circle" | "cross" | "diamond"
};

void svg_unit_circle_plot(const std::string& path, const std::vector<SvgPoleSet>& sets,
                          const std::string& title);

}  // namespace chanspec

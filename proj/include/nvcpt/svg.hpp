#pragma once

// Minimal line-plot SVG writer for quick looks at scan output.

#include <string>
#include <vector>

namespace nvcpt {

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct SvgPlot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<SvgSeries> series;
  int width = 720;
  int height = 480;
};

std::string render_svg(const SvgPlot& plot);

/// Grid heat map, values row-major over y x x.
std::string render_svg_heatmap(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>& values, const std::string& xlabel, const std::string& ylabel);

}  // namespace nvcpt

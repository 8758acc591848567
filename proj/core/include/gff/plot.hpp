#pragma once

#include <string>
#include <vector>

namespace gff {

// One drawable series. line uses (x, y) pairs; histogram bins the x values
// and ignores y; heatmap reads x as row-major cell values with rows * cols
// matching its length.
struct PlotSeries {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  int rows = 0;
  int cols = 0;
  int bins = 24;
};

enum class PlotKind { line, histogram, heatmap };

// Standalone SVG, deterministic for fixed input. Throws on empty series or
// inconsistent dimensions.
std::string render_svg(const PlotSeries& series, PlotKind kind);

void emit_plot(const PlotSeries& series, PlotKind kind, const std::string& path);

}  // namespace gff

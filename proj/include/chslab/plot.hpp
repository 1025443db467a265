#pragma once

#include <string>
#include <vector>

namespace chslab {

// A numeric CSV loaded column-wise. Non-numeric cells become NaN and are
// skipped by the renderer.
struct CsvTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // one vector per name, equal lengths
  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);  // IoError on unreadable/ragged input

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};

struct PlotOptions {
  std::string title;
  std::string xlabel, ylabel;
  bool logx = false, logy = false;
  int width = 960, height = 600;
};

// Static SVG line chart: axes with tick labels, light grid, legend, one
// polyline per series from a fixed palette. Non-finite points (and
// non-positive ones on log axes) are dropped.
void write_svg_line_chart(const std::string& path, const std::vector<PlotSeries>& series,
                          const PlotOptions& opt);

}  // namespace chslab

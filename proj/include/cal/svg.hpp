#pragma once

#include <string>
#include <vector>

namespace cal {

struct CurveSeries {
  std::string name;
  std::vector<double> cost;
  std::vector<double> accuracy;
};

// Standalone SVG line chart: x = cumulative cost, y = mean test accuracy,
// one polyline per series, axis labels and legend as text elements.
std::string render_line_chart(const std::vector<CurveSeries>& series,
                              int width = 720, int height = 480);

void write_svg(const std::string& path, const std::vector<CurveSeries>& series);

// Parses the `strategy,cost,mean_accuracy` curve format back into series.
std::vector<CurveSeries> read_curve_csv(const std::string& path);

}  // namespace cal

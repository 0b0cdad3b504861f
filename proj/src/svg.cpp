#include "cal/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cal {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

}  // namespace

std::string render_line_chart(const std::vector<CurveSeries>& series, int width,
                              int height) {
  if (series.empty()) throw std::invalid_argument("render_line_chart: no series");

  double x_min = 0, x_max = 0, y_min = 1, y_max = 0;
  for (const auto& s : series) {
    if (s.cost.empty() || s.cost.size() != s.accuracy.size())
      throw std::invalid_argument("render_line_chart: malformed series '" + s.name + "'");
    x_max = std::max(x_max, *std::max_element(s.cost.begin(), s.cost.end()));
    y_min = std::min(y_min, *std::min_element(s.accuracy.begin(), s.accuracy.end()));
    y_max = std::max(y_max, *std::max_element(s.accuracy.begin(), s.accuracy.end()));
  }
  if (x_max <= x_min) x_max = x_min + 1;
  const double pad = std::max(0.02, (y_max - y_min) * 0.1);
  y_min = std::max(0.0, y_min - pad);
  y_max = std::min(1.0, y_max + pad);
  if (y_max <= y_min) y_max = y_min + 0.01;

  const double left = 64, right = 24, top = 24, bottom = 48;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  // Screen y grows downward.
  auto sy = [&](double y) { return top + (y_max - y) / (y_max - y_min) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  // Axes.
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\""
      << left + plot_w << "\" y2=\"" << top + plot_h
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const int ticks = 5;
  for (int t = 0; t <= ticks; ++t) {
    const double xv = x_min + (x_max - x_min) * t / ticks;
    const double yv = y_min + (y_max - y_min) * t / ticks;
    svg << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(top + plot_h + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    svg << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(sy(yv) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
  }
  svg << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"" << fmt(height - 10)
      << "\" font-size=\"13\" text-anchor=\"middle\">cumulative cost</text>\n";
  svg << "<text x=\"14\" y=\"" << fmt(top + plot_h / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << fmt(top + plot_h / 2) << ")\">test accuracy</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < series[i].cost.size(); ++j) {
      if (j) svg << ' ';
      svg << fmt(sx(series[i].cost[j])) << ',' << fmt(sy(series[i].accuracy[j]));
    }
    svg << "\"/>\n";

    // Legend entry.
    const double ly = top + 8 + 18 * static_cast<double>(i);
    svg << "<line x1=\"" << fmt(left + plot_w - 110) << "\" y1=\"" << fmt(ly)
        << "\" x2=\"" << fmt(left + plot_w - 86) << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(left + plot_w - 80) << "\" y=\"" << fmt(ly + 4)
        << "\" font-size=\"12\">" << series[i].name << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const std::string& path, const std::vector<CurveSeries>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write SVG file: " + path);
  out << render_line_chart(series);
}

std::vector<CurveSeries> read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open curve file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty curve file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "strategy,cost,mean_accuracy")
    throw std::runtime_error("unexpected curve header in " + path + ": " + line);

  std::vector<CurveSeries> series;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string name, cost_s, acc_s;
    if (!std::getline(ss, name, ',') || !std::getline(ss, cost_s, ',') ||
        !std::getline(ss, acc_s))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad row");
    double cost, acc;
    try {
      cost = std::stod(cost_s);
      acc = std::stod(acc_s);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": non-numeric value");
    }
    if (series.empty() || series.back().name != name) {
      auto it = std::find_if(series.begin(), series.end(),
                             [&](const CurveSeries& s) { return s.name == name; });
      if (it != series.end()) {
        it->cost.push_back(cost);
        it->accuracy.push_back(acc);
        continue;
      }
      series.push_back({name, {}, {}});
    }
    series.back().cost.push_back(cost);
    series.back().accuracy.push_back(acc);
  }
  if (series.empty()) throw std::runtime_error("no curve rows in " + path);
  return series;
}

}  // namespace cal

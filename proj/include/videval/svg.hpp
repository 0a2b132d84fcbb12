#pragma once

// Dependency-free SVG emitters: line plots (optionally log-x) and a
// pairwise-significance grid. Plots are a convenience; CSV is the contract.
// Output is deterministic: fixed 800x600 viewBox, fixed-precision
// coordinates.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "videval/util.hpp"

namespace videval {

struct SvgSeries {
  std::string label;
  std::string color;  // e.g. "#1b6ca8"
  std::vector<std::pair<double, double>> points;
};

namespace svgdetail {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;

inline std::string num(double v) { return format_fixed(v, 2); }

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace svgdetail

// Default palette used when a series carries no color.
inline const char* svg_palette(std::size_t i) {
  static const char* kColors[] = {"#1b6ca8", "#c0392b", "#27ae60", "#8e44ad",
                                  "#d35400", "#16a085", "#7f8c8d", "#2c3e50"};
  return kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
}

inline std::string svg_line_plot(const std::string& title, const std::string& x_label,
                                 const std::string& y_label,
                                 const std::vector<SvgSeries>& series, bool log_x = false) {
  using namespace svgdetail;
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool seen = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (log_x && !(x > 0)) continue;
      if (!seen) {
        x_min = x_max = x;
        y_min = y_max = y;
        seen = true;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (!seen) {
    x_min = log_x ? 1e-3 : 0.0;
    x_max = 1.0;
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;
  auto tx = [&](double x) {
    double t;
    if (log_x) {
      double lo = std::log10(x_min), hi = std::log10(x_max);
      t = (std::log10(std::max(x, x_min)) - lo) / (hi - lo);
    } else {
      t = (x - x_min) / (x_max - x_min);
    }
    return kLeft + t * (kWidth - kLeft - kRight);
  };
  auto ty = [&](double y) {
    double t = (y - y_min) / (y_max - y_min);
    return kHeight - kBottom - t * (kHeight - kTop - kBottom);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << escape(title) << "</text>\n";
  // Axes
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
      << "\" y2=\"" << num(kHeight - kBottom) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\""
      << num(kWidth - kRight) << "\" y2=\"" << num(kHeight - kBottom)
      << "\" stroke=\"black\"/>\n";
  // Ticks: 5 divisions per axis
  for (int i = 0; i <= 5; ++i) {
    double fx = x_min + (x_max - x_min) * i / 5.0;
    if (log_x) {
      double lo = std::log10(x_min), hi = std::log10(x_max);
      fx = std::pow(10.0, lo + (hi - lo) * i / 5.0);
    }
    double px = tx(fx);
    out << "<line x1=\"" << num(px) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\""
        << num(px) << "\" y2=\"" << num(kHeight - kBottom + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(px) << "\" y=\"" << num(kHeight - kBottom + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_fixed(fx, 3) << "</text>\n";
    double fy = y_min + (y_max - y_min) * i / 5.0;
    double py = ty(fy);
    out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(kLeft)
        << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_fixed(fy, 3) << "</text>\n";
  }
  out << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 15)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << num((kTop + kHeight - kBottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 "
      << num((kTop + kHeight - kBottom) / 2) << ")\">" << escape(y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    std::string color = s.color.empty() ? svg_palette(si) : s.color;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& [x, y] : s.points) {
      if (log_x && !(x > 0)) continue;
      if (!first) out << ' ';
      out << num(tx(x)) << ',' << num(ty(y));
      first = false;
    }
    out << "\"/>\n";
    // Legend entry
    double ly = kTop + 16.0 * static_cast<double>(si);
    out << "<line x1=\"" << num(kWidth - kRight - 150) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(kWidth - kRight - 130) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(kWidth - kRight - 125) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// Pairwise grid: cell (row, col) painted green when row beat column
// significantly. Rows/columns share one label list.
inline std::string svg_significance_grid(const std::string& title,
                                         const std::vector<std::string>& labels,
                                         const std::vector<std::vector<char>>& better) {
  using namespace svgdetail;
  const std::size_t n = labels.size();
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << escape(title) << "</text>\n";
  if (n == 0) {
    out << "</svg>\n";
    return out.str();
  }
  const double grid_left = 180, grid_top = 120;
  const double cell = std::min((kWidth - grid_left - 20) / static_cast<double>(n),
                               (kHeight - grid_top - 20) / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double cy = grid_top + cell * static_cast<double>(i) + cell / 2;
    out << "<text x=\"" << num(grid_left - 6) << "\" y=\"" << num(cy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(labels[i]) << "</text>\n";
    double cx = grid_left + cell * static_cast<double>(i) + cell / 2;
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(grid_top - 8)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
           "transform=\"rotate(-60 "
        << num(cx) << ' ' << num(grid_top - 8) << ")\">" << escape(labels[i]) << "</text>\n";
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const char* fill = i == j ? "#dddddd" : (better[i][j] ? "#2e7d32" : "#f4f4f4");
      out << "<rect x=\"" << num(grid_left + cell * static_cast<double>(j)) << "\" y=\""
          << num(grid_top + cell * static_cast<double>(i)) << "\" width=\"" << num(cell)
          << "\" height=\"" << num(cell) << "\" fill=\"" << fill
          << "\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n";
    }
  out << "</svg>\n";
  return out.str();
}

}  // namespace videval

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "autotune/report.hpp"

namespace autotune {

namespace {

constexpr int kCellWidth = 72;
constexpr int kCellHeight = 28;
constexpr int kLabelWidth = 120;
constexpr int kTop = 56;

struct Rgb {
  double r, g, b;
};

// Light to dark blue.
constexpr Rgb kLight{247, 251, 255};
constexpr Rgb kDark{8, 48, 107};

std::string hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c.r)),
                static_cast<int>(std::lround(c.g)), static_cast<int>(std::lround(c.b)));
  return buf;
}

Rgb ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return {kLight.r + (kDark.r - kLight.r) * t, kLight.g + (kDark.g - kLight.g) * t,
          kLight.b + (kDark.b - kLight.b) * t};
}

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string heatmap_svg(const NamedMatrix& matrix) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& row : matrix.values) {
    for (double v : row) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const int cols = static_cast<int>(matrix.columns.size());
  const int rows = static_cast<int>(matrix.rows.size());
  const int width = kLabelWidth + cols * kCellWidth + 20;
  const int height = kTop + rows * kCellHeight + 60;

  std::string title = matrix.name;
  if (!matrix.benchmark.empty()) title += " (" + matrix.benchmark + ")";

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<title>" + escape(title) + "</title>\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"10\" y=\"20\" font-size=\"14\">" + escape(title) + "</text>\n";
  for (int k = 0; k < cols; ++k) {
    svg += "<text x=\"" + std::to_string(kLabelWidth + k * kCellWidth + kCellWidth / 2) + "\" y=\"" +
           std::to_string(kTop - 8) + "\" text-anchor=\"middle\">S=" + std::to_string(matrix.columns[k]) +
           "</text>\n";
  }
  for (int i = 0; i < rows; ++i) {
    const int y = kTop + i * kCellHeight;
    svg += "<text x=\"" + std::to_string(kLabelWidth - 8) + "\" y=\"" + std::to_string(y + kCellHeight / 2 + 4) +
           "\" text-anchor=\"end\">" + escape(matrix.rows[i]) + "</text>\n";
    for (int k = 0; k < cols; ++k) {
      const double v = matrix.values[i][k];
      const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
      const int x = kLabelWidth + k * kCellWidth;
      svg += "<rect class=\"cell\" x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(kCellWidth) + "\" height=\"" + std::to_string(kCellHeight) + "\" fill=\"" +
             hex(ramp(t)) + "\" stroke=\"#ffffff\"/>\n";
      svg += "<text x=\"" + std::to_string(x + kCellWidth / 2) + "\" y=\"" + std::to_string(y + kCellHeight / 2 + 4) +
             "\" text-anchor=\"middle\" fill=\"" + (t > 0.55 ? "#ffffff" : "#000000") + "\">" + label(v) +
             "</text>\n";
    }
  }

  // Legend: gradient bar from the observed minimum to the maximum.
  const int legend_y = kTop + rows * kCellHeight + 20;
  const int legend_w = std::max(cols * kCellWidth, 120);
  svg += "<defs><linearGradient id=\"ramp\" x1=\"0\" x2=\"1\" y1=\"0\" y2=\"0\">"
         "<stop offset=\"0\" stop-color=\"" + hex(kLight) + "\"/><stop offset=\"1\" stop-color=\"" + hex(kDark) +
         "\"/></linearGradient></defs>\n";
  svg += "<rect class=\"legend\" x=\"" + std::to_string(kLabelWidth) + "\" y=\"" + std::to_string(legend_y) +
         "\" width=\"" + std::to_string(legend_w) + "\" height=\"10\" fill=\"url(#ramp)\" stroke=\"#999999\"/>\n";
  if (std::isfinite(lo)) {
    svg += "<text x=\"" + std::to_string(kLabelWidth) + "\" y=\"" + std::to_string(legend_y + 24) + "\">" +
           label(lo) + "</text>\n";
    svg += "<text x=\"" + std::to_string(kLabelWidth + legend_w) + "\" y=\"" + std::to_string(legend_y + 24) +
           "\" text-anchor=\"end\">" + label(hi) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace autotune

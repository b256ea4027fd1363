#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/io/csv.hpp"
#include "gaitnl/pipeline/registry.hpp"
#include "gaitnl/rqa/export.hpp"

namespace gaitnl::pipeline {

/// Paired CSV of the plotted points: x column then one column per series.
/// Undefined points are empty cells.
inline std::string chart_csv(const Chart& c) {
  std::string out = io::quote_field(c.x_label);
  for (const auto& s : c.series) out += "," + io::quote_field(s.label);
  out += "\n";
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    out += io::format_double(c.x[i]);
    for (const auto& s : c.series) {
      out += ",";
      if (i < s.y.size() && std::isfinite(s.y[i])) out += io::format_double(s.y[i]);
    }
    out += "\n";
  }
  return out;
}

namespace plot_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else if (ch == '&') out += "&amp;";
    else out += ch;
  }
  return out;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double map(double v) const { return log ? std::log10(v) : v; }
  double unmap(double v) const { return log ? std::pow(10.0, v) : v; }
  bool valid(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

inline Axis fit_axis(std::span<const double> values, bool log) {
  Axis a{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), log};
  for (double v : values) {
    if (!a.valid(v)) continue;
    a.lo = std::min(a.lo, a.map(v));
    a.hi = std::max(a.hi, a.map(v));
  }
  if (!std::isfinite(a.lo)) a.lo = 0.0, a.hi = 1.0;
  if (a.hi - a.lo < 1e-12) {
    a.lo -= 0.5;
    a.hi += 0.5;
  }
  return a;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace plot_detail

/// Minimal SVG line chart with min/max tick labels and a legend.
inline std::string chart_svg(const Chart& c, const std::string& title) {
  using namespace plot_detail;
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  std::vector<double> ys;
  for (const auto& s : c.series) ys.insert(ys.end(), s.y.begin(), s.y.end());
  const Axis ax = fit_axis(c.x, c.log_x);
  const Axis ay = fit_axis(ys, c.log_y);
  const auto sx = [&](double v) { return L + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * (W - L - R); };
  const auto sy = [&](double v) { return H - B - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * (H - T - B); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" font-family=\"sans-serif\" "
                    "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + px(W / 2) + "\" y=\"20\" text-anchor=\"middle\">" + escape(title) + "</text>\n";
  svg += "<line x1=\"" + px(L) + "\" y1=\"" + px(H - B) + "\" x2=\"" + px(W - R) + "\" y2=\"" + px(H - B) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + px(L) + "\" y1=\"" + px(T) + "\" x2=\"" + px(L) + "\" y2=\"" + px(H - B) +
         "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + px(L) + "\" y=\"" + px(H - B + 16) + "\" text-anchor=\"start\">" + num(ax.unmap(ax.lo)) + "</text>\n";
  svg += "<text x=\"" + px(W - R) + "\" y=\"" + px(H - B + 16) + "\" text-anchor=\"end\">" + num(ax.unmap(ax.hi)) + "</text>\n";
  svg += "<text x=\"" + px(L - 6) + "\" y=\"" + px(H - B) + "\" text-anchor=\"end\">" + num(ay.unmap(ay.lo)) + "</text>\n";
  svg += "<text x=\"" + px(L - 6) + "\" y=\"" + px(T + 4) + "\" text-anchor=\"end\">" + num(ay.unmap(ay.hi)) + "</text>\n";
  svg += "<text x=\"" + px((L + W - R) / 2) + "\" y=\"" + px(H - 12) + "\" text-anchor=\"middle\">" +
         escape(c.x_label) + (c.log_x ? " (log)" : "") + "</text>\n";

  for (std::size_t k = 0; k < c.series.size(); ++k) {
    const auto& s = c.series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    std::string points;
    const auto flush = [&] {
      if (!points.empty()) {
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
      }
      points.clear();
    };
    for (std::size_t i = 0; i < c.x.size() && i < s.y.size(); ++i) {
      if (!ax.valid(c.x[i]) || !ay.valid(s.y[i])) {
        flush();
        continue;
      }
      points += px(sx(c.x[i])) + "," + px(sy(s.y[i])) + " ";
    }
    flush();
    svg += "<text x=\"" + px(W - R - 4) + "\" y=\"" + px(T + 14.0 * static_cast<double>(k)) +
           "\" text-anchor=\"end\" fill=\"" + colour + "\">" + escape(s.label) + "</text>\n";
  }

  if (c.fit && !c.x.empty()) {
    // The fit lives in natural-log space of both axes.
    const auto [slope, intercept] = *c.fit;
    const auto [xmin, xmax] = std::minmax_element(c.x.begin(), c.x.end());
    const auto yat = [&](double x) { return std::exp(intercept + slope * std::log(x)); };
    if (ax.valid(*xmin) && ay.valid(yat(*xmin))) {
      svg += "<line x1=\"" + px(sx(*xmin)) + "\" y1=\"" + px(sy(yat(*xmin))) + "\" x2=\"" + px(sx(*xmax)) + "\" y2=\"" +
             px(sy(yat(*xmax))) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
      svg += "<text x=\"" + px(L + 8) + "\" y=\"" + px(T + 4) + "\" fill=\"gray\">slope " + num(slope) + "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::PlotWriteFailed, "cannot open " + path.string());
  out << text;
  if (!out) fail(ErrorCode::PlotWriteFailed, "write failed for " + path.string());
}

/// Writes <stem>__<column>__<algorithm>.{svg,csv,pgm} as applicable.
inline std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir, const std::string& file_stem,
                                                     const std::string& column, const std::string& algorithm,
                                                     const AlgorithmOutput& output) {
  std::vector<std::filesystem::path> written;
  const std::string base = file_stem + "__" + column + "__" + algorithm;
  if (output.chart) {
    const auto svg = dir / (base + ".svg");
    write_text_file(svg, chart_svg(*output.chart, file_stem + " / " + column + " / " + algorithm));
    written.push_back(svg);
    const auto csv = dir / (base + ".csv");
    write_text_file(csv, chart_csv(*output.chart));
    written.push_back(csv);
  }
  if (output.recurrence_plot) {
    const auto pgm = dir / (base + ".pgm");
    write_pgm(*output.recurrence_plot, pgm);
    written.push_back(pgm);
  }
  return written;
}

}  // namespace gaitnl::pipeline

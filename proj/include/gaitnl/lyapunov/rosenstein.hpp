#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/kdtree.hpp"
#include "gaitnl/core/numeric.hpp"
#include "gaitnl/lyapunov/mean_period.hpp"
#include "gaitnl/statespace/embedding.hpp"

namespace gaitnl {

struct FitWindow {
  std::size_t first = 0;  // inclusive step
  std::size_t last = 0;   // inclusive step
};

struct RosensteinOptions {
  EmbeddingParams embedding;
  /// Temporal exclusion in samples; estimated from the spectrum when empty.
  std::optional<double> mean_period;
  std::size_t max_steps = 50;
  /// When set, exponents are per second instead of per sample.
  std::optional<double> sample_rate_hz;
};

struct LyeRosensteinResult {
  std::vector<double> divergence;  // mean ln distance per step, 0..max_steps
  std::optional<double> short_exp;
  std::optional<double> local_exp;
  std::optional<double> long_exp;
  std::optional<double> orbital_exp;
  std::array<FitWindow, 4> fit_windows{};  // short, local, long, orbital
  double mean_period = 0.0;
  std::size_t reference_points = 0;
};

namespace detail {

inline std::optional<double> slope_over(std::span<const double> curve, FitWindow w) {
  std::vector<double> xs, ys;
  for (std::size_t k = w.first; k <= w.last && k < curve.size(); ++k) {
    if (!std::isfinite(curve[k])) continue;
    xs.push_back(static_cast<double>(k));
    ys.push_back(curve[k]);
  }
  if (xs.size() < 2) return std::nullopt;
  return numeric::fit_line(xs, ys).slope;
}

inline FitWindow clip_window(std::size_t first, std::size_t last, std::size_t max_step) {
  return {std::min(first, max_step), std::min(last, max_step)};
}

}  // namespace detail

/// Rosenstein divergence curve and four fitted slopes.
///
/// Fit windows, with P the mean period rounded to whole samples:
///   short   = steps 0..P
///   local   = steepest contiguous run of a quarter of the curve
///   long    = P..4P
///   orbital = 4P..10P
/// each clipped to the curve.
inline LyeRosensteinResult lye_rosenstein(std::span<const double> x, const RosensteinOptions& opts) {
  const auto& p = opts.embedding;
  require(p.tau >= 1 && p.dim >= 1 && opts.max_steps >= 1, ErrorCode::InvalidArgument,
          "tau, dim and max_steps must be >= 1");
  require(x.size() >= (p.dim - 1) * p.tau + 1, ErrorCode::SeriesTooShort, "series shorter than one embedding window");
  const std::size_t rows = embedding_rows(x.size(), p);
  require(rows >= opts.max_steps + 100, ErrorCode::SeriesTooShort,
          "need N - (dim-1)*tau - max_steps >= 100, got " +
              std::to_string(static_cast<long long>(rows) - static_cast<long long>(opts.max_steps)));

  LyeRosensteinResult result;
  result.mean_period = opts.mean_period.value_or(mean_period(x));
  require(result.mean_period > 0.0, ErrorCode::InvalidArgument, "mean period must be positive");

  const StateMatrix points = embed(x, p);
  const std::size_t refs = rows - opts.max_steps;
  const KdTree tree(points, refs);
  const double exclusion = result.mean_period;

  std::vector<std::size_t> partner(refs, refs);
  for (std::size_t i = 0; i < refs; ++i) {
    const auto nn = tree.nearest(points.row(i), [&](std::size_t j) {
      return static_cast<double>(i > j ? i - j : j - i) > exclusion;
    });
    if (nn.found()) partner[i] = nn.index;
  }
  result.reference_points = static_cast<std::size_t>(std::count_if(partner.begin(), partner.end(),
                                                                   [&](std::size_t j) { return j < refs; }));
  require(result.reference_points > 0, ErrorCode::NoValidNeighbors,
          "temporal exclusion of " + std::to_string(exclusion) + " samples leaves no neighbours");

  result.divergence.resize(opts.max_steps + 1);
  std::vector<double> logs;
  logs.reserve(refs);
  for (std::size_t k = 0; k <= opts.max_steps; ++k) {
    logs.clear();
    for (std::size_t i = 0; i < refs; ++i) {
      if (partner[i] >= refs) continue;
      const double d = std::sqrt(squared_distance(points.row(i + k), points.row(partner[i] + k)));
      if (d > 0.0) logs.push_back(std::log(d));
    }
    result.divergence[k] = logs.empty() ? std::numeric_limits<double>::quiet_NaN() : numeric::mean(logs);
  }

  const std::size_t period = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(result.mean_period)));
  const std::size_t last = opts.max_steps;
  result.fit_windows[0] = detail::clip_window(0, period, last);
  result.fit_windows[2] = detail::clip_window(period, 4 * period, last);
  result.fit_windows[3] = detail::clip_window(4 * period, 10 * period, last);

  const std::size_t quarter = std::max<std::size_t>(2, (last + 1) / 4);
  std::optional<double> steepest;
  FitWindow steepest_window{0, std::min(quarter - 1, last)};
  for (std::size_t start = 0; start + quarter - 1 <= last; ++start) {
    const FitWindow w{start, start + quarter - 1};
    const auto s = detail::slope_over(result.divergence, w);
    if (s && (!steepest || *s > *steepest)) {
      steepest = s;
      steepest_window = w;
    }
  }
  result.fit_windows[1] = steepest_window;

  const double scale = opts.sample_rate_hz.value_or(1.0);
  const auto fit = [&](const FitWindow& w) -> std::optional<double> {
    if (w.last <= w.first) return std::nullopt;
    const auto s = detail::slope_over(result.divergence, w);
    if (!s) return std::nullopt;
    return *s * scale;
  };
  result.short_exp = fit(result.fit_windows[0]);
  result.local_exp = fit(result.fit_windows[1]);
  result.long_exp = fit(result.fit_windows[2]);
  result.orbital_exp = fit(result.fit_windows[3]);
  return result;
}

}  // namespace gaitnl

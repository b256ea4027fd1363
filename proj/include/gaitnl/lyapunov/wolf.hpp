#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/kdtree.hpp"
#include "gaitnl/lyapunov/mean_period.hpp"
#include "gaitnl/statespace/embedding.hpp"

namespace gaitnl {

struct WolfOptions {
  EmbeddingParams embedding;
  std::size_t evolve_steps = 3;
  /// Defaults: 1% and 10% of the attractor extent (series range * sqrt(dim)).
  std::optional<double> scale_min;
  std::optional<double> scale_max;
  /// Temporal exclusion for neighbour candidates; mean period when empty.
  std::optional<double> exclusion;
  std::optional<double> sample_rate_hz;
};

struct LyeWolfResult {
  double largest_exponent = 0.0;
  std::size_t replacements = 0;
  std::size_t evolution_steps = 0;
  double scale_min = 0.0;
  double scale_max = 0.0;
};

/// Orientation limits (radians) tried in turn when replacing a neighbour.
inline constexpr std::array<double, 3> kWolfAngleLimits = {0.3, 0.6, 3.14159265358979323846};

/// Wolf fixed-evolution-time estimate of the largest Lyapunov exponent.
///
/// The fiducial trajectory and one neighbour are evolved `evolve_steps`
/// samples at a time; the log stretch of their separation is accumulated.
/// When the separation exceeds scale_max the neighbour is replaced by the
/// closest point in [scale_min, scale_max] whose direction deviates least
/// from the old separation, widening the allowed angle over three passes.
inline LyeWolfResult lye_wolf(std::span<const double> x, const WolfOptions& opts) {
  const auto& p = opts.embedding;
  require(p.tau >= 1 && p.dim >= 1 && opts.evolve_steps >= 1, ErrorCode::InvalidArgument,
          "tau, dim and evolve_steps must be >= 1");
  require(x.size() >= (p.dim - 1) * p.tau + 1, ErrorCode::SeriesTooShort, "series shorter than one embedding window");
  const std::size_t rows = embedding_rows(x.size(), p);
  require(rows >= opts.evolve_steps + 100, ErrorCode::SeriesTooShort,
          "need at least evolve_steps + 100 embedded points");

  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double extent = (*hi - *lo) * std::sqrt(static_cast<double>(p.dim));
  require(extent > 0.0, ErrorCode::DegenerateSeries, "zero-range series");

  LyeWolfResult result;
  result.scale_min = opts.scale_min.value_or(0.01 * extent);
  result.scale_max = opts.scale_max.value_or(0.1 * extent);
  require(result.scale_min > 0.0 && result.scale_max > result.scale_min, ErrorCode::InvalidArgument,
          "need 0 < scale_min < scale_max");
  const double exclusion = opts.exclusion.value_or(mean_period(x));

  const StateMatrix points = embed(x, p);
  const std::size_t step = opts.evolve_steps;
  const std::size_t usable = rows - step;  // candidates must be able to evolve
  const KdTree tree(points, usable);

  const auto gap = [](std::size_t a, std::size_t b) { return static_cast<double>(a > b ? a - b : b - a); };

  // Closest admissible candidate within the angle limit of `direction`
  // (any direction when `direction` is empty).
  const auto find_neighbor = [&](std::size_t fiducial, std::span<const double> direction) -> std::optional<std::size_t> {
    const auto origin = points.row(fiducial);
    double dir_norm = 0.0;
    for (double v : direction) dir_norm += v * v;
    dir_norm = std::sqrt(dir_norm);
    for (double limit : kWolfAngleLimits) {
      std::optional<std::size_t> best;
      double best_d2 = std::numeric_limits<double>::infinity();
      tree.within(origin, result.scale_max, [&](std::size_t k, double d2) {
        if (gap(k, fiducial) <= exclusion) return;
        const double d = std::sqrt(d2);
        if (d < result.scale_min) return;
        if (dir_norm > 0.0) {
          const auto pk = points.row(k);
          double dot = 0.0;
          for (std::size_t c = 0; c < origin.size(); ++c) dot += (pk[c] - origin[c]) * direction[c];
          const double angle = std::acos(std::clamp(dot / (d * dir_norm), -1.0, 1.0));
          if (angle > limit) return;
        }
        if (d2 < best_d2 || (d2 == best_d2 && k < *best)) {
          best_d2 = d2;
          best = k;
        }
      });
      if (best || dir_norm == 0.0) return best;
    }
    return std::nullopt;
  };

  std::size_t fiducial = 0;
  auto first = find_neighbor(fiducial, {});
  if (!first) fail(ErrorCode::NoReplacementFound, "no initial neighbour within [scale_min, scale_max]");
  std::size_t neighbor = *first;

  double log_sum = 0.0;
  std::vector<double> direction(p.dim);
  while (fiducial + step < rows && neighbor + step < rows) {
    const double before = std::sqrt(squared_distance(points.row(fiducial), points.row(neighbor)));
    fiducial += step;
    neighbor += step;
    const double after = std::sqrt(squared_distance(points.row(fiducial), points.row(neighbor)));
    if (before > 0.0 && after > 0.0) {
      log_sum += std::log(after / before);
      result.evolution_steps += step;
    }
    if (fiducial >= usable) break;
    if (after > result.scale_max || after == 0.0) {
      const auto origin = points.row(fiducial);
      const auto old = points.row(neighbor);
      for (std::size_t c = 0; c < p.dim; ++c) direction[c] = old[c] - origin[c];
      const auto replacement = find_neighbor(fiducial, direction);
      if (!replacement) {
        fail(ErrorCode::NoReplacementFound,
             "no replacement neighbour near point " + std::to_string(fiducial) + " after widening the angle limit");
      }
      neighbor = *replacement;
      ++result.replacements;
    }
  }
  require(result.evolution_steps > 0, ErrorCode::SeriesTooShort, "no evolution step could be measured");
  const double dt = opts.sample_rate_hz ? 1.0 / *opts.sample_rate_hz : 1.0;
  result.largest_exponent = log_sum / (static_cast<double>(result.evolution_steps) * dt);
  return result;
}

}  // namespace gaitnl

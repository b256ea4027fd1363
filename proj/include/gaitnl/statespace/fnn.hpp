#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/kdtree.hpp"
#include "gaitnl/core/numeric.hpp"
#include "gaitnl/statespace/embedding.hpp"

namespace gaitnl {

struct FnnOptions {
  std::size_t max_dim = 10;
  double r_tol = 15.0;
  double a_tol = 2.0;
  double drop_threshold = 0.01;
  /// Candidates with |i - j| <= theiler are skipped; defaults to tau.
  std::optional<std::size_t> theiler;
};

struct FnnCurve {
  std::vector<std::size_t> dims;
  std::vector<double> fractions;
  std::size_t selected_dim = 0;
  /// False when no dimension dropped below the threshold (selected = max_dim).
  bool converged = false;
};

/// Distances below this fraction of sigma are roundoff: an exactly periodic
/// series revisits a state at ~1e-15, where the ratio test would compare
/// rounding error with rounding error.
inline constexpr double kFnnDistanceFloor = 1e-9;

/// Decides whether a nearest neighbour at distance `dist` in dimension d turns
/// false once the next delay coordinate (difference `extra`) is added.
inline bool is_false_neighbor(double dist, double extra, double sigma, double r_tol, double a_tol) {
  const bool ratio_test = extra > r_tol * std::max(dist, kFnnDistanceFloor * sigma);
  const bool size_test = std::sqrt(dist * dist + extra * extra) / sigma > a_tol;
  return ratio_test || size_test;
}

/// Kennel false-nearest-neighbour fractions for dims 1..max_dim.
inline FnnCurve fnn(std::span<const double> x, std::size_t tau, const FnnOptions& opts = {}) {
  require(tau >= 1 && opts.max_dim >= 1, ErrorCode::InvalidArgument, "tau and max_dim must be >= 1");
  require(x.size() > opts.max_dim * tau + 1, ErrorCode::SeriesTooShort,
          "need more than max_dim*tau+1 = " + std::to_string(opts.max_dim * tau + 1) + " samples");
  const double sigma = numeric::stddev(x);
  require(sigma > 0.0, ErrorCode::DegenerateSeries, "zero-variance series");
  const std::size_t theiler = opts.theiler.value_or(tau);

  FnnCurve curve;
  for (std::size_t d = 1; d <= opts.max_dim; ++d) {
    // Only points whose (d+1)-th delay coordinate exists take part.
    const std::size_t m = x.size() - d * tau;
    const StateMatrix points = embed(x.first(m + (d - 1) * tau), {tau, d});
    const KdTree tree(points, m);
    std::size_t total = 0;
    std::size_t false_count = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto nn = tree.nearest(points.row(i), [&](std::size_t j) { return (i > j ? i - j : j - i) > theiler; });
      if (!nn.found()) continue;
      ++total;
      const double extra = std::abs(x[i + d * tau] - x[nn.index + d * tau]);
      if (is_false_neighbor(nn.distance(), extra, sigma, opts.r_tol, opts.a_tol)) ++false_count;
    }
    require(total > 0, ErrorCode::SeriesTooShort, "no admissible neighbours at dim " + std::to_string(d));
    curve.dims.push_back(d);
    curve.fractions.push_back(static_cast<double>(false_count) / static_cast<double>(total));
  }
  curve.selected_dim = opts.max_dim;
  for (std::size_t k = 0; k < curve.fractions.size(); ++k) {
    if (curve.fractions[k] < opts.drop_threshold) {
      curve.selected_dim = curve.dims[k];
      curve.converged = true;
      break;
    }
  }
  return curve;
}

}  // namespace gaitnl

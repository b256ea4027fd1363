#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/statespace/embedding.hpp"

namespace gaitnl {

enum class Norm : std::uint32_t { Euclidean = 0, Chebyshev = 1, Manhattan = 2 };

constexpr std::string_view norm_name(Norm n) {
  switch (n) {
    case Norm::Euclidean: return "euclidean";
    case Norm::Chebyshev: return "chebyshev";
    case Norm::Manhattan: return "manhattan";
  }
  return "?";
}

inline Norm parse_norm(std::string_view s) {
  if (s == "euclidean") return Norm::Euclidean;
  if (s == "chebyshev" || s == "max") return Norm::Chebyshev;
  if (s == "manhattan") return Norm::Manhattan;
  fail(ErrorCode::InvalidArgument, "unknown norm '" + std::string(s) + "'");
}

inline double distance(std::span<const double> a, std::span<const double> b, Norm norm) {
  double acc = 0.0;
  switch (norm) {
    case Norm::Euclidean:
      for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
      return std::sqrt(acc);
    case Norm::Chebyshev:
      for (std::size_t k = 0; k < a.size(); ++k) acc = std::max(acc, std::abs(a[k] - b[k]));
      return acc;
    case Norm::Manhattan:
      for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
      return acc;
  }
  return acc;
}

/// Number of strictly-upper-triangle cells of an n x n matrix.
constexpr std::uint64_t triangle_cells(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

/// Bytes of packed storage for the recurrence bits of n points.
constexpr std::uint64_t packed_bytes(std::uint64_t n) { return (triangle_cells(n) + 63) / 64 * 8; }

/// Bytes a full RQA run needs for n points: bits, per-point strengths and
/// the two line-length histograms.
constexpr std::uint64_t rqa_estimated_bytes(std::uint64_t n) { return packed_bytes(n) + 8 * n + 2 * 8 * (n + 1); }

/// Off-band cells (both triangles) for n points and a Theiler window w.
constexpr std::uint64_t offband_cells(std::uint64_t n, std::uint64_t w) {
  if (n <= w + 1) return 0;
  const std::uint64_t m = n - w - 1;  // diagonals k = w+1 .. n-1 have n-k cells
  return m * (m + 1);
}

struct RecurrenceOptions {
  Norm norm = Norm::Euclidean;
  std::size_t theiler_window = 0;
  /// Refuse to allocate when rqa_estimated_bytes(n) exceeds this.
  std::optional<std::uint64_t> memory_budget_bytes;
  /// Per-point weighted recurrence strengths sum_j exp(-d(i,j)).
  bool compute_strengths = true;
};

/// Symmetric boolean recurrence matrix. Only the strict upper triangle is
/// stored, one bit per cell, in row-major triangle order; reads mirror it.
/// Cells within the Theiler band are false, except the line of identity,
/// which is true when the window is zero.
class RecurrencePlot {
 public:
  RecurrencePlot() = default;
  RecurrencePlot(std::size_t n, double radius, Norm norm, std::size_t theiler, std::vector<std::uint64_t> words,
                 std::vector<double> strengths = {})
      : n_(n), radius_(radius), norm_(norm), theiler_(theiler), words_(std::move(words)),
        strengths_(std::move(strengths)) {
    require(words_.size() * 8 == packed_bytes(n_), ErrorCode::InvalidArgument, "packed word count mismatch");
  }

  std::size_t n_points() const noexcept { return n_; }
  double radius() const noexcept { return radius_; }
  Norm norm() const noexcept { return norm_; }
  std::size_t theiler_window() const noexcept { return theiler_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<const double> strengths() const noexcept { return strengths_; }
  std::uint64_t storage_bytes() const noexcept { return words_.size() * sizeof(std::uint64_t); }

  /// Triangle bit index of cell (i, j), i < j.
  std::uint64_t triangle_index(std::uint64_t i, std::uint64_t j) const noexcept {
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
  }

  bool triangle_bit(std::uint64_t idx) const noexcept { return (words_[idx >> 6] >> (idx & 63)) & 1u; }

  bool operator()(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return theiler_ == 0;
    const std::size_t lo = std::min(i, j);
    const std::size_t hi = std::max(i, j);
    if (hi - lo <= theiler_) return false;
    return triangle_bit(triangle_index(lo, hi));
  }

  /// Recurrent cells outside the band, counting both triangles.
  std::uint64_t offband_recurrences() const noexcept {
    std::uint64_t c = 0;
    for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return 2 * c;
  }

  /// Recurrent cells including the line of identity.
  std::uint64_t total_recurrences() const noexcept { return offband_recurrences() + (theiler_ == 0 ? n_ : 0); }

 private:
  std::size_t n_ = 0;
  double radius_ = 0.0;
  Norm norm_ = Norm::Euclidean;
  std::size_t theiler_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<double> strengths_;
};

/// Builds the recurrence plot in cache-sized tiles of the upper triangle.
inline RecurrencePlot recurrence_plot(const StateMatrix& points, double radius, const RecurrenceOptions& opts = {}) {
  require(points.rows() >= 2, ErrorCode::EmptyStateMatrix, "need at least 2 points");
  require(radius >= 0.0 && std::isfinite(radius), ErrorCode::InvalidArgument, "radius must be finite and >= 0");
  const std::size_t n = points.rows();
  const std::uint64_t needed = rqa_estimated_bytes(n);
  if (opts.memory_budget_bytes && needed > *opts.memory_budget_bytes) {
    throw MemoryBudgetError(needed, *opts.memory_budget_bytes);
  }

  std::vector<std::uint64_t> words(packed_bytes(n) / 8, 0);
  std::vector<double> strengths(opts.compute_strengths ? n : 0, 0.0);
  const std::size_t w = opts.theiler_window;
  constexpr std::size_t kTile = 256;
  for (std::size_t ib = 0; ib < n; ib += kTile) {
    const std::size_t ie = std::min(n, ib + kTile);
    for (std::size_t jb = ib; jb < n; jb += kTile) {
      const std::size_t je = std::min(n, jb + kTile);
      for (std::size_t i = ib; i < ie; ++i) {
        const auto pi = points.row(i);
        const std::size_t j0 = std::max(jb, i + w + 1);
        if (j0 >= je) continue;
        std::uint64_t idx = static_cast<std::uint64_t>(i) * n - static_cast<std::uint64_t>(i) * (i + 1) / 2 + (j0 - i - 1);
        for (std::size_t j = j0; j < je; ++j, ++idx) {
          const double d = distance(pi, points.row(j), opts.norm);
          if (d <= radius) words[idx >> 6] |= std::uint64_t{1} << (idx & 63);
          if (opts.compute_strengths) {
            const double e = std::exp(-d);
            strengths[i] += e;
            strengths[j] += e;
          }
        }
      }
    }
  }
  return RecurrencePlot(n, radius, opts.norm, w, std::move(words), std::move(strengths));
}

/// Recurrence rate (percent of off-band cells) at a radius, without storing
/// the matrix.
inline double recurrence_rate_at(const StateMatrix& points, double radius, Norm norm, std::size_t theiler) {
  const std::size_t n = points.rows();
  const std::uint64_t cells = offband_cells(n, theiler);
  if (cells == 0) return 0.0;
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto pi = points.row(i);
    for (std::size_t j = i + theiler + 1; j < n; ++j) {
      if (distance(pi, points.row(j), norm) <= radius) ++hits;
    }
  }
  return 100.0 * static_cast<double>(2 * hits) / static_cast<double>(cells);
}

inline double max_pairwise_distance(const StateMatrix& points, Norm norm, std::size_t theiler) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto pi = points.row(i);
    for (std::size_t j = i + theiler + 1; j < points.rows(); ++j) best = std::max(best, distance(pi, points.row(j), norm));
  }
  return best;
}

struct RadiusSearch {
  double radius = 0.0;
  double achieved_pct = 0.0;
  std::size_t iterations = 0;
};

inline constexpr std::size_t kRadiusBisectionCap = 60;

/// Bisects the radius on [0, max distance] until the recurrence rate is
/// within `tolerance_pct` of the target. Throws UnreachableRateError with the
/// closest radius seen when the cap is hit first.
inline RadiusSearch radius_from_recurrence(const StateMatrix& points, double target_pct, double tolerance_pct,
                                           Norm norm = Norm::Euclidean, std::size_t theiler = 0) {
  require(points.rows() >= 2, ErrorCode::EmptyStateMatrix, "need at least 2 points");
  require(target_pct > 0.0 && target_pct <= 100.0, ErrorCode::InvalidArgument, "target must be in (0, 100]");
  require(tolerance_pct > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
  require(offband_cells(points.rows(), theiler) > 0, ErrorCode::EmptyStateMatrix, "Theiler window covers every cell");

  const double dmax = max_pairwise_distance(points, norm, theiler);
  if (target_pct >= 100.0) return {dmax, 100.0, 0};

  double lo = 0.0;
  double hi = dmax;
  RadiusSearch best{dmax, 100.0, 0};
  for (std::size_t it = 1; it <= kRadiusBisectionCap; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double rate = recurrence_rate_at(points, mid, norm, theiler);
    if (std::abs(rate - target_pct) < std::abs(best.achieved_pct - target_pct)) best = {mid, rate, it};
    if (std::abs(rate - target_pct) <= tolerance_pct && mid > 0.0) return {mid, rate, it};
    if (rate < target_pct) lo = mid;
    else hi = mid;
  }
  throw UnreachableRateError(target_pct, best.radius, best.achieved_pct);
}

}  // namespace gaitnl

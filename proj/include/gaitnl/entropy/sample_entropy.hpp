#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/numeric.hpp"

namespace gaitnl {

/// Template length m and tolerance r (fraction of the series std).
struct EntropyParams {
  std::size_t m = 2;
  double r = 0.2;
};

/// Absolute tolerances never drop below this, so zero-variance input still
/// matches itself instead of producing 0/0.
inline constexpr double kToleranceFloor = 1e-12;

inline double absolute_tolerance(std::span<const double> x, double r) {
  return std::max(r * numeric::stddev(x), kToleranceFloor);
}

struct MatchCounts {
  std::uint64_t a = 0;  // pairs matching at length m+1
  std::uint64_t b = 0;  // pairs matching at length m
};

/// Counts template pairs i < j among the first N-m templates under the
/// Chebyshev distance, excluding self-matches.
inline MatchCounts count_template_matches(std::span<const double> x, std::size_t m, double tolerance) {
  MatchCounts c;
  if (x.size() <= m) return c;
  const std::size_t n = x.size() - m;
  const double* v = x.data();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::size_t k = 0;
      while (k < m && std::abs(v[i + k] - v[j + k]) <= tolerance) ++k;
      if (k < m) continue;
      ++c.b;
      if (std::abs(v[i + m] - v[j + m]) <= tolerance) ++c.a;
    }
  }
  return c;
}

/// -ln(A/B); empty when either count is zero.
inline std::optional<double> entropy_from_counts(const MatchCounts& c) {
  if (c.a == 0 || c.b == 0) return std::nullopt;
  return -std::log(static_cast<double>(c.a) / static_cast<double>(c.b));
}

inline std::optional<double> sample_entropy_abs(std::span<const double> x, std::size_t m, double tolerance) {
  return entropy_from_counts(count_template_matches(x, m, tolerance));
}

/// Richman-Moorman sample entropy. Returns nullopt (undefined) when no
/// template pairs match at length m or m+1.
inline std::optional<double> sample_entropy(std::span<const double> x, const EntropyParams& p = {}) {
  require(p.m >= 1 && p.r > 0.0, ErrorCode::InvalidArgument, "need m >= 1 and r > 0");
  require(x.size() >= p.m + 2, ErrorCode::SeriesTooShort,
          "sample entropy needs at least m+2 = " + std::to_string(p.m + 2) + " samples");
  return sample_entropy_abs(x, p.m, absolute_tolerance(x, p.r));
}

}  // namespace gaitnl

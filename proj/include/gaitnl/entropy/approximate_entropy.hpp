#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/numeric.hpp"
#include "gaitnl/entropy/sample_entropy.hpp"

namespace gaitnl {

namespace detail {

inline bool chebyshev_match(const double* a, const double* b, std::size_t len, double tol) {
  for (std::size_t k = 0; k < len; ++k) {
    if (std::abs(a[k] - b[k]) > tol) return false;
  }
  return true;
}

/// phi = mean_i ln(count_i / n_templates). Zero counts are raised to one,
/// which only matters for cross matching (self-matching always counts one).
inline double phi_from_counts(const std::vector<std::uint64_t>& counts) {
  const double n = static_cast<double>(counts.size());
  std::vector<double> logs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    logs[i] = std::log(static_cast<double>(std::max<std::uint64_t>(counts[i], 1)) / n);
  }
  return numeric::pairwise_sum(logs) / n;
}

/// phi_m - phi_{m+1} with templates of `source` matched against `target`.
inline double approximate_entropy_kernel(std::span<const double> source, std::span<const double> target,
                                         std::size_t m, double tol) {
  const std::size_t n = source.size();
  double phi[2];
  for (std::size_t len : {m, m + 1}) {
    const std::size_t templates = n - len + 1;
    std::vector<std::uint64_t> counts(templates, 0);
    for (std::size_t i = 0; i < templates; ++i) {
      for (std::size_t j = 0; j < templates; ++j) {
        if (chebyshev_match(source.data() + i, target.data() + j, len, tol)) ++counts[i];
      }
    }
    phi[len - m] = phi_from_counts(counts);
  }
  return phi[0] - phi[1];
}

/// Self-matching variant exploiting symmetry: each pair is tested once.
inline double approximate_entropy_self(std::span<const double> x, std::size_t m, double tol) {
  const std::size_t n = x.size();
  std::vector<std::uint64_t> cm(n - m + 1, 1);  // self-match
  std::vector<std::uint64_t> cm1(n - m, 1);
  const double* v = x.data();
  for (std::size_t i = 0; i + 1 < cm.size(); ++i) {
    for (std::size_t j = i + 1; j < cm.size(); ++j) {
      std::size_t k = 0;
      while (k < m && std::abs(v[i + k] - v[j + k]) <= tol) ++k;
      if (k < m) continue;
      ++cm[i];
      ++cm[j];
      if (j < cm1.size() && std::abs(v[i + m] - v[j + m]) <= tol) {
        ++cm1[i];
        ++cm1[j];
      }
    }
  }
  return phi_from_counts(cm) - phi_from_counts(cm1);
}

inline std::vector<double> zscore(std::span<const double> x) {
  const double mu = numeric::mean(x);
  const double sd = numeric::stddev(x);
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = sd > 0.0 ? (x[i] - mu) / sd : x[i] - mu;
  return z;
}

}  // namespace detail

/// Pincus approximate entropy (self-matches included), Chebyshev distance,
/// tolerance r times the series std.
inline double approximate_entropy(std::span<const double> x, const EntropyParams& p = {}) {
  require(p.m >= 1 && p.r > 0.0, ErrorCode::InvalidArgument, "need m >= 1 and r > 0");
  require(x.size() >= p.m + 2, ErrorCode::SeriesTooShort,
          "approximate entropy needs at least m+2 = " + std::to_string(p.m + 2) + " samples");
  return detail::approximate_entropy_self(x, p.m, absolute_tolerance(x, p.r));
}

/// Cross approximate entropy of x-templates against y-templates. Both series
/// are z-scored independently and r applies in z units. A template with no
/// match in y is counted as one match.
inline double cross_approximate_entropy(std::span<const double> x, std::span<const double> y,
                                        const EntropyParams& p = {}) {
  require(p.m >= 1 && p.r > 0.0, ErrorCode::InvalidArgument, "need m >= 1 and r > 0");
  require(x.size() == y.size(), ErrorCode::LengthMismatch,
          "series lengths differ: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  require(x.size() >= p.m + 2, ErrorCode::SeriesTooShort,
          "cross approximate entropy needs at least m+2 = " + std::to_string(p.m + 2) + " samples");
  const auto zx = detail::zscore(x);
  const auto zy = detail::zscore(y);
  return detail::approximate_entropy_kernel(zx, zy, p.m, std::max(p.r, kToleranceFloor));
}

}  // namespace gaitnl

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/numeric.hpp"

namespace gaitnl {

struct DfaOptions {
  /// Empty selects 16 log-spaced sizes from 8 to N/9.
  std::vector<std::size_t> box_sizes;
  std::size_t detrend_order = 1;
  /// Inclusive [min_box, max_box] used for the exponent; all boxes if empty.
  std::optional<std::pair<std::size_t, std::size_t>> fit_range;
};

struct DfaResult {
  double alpha = 0.0;
  double intercept = 0.0;
  double fit_r2 = 0.0;
  std::vector<std::size_t> box_sizes;
  std::vector<double> fluctuations;
  std::pair<std::size_t, std::size_t> fit_range{0, 0};
};

inline constexpr std::size_t kAutoBoxCount = 16;
inline constexpr std::size_t kAutoMinBox = 8;

inline std::vector<std::size_t> auto_box_sizes(std::size_t n) {
  const std::size_t hi = n / 9;
  require(hi >= kAutoMinBox, ErrorCode::SeriesTooShort,
          "automatic box sizes need at least 72 samples, got " + std::to_string(n));
  std::vector<std::size_t> sizes;
  const double a = std::log(static_cast<double>(kAutoMinBox));
  const double b = std::log(static_cast<double>(hi));
  for (std::size_t k = 0; k < kAutoBoxCount; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(kAutoBoxCount - 1);
    sizes.push_back(static_cast<std::size_t>(std::lround(std::exp(a + t * (b - a)))));
  }
  sizes.front() = kAutoMinBox;
  sizes.back() = hi;
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  return sizes;
}

/// Cumulative sum of the mean-removed series.
inline std::vector<double> dfa_profile(std::span<const double> x) {
  const double mu = numeric::mean(x);
  std::vector<double> y(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += x[i] - mu;
    y[i] = acc;
  }
  return y;
}

namespace detail {

/// Orthonormal basis (column k = degree k) of polynomials on t = 0..n-1.
inline std::vector<std::vector<double>> orthonormal_polynomials(std::size_t n, std::size_t order) {
  std::vector<std::vector<double>> basis;
  const double centre = 0.5 * static_cast<double>(n - 1);
  const double half = std::max(centre, 1.0);
  for (std::size_t k = 0; k <= order; ++k) {
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) v[t] = std::pow((static_cast<double>(t) - centre) / half, static_cast<double>(k));
    // Two Gram-Schmidt passes keep the basis orthogonal to working precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        double dot = 0.0;
        for (std::size_t t = 0; t < n; ++t) dot += q[t] * v[t];
        for (std::size_t t = 0; t < n; ++t) v[t] -= dot * q[t];
      }
    }
    double norm = 0.0;
    for (double e : v) norm += e * e;
    norm = std::sqrt(norm);
    for (double& e : v) e /= norm;
    basis.push_back(std::move(v));
  }
  return basis;
}

inline double residual_sum_of_squares(std::span<const double> segment, const std::vector<std::vector<double>>& basis,
                                      std::vector<double>& work) {
  work.assign(segment.begin(), segment.end());
  for (const auto& q : basis) {
    double c = 0.0;
    for (std::size_t t = 0; t < work.size(); ++t) c += q[t] * work[t];
    for (std::size_t t = 0; t < work.size(); ++t) work[t] -= c * q[t];
  }
  double ss = 0.0;
  for (double r : work) ss += r * r;
  return ss;
}

}  // namespace detail

/// F(n): RMS residual of order-`order` polynomial fits over non-overlapping
/// boxes of size n, taken from both ends of the profile.
inline double dfa_fluctuation(std::span<const double> profile, std::size_t box, std::size_t order) {
  const std::size_t n = profile.size();
  const std::size_t boxes = n / box;
  const auto basis = detail::orthonormal_polynomials(box, order);
  std::vector<double> ss;
  ss.reserve(2 * boxes);
  std::vector<double> work;
  for (std::size_t b = 0; b < boxes; ++b) ss.push_back(detail::residual_sum_of_squares(profile.subspan(b * box, box), basis, work));
  for (std::size_t b = 0; b < boxes; ++b) {
    ss.push_back(detail::residual_sum_of_squares(profile.subspan(n - (b + 1) * box, box), basis, work));
  }
  return std::sqrt(numeric::pairwise_sum(ss) / static_cast<double>(2 * boxes * box));
}

/// Detrended fluctuation analysis. alpha is the least-squares slope of
/// ln F(n) against ln n over the fit range.
inline DfaResult dfa(std::span<const double> x, const DfaOptions& opts = {}) {
  require(opts.detrend_order >= 1, ErrorCode::InvalidArgument, "detrend_order must be >= 1");
  std::vector<std::size_t> sizes = opts.box_sizes.empty() ? auto_box_sizes(x.size()) : opts.box_sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  require(sizes.front() >= opts.detrend_order + 2, ErrorCode::InvalidArgument,
          "box sizes must exceed detrend_order + 1");
  require(x.size() >= 4 * sizes.back(), ErrorCode::SeriesTooShort,
          "need at least 4*max(box) = " + std::to_string(4 * sizes.back()) + " samples");

  const auto profile = dfa_profile(x);
  double profile_scale = 0.0;
  for (double v : profile) profile_scale = std::max(profile_scale, std::abs(v));

  DfaResult result;
  result.box_sizes = sizes;
  for (std::size_t box : sizes) result.fluctuations.push_back(dfa_fluctuation(profile, box, opts.detrend_order));

  const auto range = opts.fit_range.value_or(std::make_pair(sizes.front(), sizes.back()));
  result.fit_range = range;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] < range.first || sizes[k] > range.second) continue;
    const double f = result.fluctuations[k];
    if (!std::isfinite(f) || f <= 1e-10 * profile_scale) {
      fail(ErrorCode::DegenerateFit, "F(" + std::to_string(sizes[k]) + ") vanishes after detrending");
    }
    lx.push_back(std::log(static_cast<double>(sizes[k])));
    ly.push_back(std::log(f));
  }
  require(lx.size() >= 3, ErrorCode::DegenerateFit, "fewer than 3 box sizes in the fit range");
  const auto fit = numeric::fit_line(lx, ly);
  result.alpha = fit.slope;
  result.intercept = fit.intercept;
  result.fit_r2 = fit.r2;
  return result;
}

}  // namespace gaitnl

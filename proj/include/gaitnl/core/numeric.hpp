#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace gaitnl::numeric {

/// Pairwise (cascade) summation. The split points depend only on the length,
/// so the result is bitwise reproducible for a given input.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double mean(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return pairwise_sum(values) / static_cast<double>(values.size());
}

/// Population standard deviation (divides by N).
inline double stddev(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double mu = mean(values);
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mu;
    sq[i] = d * d;
  }
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(values.size()));
}

inline double median(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

struct LinearFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
};

/// Ordinary least squares y = intercept + slope * x. Needs at least two
/// distinct abscissae, otherwise the fields stay NaN.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  LinearFit fit;
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return fit;
  const double mx = mean(x.first(n));
  const double my = mean(y.first(n));
  std::vector<double> sxx(n), sxy(n), syy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx[i] = dx * dx;
    sxy[i] = dx * dy;
    syy[i] = dy * dy;
  }
  const double Sxx = pairwise_sum(sxx);
  const double Sxy = pairwise_sum(sxy);
  const double Syy = pairwise_sum(syy);
  if (Sxx <= 0.0) return fit;
  fit.slope = Sxy / Sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = Syy > 0.0 ? std::clamp((Sxy * Sxy) / (Sxx * Syy), 0.0, 1.0) : 1.0;
  return fit;
}

inline bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace gaitnl::numeric

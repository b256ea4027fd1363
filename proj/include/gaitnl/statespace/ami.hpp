#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitnl/core/error.hpp"

namespace gaitnl {

struct AmiCurve {
  std::vector<std::size_t> lags;
  std::vector<double> values;  // nats
  std::size_t selected_lag = 0;
  bool minimum_found = false;
};

inline constexpr std::size_t kDefaultAmiBins = 16;

namespace detail {

/// Equal-width bin index over [lo, hi] with `bins` bins; hi falls in the last.
inline std::vector<std::uint32_t> bin_indices(std::span<const double> v, std::size_t bins) {
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  std::vector<std::uint32_t> idx(v.size());
  const double scale = static_cast<double>(bins) / range;
  for (std::size_t t = 0; t < v.size(); ++t) {
    const auto b = static_cast<std::size_t>((v[t] - lo) * scale);
    idx[t] = static_cast<std::uint32_t>(std::min(b, bins - 1));
  }
  return idx;
}

inline bool has_spread(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi > *lo;
}

}  // namespace detail

/// First local minimum: smallest l >= 1 with v[l-1] > v[l] <= v[l+1].
inline std::optional<std::size_t> first_local_minimum(std::span<const double> v) {
  for (std::size_t l = 1; l + 1 < v.size(); ++l) {
    if (v[l - 1] > v[l] && v[l] <= v[l + 1]) return l;
  }
  return std::nullopt;
}

/// Mutual information between x[t] and y[t+lag] for lag = 0..max_lag, from
/// equal-width joint histograms with `n_bins` bins per axis. Bin edges come
/// from the full range of each series, so they are shared by every lag.
inline AmiCurve ami(std::span<const double> x, std::span<const double> y, std::size_t max_lag,
                    std::size_t n_bins = kDefaultAmiBins) {
  require(x.size() == y.size(), ErrorCode::LengthMismatch,
          "series lengths differ: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  require(n_bins >= 1, ErrorCode::InvalidArgument, "n_bins must be >= 1");
  require(x.size() >= 4 * n_bins, ErrorCode::SeriesTooShort,
          "need at least 4*n_bins = " + std::to_string(4 * n_bins) + " samples");
  require(max_lag >= 1 && 2 * max_lag < x.size(), ErrorCode::InvalidArgument,
          "max_lag must be in [1, len/2), got " + std::to_string(max_lag));
  require(detail::has_spread(x) && detail::has_spread(y), ErrorCode::DegenerateSeries,
          "zero-variance series collapses the histogram");

  const auto bx = detail::bin_indices(x, n_bins);
  const auto by = detail::bin_indices(y, n_bins);
  const std::size_t n = x.size();

  AmiCurve curve;
  curve.lags.resize(max_lag + 1);
  curve.values.resize(max_lag + 1);
  std::vector<std::uint32_t> joint(n_bins * n_bins);
  std::vector<std::uint32_t> mx(n_bins), my(n_bins);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    std::fill(joint.begin(), joint.end(), 0u);
    std::fill(mx.begin(), mx.end(), 0u);
    std::fill(my.begin(), my.end(), 0u);
    const std::size_t pairs = n - lag;
    for (std::size_t t = 0; t < pairs; ++t) {
      ++joint[bx[t] * n_bins + by[t + lag]];
      ++mx[bx[t]];
      ++my[by[t + lag]];
    }
    const double total = static_cast<double>(pairs);
    double mi = 0.0;
    for (std::size_t i = 0; i < n_bins; ++i) {
      for (std::size_t j = 0; j < n_bins; ++j) {
        const std::uint32_t c = joint[i * n_bins + j];
        if (c == 0) continue;
        const double p = c / total;
        mi += p * std::log(c * total / (static_cast<double>(mx[i]) * my[j]));
      }
    }
    curve.lags[lag] = lag;
    curve.values[lag] = std::max(mi, 0.0);
  }

  const auto minimum = first_local_minimum(curve.values);
  curve.minimum_found = minimum.has_value();
  curve.selected_lag = minimum.value_or(max_lag);
  return curve;
}

/// Self-AMI: the lag-selection curve for a single series.
inline AmiCurve ami(std::span<const double> x, std::size_t max_lag, std::size_t n_bins = kDefaultAmiBins) {
  return ami(x, x, max_lag, n_bins);
}

}  // namespace gaitnl

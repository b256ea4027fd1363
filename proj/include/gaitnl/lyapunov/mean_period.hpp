#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <span>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/numeric.hpp"

namespace gaitnl {

namespace detail {

// FFTW planning is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// Magnitudes |X_k| of the real DFT for k = 0..N/2.
inline std::vector<double> magnitude_spectrum(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(x.size() / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> mag(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) mag[k] = std::abs(out[k]);
  return mag;
}

/// Reciprocal of the magnitude-weighted mean frequency (cycles per sample),
/// excluding the DC bin. Result is in samples.
inline double mean_period(std::span<const double> x) {
  require(x.size() >= 4, ErrorCode::SeriesTooShort, "mean period needs at least 4 samples");
  const auto mag = magnitude_spectrum(x);
  const double n = static_cast<double>(x.size());
  std::vector<double> weighted, weights;
  for (std::size_t k = 1; k < mag.size(); ++k) {
    weighted.push_back(static_cast<double>(k) / n * mag[k]);
    weights.push_back(mag[k]);
  }
  const double total = numeric::pairwise_sum(weights);
  require(total > 0.0, ErrorCode::DegenerateSeries, "flat spectrum has no mean frequency");
  return total / numeric::pairwise_sum(weighted);
}

}  // namespace gaitnl

#pragma once

// Exhaustive AMI and false-nearest-neighbour computations.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "entropy_oracles.hpp"

namespace oracle {

inline std::vector<int> bin_of(const std::vector<double>& x, int bins) {
  const double lo = *std::min_element(x.begin(), x.end());
  const double hi = *std::max_element(x.begin(), x.end());
  std::vector<int> b;
  for (double v : x) b.push_back(std::min(bins - 1, static_cast<int>(std::floor((v - lo) / (hi - lo) * bins))));
  return b;
}

/// I(x_t; y_{t+lag}) in nats from a joint histogram with fixed edges.
inline double mutual_information(const std::vector<double>& x, const std::vector<double>& y, std::size_t lag, int bins) {
  const auto bx = bin_of(x, bins);
  const auto by = bin_of(y, bins);
  const std::size_t n = x.size() - lag;
  std::vector<std::vector<double>> pxy(static_cast<std::size_t>(bins), std::vector<double>(static_cast<std::size_t>(bins), 0.0));
  std::vector<double> px(static_cast<std::size_t>(bins), 0.0), py(static_cast<std::size_t>(bins), 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    pxy[static_cast<std::size_t>(bx[t])][static_cast<std::size_t>(by[t + lag])] += 1.0 / static_cast<double>(n);
    px[static_cast<std::size_t>(bx[t])] += 1.0 / static_cast<double>(n);
    py[static_cast<std::size_t>(by[t + lag])] += 1.0 / static_cast<double>(n);
  }
  double mi = 0.0;
  for (int i = 0; i < bins; ++i) {
    for (int j = 0; j < bins; ++j) {
      const double p = pxy[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (p > 0.0) mi += p * std::log(p / (px[static_cast<std::size_t>(i)] * py[static_cast<std::size_t>(j)]));
    }
  }
  return std::max(mi, 0.0);
}

inline double histogram_entropy(const std::vector<double>& x, int bins) {
  const auto b = bin_of(x, bins);
  std::vector<double> p(static_cast<std::size_t>(bins), 0.0);
  for (int v : b) p[static_cast<std::size_t>(v)] += 1.0;
  double h = 0.0;
  for (double c : p) {
    if (c > 0.0) h -= c / static_cast<double>(x.size()) * std::log(c / static_cast<double>(x.size()));
  }
  return h;
}

inline std::optional<std::size_t> first_minimum(const std::vector<double>& v) {
  for (std::size_t l = 1; l + 1 < v.size(); ++l) {
    if (v[l] < v[l - 1] && v[l] <= v[l + 1]) return l;
  }
  return std::nullopt;
}

/// False-neighbour fraction at dimension d: every point whose (d+1)-th delay
/// coordinate exists, its exhaustive nearest neighbour beyond the temporal
/// window, Kennel's two criteria.
inline double fnn_fraction(const std::vector<double>& x, std::size_t tau, std::size_t d, double rtol, double atol,
                           std::size_t theiler) {
  const double sigma = pop_std(x);
  const std::size_t m = x.size() - d * tau;
  std::size_t total = 0, false_nn = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = m;
    for (std::size_t j = 0; j < m; ++j) {
      if ((i > j ? i - j : j - i) <= theiler) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = x[i + k * tau] - x[j + k * tau];
        s += diff * diff;
      }
      if (s < best) {
        best = s;
        arg = j;
      }
    }
    if (arg == m) continue;
    ++total;
    const double r = std::sqrt(best);
    const double extra = std::fabs(x[i + d * tau] - x[arg + d * tau]);
    const bool ratio = extra > rtol * std::max(r, 1e-9 * sigma);  // roundoff floor
    const bool size = std::sqrt(best + extra * extra) / sigma > atol;
    if (ratio || size) ++false_nn;
  }
  return static_cast<double>(false_nn) / static_cast<double>(total);
}

}  // namespace oracle

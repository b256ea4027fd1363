#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gaitnl/core/error.hpp"

namespace gaitnl {

struct PermutationEntropy {
  double raw_nats = 0.0;
  double normalized = 0.0;  // raw / ln(m!)
};

inline constexpr std::size_t kMinOrder = 2;
inline constexpr std::size_t kMaxOrder = 7;

/// Index in [0, m!) of the ordinal pattern of `window`. Equal values rank by
/// position: the earlier sample is the smaller one.
inline std::size_t ordinal_pattern_index(std::span<const double> window) {
  const std::size_t m = window.size();
  std::array<std::uint8_t, kMaxOrder> order{};
  for (std::size_t k = 0; k < m; ++k) order[k] = static_cast<std::uint8_t>(k);
  std::stable_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m),
                   [&](std::uint8_t a, std::uint8_t b) { return window[a] < window[b]; });
  // Lehmer code of the permutation.
  std::size_t index = 0;
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t smaller_after = 0;
    for (std::size_t l = k + 1; l < m; ++l) {
      if (order[l] < order[k]) ++smaller_after;
    }
    index = index * (m - k) + smaller_after;
  }
  return index;
}

/// Bandt-Pompe permutation entropy of order m at delay tau.
inline PermutationEntropy permutation_entropy(std::span<const double> x, std::size_t m = 3, std::size_t tau = 1) {
  require(m >= kMinOrder && m <= kMaxOrder, ErrorCode::InvalidOrder,
          "order must be in [2, 7], got " + std::to_string(m));
  require(tau >= 1, ErrorCode::InvalidArgument, "tau must be >= 1");
  require(x.size() >= (m - 1) * tau + 2, ErrorCode::SeriesTooShort,
          "need at least (m-1)*tau+2 = " + std::to_string((m - 1) * tau + 2) + " samples");

  std::size_t factorial = 1;
  for (std::size_t k = 2; k <= m; ++k) factorial *= k;
  std::vector<std::uint64_t> counts(factorial, 0);
  const std::size_t windows = x.size() - (m - 1) * tau;
  std::array<double, kMaxOrder> w{};
  for (std::size_t i = 0; i < windows; ++i) {
    for (std::size_t k = 0; k < m; ++k) w[k] = x[i + k * tau];
    ++counts[ordinal_pattern_index(std::span<const double>(w.data(), m))];
  }
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(windows);
    h -= p * std::log(p);
  }
  h = std::max(h, 0.0);
  return {h, h / std::log(static_cast<double>(factorial))};
}

}  // namespace gaitnl

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/numeric.hpp"
#include "gaitnl/entropy/sample_entropy.hpp"

namespace gaitnl {

enum class MultiscaleVariant { RCMSE, CMSE, MSE, MSFE, GMSE };

inline constexpr MultiscaleVariant kAllMultiscaleVariants[] = {
    MultiscaleVariant::RCMSE, MultiscaleVariant::CMSE, MultiscaleVariant::MSE, MultiscaleVariant::MSFE,
    MultiscaleVariant::GMSE};

constexpr std::string_view variant_name(MultiscaleVariant v) {
  switch (v) {
    case MultiscaleVariant::RCMSE: return "rcmse";
    case MultiscaleVariant::CMSE: return "cmse";
    case MultiscaleVariant::MSE: return "mse";
    case MultiscaleVariant::MSFE: return "msfe";
    case MultiscaleVariant::GMSE: return "gmse";
  }
  return "?";
}

/// One entropy value per scale 1..max_scale; nullopt where undefined.
struct MultiscaleCurve {
  MultiscaleVariant variant = MultiscaleVariant::MSE;
  std::vector<std::size_t> scales;
  std::vector<std::optional<double>> values;
};

/// Means of consecutive non-overlapping windows of `scale` samples, starting
/// at `offset`. A trailing partial window is dropped.
inline std::vector<double> coarse_grain(std::span<const double> x, std::size_t scale, std::size_t offset = 0) {
  std::vector<double> out;
  if (scale == 0 || offset >= x.size()) return out;
  const std::size_t windows = (x.size() - offset) / scale;
  out.reserve(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    double s = 0.0;
    for (std::size_t k = 0; k < scale; ++k) s += x[offset + w * scale + k];
    out.push_back(s / static_cast<double>(scale));
  }
  return out;
}

/// Like coarse_grain but each window yields its (population) variance.
inline std::vector<double> coarse_grain_variance(std::span<const double> x, std::size_t scale,
                                                 std::size_t offset = 0) {
  std::vector<double> out;
  if (scale == 0 || offset >= x.size()) return out;
  const std::size_t windows = (x.size() - offset) / scale;
  out.reserve(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    const double* p = x.data() + offset + w * scale;
    double s = 0.0;
    for (std::size_t k = 0; k < scale; ++k) s += p[k];
    const double mu = s / static_cast<double>(scale);
    double ss = 0.0;
    for (std::size_t k = 0; k < scale; ++k) ss += (p[k] - mu) * (p[k] - mu);
    out.push_back(ss / static_cast<double>(scale));
  }
  return out;
}

/// Fuzzy entropy with baseline (template mean) removal and membership
/// exp(-(d/r)^2) on the Chebyshev distance d. Uses the first N-m templates
/// for both lengths, like sample entropy.
inline std::optional<double> fuzzy_entropy_abs(std::span<const double> x, std::size_t m, double tolerance) {
  if (x.size() < m + 2) return std::nullopt;
  const std::size_t n = x.size() - m;
  double phi[2] = {0.0, 0.0};
  std::vector<double> centred(n * (m + 1));
  for (std::size_t len : {m, m + 1}) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < len; ++k) s += x[i + k];
      const double mu = s / static_cast<double>(len);
      for (std::size_t k = 0; k < len; ++k) centred[i * (m + 1) + k] = x[i + k] - mu;
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double* a = centred.data() + i * (m + 1);
      double row = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double* b = centred.data() + j * (m + 1);
        double d = 0.0;
        for (std::size_t k = 0; k < len; ++k) d = std::max(d, std::abs(a[k] - b[k]));
        const double q = d / tolerance;
        row += std::exp(-q * q);
      }
      total += row;
    }
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    phi[len - m] = total / pairs;
  }
  if (!(phi[0] > 0.0) || !(phi[1] > 0.0)) return std::nullopt;
  return std::log(phi[0]) - std::log(phi[1]);
}

inline std::optional<double> fuzzy_entropy(std::span<const double> x, const EntropyParams& p = {}) {
  require(p.m >= 1 && p.r > 0.0, ErrorCode::InvalidArgument, "need m >= 1 and r > 0");
  require(x.size() >= p.m + 2, ErrorCode::SeriesTooShort, "fuzzy entropy needs at least m+2 samples");
  return fuzzy_entropy_abs(x, p.m, absolute_tolerance(x, p.r));
}

/// The five multiscale variants over scales 1..max_scale.
///
/// MSE, CMSE, RCMSE and MSFE use tolerance r * std(x) at every scale. GMSE
/// coarse-grains by window variance, whose units differ from x; its
/// tolerance is r * std of the scale-2 variance series, fixed across scales.
inline std::vector<MultiscaleCurve> multiscale_entropy_plus(
    std::span<const double> x, const EntropyParams& p, std::size_t max_scale,
    std::span<const MultiscaleVariant> variants = kAllMultiscaleVariants) {
  require(p.m >= 1 && p.r > 0.0, ErrorCode::InvalidArgument, "need m >= 1 and r > 0");
  require(max_scale >= 1, ErrorCode::InvalidArgument, "max_scale must be >= 1");
  require(x.size() >= max_scale * (p.m + 2), ErrorCode::SeriesTooShort,
          "need at least max_scale*(m+2) = " + std::to_string(max_scale * (p.m + 2)) + " samples");
  require(max_scale <= x.size() / 10, ErrorCode::InvalidArgument,
          "max_scale must be <= len/10 = " + std::to_string(x.size() / 10));

  const double tol = absolute_tolerance(x, p.r);
  double gmse_tol = kToleranceFloor;
  for (auto v : variants) {
    if (v == MultiscaleVariant::GMSE) gmse_tol = absolute_tolerance(coarse_grain_variance(x, 2), p.r);
  }

  std::vector<MultiscaleCurve> curves;
  for (auto variant : variants) {
    MultiscaleCurve curve{.variant = variant};
    for (std::size_t s = 1; s <= max_scale; ++s) {
      std::optional<double> value;
      switch (variant) {
        case MultiscaleVariant::MSE:
          value = sample_entropy_abs(coarse_grain(x, s), p.m, tol);
          break;
        case MultiscaleVariant::CMSE: {
          double sum = 0.0;
          bool defined = true;
          for (std::size_t k = 0; k < s && defined; ++k) {
            const auto e = sample_entropy_abs(coarse_grain(x, s, k), p.m, tol);
            if (e) sum += *e;
            else defined = false;
          }
          if (defined) value = sum / static_cast<double>(s);
          break;
        }
        case MultiscaleVariant::RCMSE: {
          MatchCounts pooled;
          for (std::size_t k = 0; k < s; ++k) {
            const auto c = count_template_matches(coarse_grain(x, s, k), p.m, tol);
            pooled.a += c.a;
            pooled.b += c.b;
          }
          value = entropy_from_counts(pooled);
          break;
        }
        case MultiscaleVariant::MSFE:
          value = fuzzy_entropy_abs(coarse_grain(x, s), p.m, tol);
          break;
        case MultiscaleVariant::GMSE:
          value = sample_entropy_abs(coarse_grain_variance(x, s), p.m, gmse_tol);
          break;
      }
      curve.scales.push_back(s);
      curve.values.push_back(value);
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace gaitnl

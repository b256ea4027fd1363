#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/numeric.hpp"

namespace gaitnl {

struct SymbolicOptions {
  /// Binarisation threshold; the series median when empty.
  std::optional<double> threshold;
  std::size_t word_length = 3;
};

struct SymbolicEntropy {
  double normalized = 0.0;  // corrected entropy / its maximum, in [0, 1]
  double shannon_nats = 0.0;
  double corrected_nats = 0.0;
  std::size_t observed_words = 0;
  std::size_t total_words = 0;
};

/// Corrected Shannon entropy of a word distribution:
///   H + (K - 1) / (2 N)
/// for K observed distinct words out of N, normalised by the same quantity
/// for all 2^L words equiprobable.
inline SymbolicEntropy corrected_word_entropy(const std::vector<std::uint64_t>& counts, std::size_t word_length) {
  SymbolicEntropy out;
  for (auto c : counts) out.total_words += c;
  const double n = static_cast<double>(out.total_words);
  for (auto c : counts) {
    if (c == 0) continue;
    ++out.observed_words;
    const double p = static_cast<double>(c) / n;
    out.shannon_nats -= p * std::log(p);
  }
  out.shannon_nats = std::max(out.shannon_nats, 0.0);
  const double alphabet = std::ldexp(1.0, static_cast<int>(word_length));
  out.corrected_nats = out.shannon_nats + (static_cast<double>(out.observed_words) - 1.0) / (2.0 * n);
  const double maximum = static_cast<double>(word_length) * std::log(2.0) + (alphabet - 1.0) / (2.0 * n);
  out.normalized = std::clamp(out.corrected_nats / maximum, 0.0, 1.0);
  return out;
}

/// Threshold-dependent symbolic entropy: samples above the threshold map to
/// 1, others to 0; overlapping words of `word_length` bits are counted.
inline SymbolicEntropy symbolic_entropy(std::span<const double> x, const SymbolicOptions& opts = {}) {
  require(opts.word_length >= 1 && opts.word_length <= 24, ErrorCode::InvalidArgument,
          "word_length must be in [1, 24]");
  require(x.size() >= opts.word_length + 1, ErrorCode::SeriesTooShort,
          "need at least word_length+1 = " + std::to_string(opts.word_length + 1) + " samples");
  const double threshold = opts.threshold.value_or(numeric::median(x));
  std::vector<std::uint64_t> counts(std::size_t{1} << opts.word_length, 0);
  const std::size_t mask = (std::size_t{1} << opts.word_length) - 1;
  std::size_t code = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    code = ((code << 1) | (x[i] > threshold ? 1u : 0u)) & mask;
    if (i + 1 >= opts.word_length) ++counts[code];
  }
  return corrected_word_entropy(counts, opts.word_length);
}

}  // namespace gaitnl

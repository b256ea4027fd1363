#pragma once

// Brute-force entropy estimators written straight from the textbook
// definitions. Nothing here calls into the library.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double pop_std(const std::vector<double>& x) {
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return std::sqrt(s / static_cast<double>(x.size()));
}

inline double median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

inline std::vector<double> window(const std::vector<double>& x, std::size_t start, std::size_t len) {
  return {x.begin() + static_cast<long>(start), x.begin() + static_cast<long>(start + len)};
}

inline double chebyshev(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::fabs(a[k] - b[k]));
  return d;
}

struct PairCounts {
  unsigned long long matches_m = 0;
  unsigned long long matches_m1 = 0;
};

/// Template pairs (i < j) among the first N-m starting points.
inline PairCounts sampen_counts(const std::vector<double>& x, std::size_t m, double tol) {
  PairCounts c;
  if (x.size() <= m) return c;
  const std::size_t starts = x.size() - m;
  for (std::size_t i = 0; i < starts; ++i) {
    for (std::size_t j = i + 1; j < starts; ++j) {
      if (chebyshev(window(x, i, m), window(x, j, m)) <= tol) ++c.matches_m;
      if (chebyshev(window(x, i, m + 1), window(x, j, m + 1)) <= tol) ++c.matches_m1;
    }
  }
  return c;
}

inline std::optional<double> sampen_abs(const std::vector<double>& x, std::size_t m, double tol) {
  const auto c = sampen_counts(x, m, tol);
  if (c.matches_m == 0 || c.matches_m1 == 0) return std::nullopt;
  return std::log(static_cast<double>(c.matches_m)) - std::log(static_cast<double>(c.matches_m1));
}

inline double tolerance(const std::vector<double>& x, double r) { return std::max(r * pop_std(x), 1e-12); }

inline std::optional<double> sampen(const std::vector<double>& x, std::size_t m, double r) {
  return sampen_abs(x, m, tolerance(x, r));
}

/// Pincus phi: average over templates of ln(fraction of templates within tol),
/// comparing templates of `a` against templates of `b`; zero counts floored to one.
inline double phi(const std::vector<double>& a, const std::vector<double>& b, std::size_t len, double tol) {
  const std::size_t count = a.size() - len + 1;
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < count; ++j) {
      if (chebyshev(window(a, i, len), window(b, j, len)) <= tol) ++c;
    }
    total += std::log(static_cast<double>(std::max<std::size_t>(c, 1)) / static_cast<double>(count));
  }
  return total / static_cast<double>(count);
}

inline double apen(const std::vector<double>& x, std::size_t m, double r) {
  const double tol = tolerance(x, r);
  return phi(x, x, m, tol) - phi(x, x, m + 1, tol);
}

inline std::vector<double> zscore(const std::vector<double>& x) {
  const double mu = mean(x);
  const double sd = pop_std(x);
  std::vector<double> z;
  for (double v : x) z.push_back(sd > 0.0 ? (v - mu) / sd : v - mu);
  return z;
}

inline double xapen(const std::vector<double>& x, const std::vector<double>& y, std::size_t m, double r) {
  const auto zx = zscore(x);
  const auto zy = zscore(y);
  return phi(zx, zy, m, r) - phi(zx, zy, m + 1, r);
}

/// Shannon entropy (nats) of ordinal patterns; ties broken by position.
inline double permutation_entropy_nats(const std::vector<double>& x, std::size_t m, std::size_t tau) {
  std::map<std::vector<std::size_t>, std::size_t> counts;
  const std::size_t windows = x.size() - (m - 1) * tau;
  for (std::size_t i = 0; i < windows; ++i) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const double va = x[i + a * tau];
      const double vb = x[i + b * tau];
      return va < vb || (va == vb && a < b);
    });
    ++counts[idx];
  }
  double h = 0.0;
  for (const auto& [pattern, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(windows);
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

struct Symbolic {
  double normalized;
  double shannon;
  double corrected;
  std::size_t observed;
};

/// Words of L bits from x > threshold, overlapping; Miller-Madow corrected
/// entropy divided by its value for a uniform distribution over 2^L words.
inline Symbolic symbolic(const std::vector<double>& x, std::size_t L, std::optional<double> threshold) {
  const double thr = threshold.value_or(median(x));
  std::string bits;
  for (double v : x) bits += v > thr ? '1' : '0';
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i + L <= bits.size(); ++i) ++counts[bits.substr(i, L)];
  const double n = static_cast<double>(bits.size() - L + 1);
  double h = 0.0;
  for (const auto& [w, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  h = std::max(h, 0.0);
  const double corrected = h + (static_cast<double>(counts.size()) - 1.0) / (2.0 * n);
  const double maximum = static_cast<double>(L) * std::log(2.0) + (std::pow(2.0, static_cast<double>(L)) - 1.0) / (2.0 * n);
  return {std::clamp(corrected / maximum, 0.0, 1.0), h, corrected, counts.size()};
}

/// Fuzzy entropy: templates of the first N-m points, each minus its own
/// mean; similarity exp(-(d/r)^2) averaged over pairs i < j.
inline std::optional<double> fuzzy_abs(const std::vector<double>& x, std::size_t m, double tol) {
  if (x.size() < m + 2) return std::nullopt;
  const std::size_t starts = x.size() - m;
  double phis[2];
  for (std::size_t len : {m, m + 1}) {
    std::vector<std::vector<double>> t;
    for (std::size_t i = 0; i < starts; ++i) {
      auto w = window(x, i, len);
      const double mu = mean(w);
      for (double& v : w) v -= mu;
      t.push_back(w);
    }
    double s = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < starts; ++i) {
      for (std::size_t j = i + 1; j < starts; ++j) {
        const double d = chebyshev(t[i], t[j]) / tol;
        s += std::exp(-d * d);
        pairs += 1.0;
      }
    }
    phis[len - m] = s / pairs;
  }
  if (!(phis[0] > 0.0) || !(phis[1] > 0.0)) return std::nullopt;
  return std::log(phis[0] / phis[1]);
}

inline std::vector<double> coarse_mean(const std::vector<double>& x, std::size_t s, std::size_t offset) {
  std::vector<double> out;
  for (std::size_t start = offset; start + s <= x.size(); start += s) out.push_back(mean(window(x, start, s)));
  return out;
}

inline std::vector<double> coarse_variance(const std::vector<double>& x, std::size_t s) {
  std::vector<double> out;
  for (std::size_t start = 0; start + s <= x.size(); start += s) {
    const auto w = window(x, start, s);
    const double sd = pop_std(w);
    out.push_back(sd * sd);
  }
  return out;
}

struct MultiscaleCurves {
  std::vector<std::optional<double>> rcmse, cmse, mse, msfe, gmse;
};

inline MultiscaleCurves multiscale(const std::vector<double>& x, std::size_t m, double r, std::size_t max_scale) {
  MultiscaleCurves c;
  const double tol = tolerance(x, r);
  const double gtol = tolerance(coarse_variance(x, 2), r);
  for (std::size_t s = 1; s <= max_scale; ++s) {
    c.mse.push_back(sampen_abs(coarse_mean(x, s, 0), m, tol));
    c.msfe.push_back(fuzzy_abs(coarse_mean(x, s, 0), m, tol));
    c.gmse.push_back(sampen_abs(coarse_variance(x, s), m, gtol));
    unsigned long long a = 0, b = 0;
    double sum = 0.0;
    bool all_defined = true;
    for (std::size_t k = 0; k < s; ++k) {
      const auto y = coarse_mean(x, s, k);
      const auto pc = sampen_counts(y, m, tol);
      b += pc.matches_m;
      a += pc.matches_m1;
      const auto e = sampen_abs(y, m, tol);
      if (e) sum += *e;
      else all_defined = false;
    }
    c.rcmse.push_back(a && b ? std::optional<double>(std::log(static_cast<double>(b) / static_cast<double>(a)))
                             : std::nullopt);
    c.cmse.push_back(all_defined ? std::optional<double>(sum / static_cast<double>(s)) : std::nullopt);
  }
  return c;
}

}  // namespace oracle

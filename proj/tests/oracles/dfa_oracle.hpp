#pragma once

// DFA by explicit least-squares polynomial fits (Eigen QR) in every box.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace oracle {

inline std::vector<double> integrate(const std::vector<double>& x) {
  double mu = 0.0;
  for (double v : x) mu += v;
  mu /= static_cast<double>(x.size());
  std::vector<double> y;
  double acc = 0.0;
  for (double v : x) {
    acc += v - mu;
    y.push_back(acc);
  }
  return y;
}

inline double box_residual_ss(const std::vector<double>& y, std::size_t start, std::size_t n, std::size_t order) {
  Eigen::MatrixXd A(n, order + 1);
  Eigen::VectorXd b(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double u = (static_cast<double>(t) - 0.5 * static_cast<double>(n - 1)) / static_cast<double>(n);
    for (std::size_t k = 0; k <= order; ++k) A(t, k) = std::pow(u, static_cast<double>(k));
    b(t) = y[start + t];
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
  return (A * coef - b).squaredNorm();
}

/// F(n) over non-overlapping boxes taken from the start and from the end.
inline double fluctuation(const std::vector<double>& x, std::size_t n, std::size_t order) {
  const auto y = integrate(x);
  const std::size_t boxes = y.size() / n;
  double ss = 0.0;
  for (std::size_t b = 0; b < boxes; ++b) {
    ss += box_residual_ss(y, b * n, n, order);
    ss += box_residual_ss(y, y.size() - (b + 1) * n, n, order);
  }
  return std::sqrt(ss / static_cast<double>(2 * boxes * n));
}

/// Least-squares slope of ln F against ln n.
inline double alpha(const std::vector<double>& x, const std::vector<std::size_t>& sizes, std::size_t order) {
  const auto k = static_cast<Eigen::Index>(sizes.size());
  Eigen::MatrixXd A(k, 2);
  Eigen::VectorXd b(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::log(static_cast<double>(sizes[static_cast<std::size_t>(i)]));
    b(i) = std::log(fluctuation(x, sizes[static_cast<std::size_t>(i)], order));
  }
  return A.colPivHouseholderQr().solve(b)(1);
}

}  // namespace oracle

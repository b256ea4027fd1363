#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gaitnl/core/error.hpp"

namespace gaitnl {

struct EmbeddingParams {
  std::size_t tau = 1;
  std::size_t dim = 1;

  friend bool operator==(const EmbeddingParams&, const EmbeddingParams&) = default;
};

/// Row-major matrix of reconstructed state vectors.
class StateMatrix {
 public:
  StateMatrix() = default;
  StateMatrix(std::size_t rows, std::size_t dim, std::vector<double> data)
      : rows_(rows), dim_(dim), data_(std::move(data)) {
    require(data_.size() == rows_ * dim_, ErrorCode::InvalidArgument, "state matrix data size mismatch");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return rows_ == 0; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  double operator()(std::size_t i, std::size_t k) const { return data_[i * dim_ + k]; }
  std::span<const double> data() const noexcept { return data_; }

  /// First `n` rows as a new matrix.
  StateMatrix head(std::size_t n) const {
    return StateMatrix(n, dim_, std::vector<double>(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(n * dim_)));
  }

  friend bool operator==(const StateMatrix&, const StateMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline std::size_t embedding_rows(std::size_t length, const EmbeddingParams& p) {
  return length - (p.dim - 1) * p.tau;
}

/// Delay embedding: row i is (x[i], x[i+tau], ..., x[i+(dim-1)tau]).
inline StateMatrix embed(std::span<const double> x, const EmbeddingParams& p) {
  require(p.tau >= 1 && p.dim >= 1, ErrorCode::InvalidArgument, "tau and dim must be >= 1");
  require(x.size() >= (p.dim - 1) * p.tau + 1, ErrorCode::SeriesTooShort,
          "need at least (dim-1)*tau+1 = " + std::to_string((p.dim - 1) * p.tau + 1) + " samples, got " +
              std::to_string(x.size()));
  const std::size_t rows = embedding_rows(x.size(), p);
  std::vector<double> data(rows * p.dim);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < p.dim; ++k) data[i * p.dim + k] = x[i + k * p.tau];
  }
  return StateMatrix(rows, p.dim, std::move(data));
}

}  // namespace gaitnl

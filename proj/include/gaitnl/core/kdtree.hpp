#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "gaitnl/statespace/embedding.hpp"

namespace gaitnl {

/// Squared Euclidean distance, summed in coordinate order.
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

struct Neighbor {
  std::size_t index = 0;
  double squared_distance = std::numeric_limits<double>::infinity();

  bool found() const { return std::isfinite(squared_distance); }
  double distance() const { return std::sqrt(squared_distance); }
};

/// Static kd-tree over the first `count` rows of a StateMatrix, Euclidean
/// metric. Nearest-neighbour ties resolve to the smaller row index so results
/// match an exhaustive scan exactly.
class KdTree {
 public:
  KdTree(const StateMatrix& points, std::size_t count) : points_(points), count_(count) {
    index_.resize(count_);
    std::iota(index_.begin(), index_.end(), std::size_t{0});
    if (count_ > 0) build(0, count_);
  }

  /// Nearest row to `query` among rows j accepted by `allowed(j)`.
  template <typename Allowed>
  Neighbor nearest(std::span<const double> query, Allowed&& allowed) const {
    Neighbor best;
    if (!nodes_.empty()) search_nearest(0, query, allowed, best);
    return best;
  }

  /// Calls `visit(j, squared_distance)` for each row within `radius` of query.
  template <typename Visit>
  void within(std::span<const double> query, double radius, Visit&& visit) const {
    if (!nodes_.empty()) search_radius(0, query, radius * radius, visit);
  }

 private:
  static constexpr std::size_t kLeafSize = 12;

  struct Node {
    std::size_t begin, end;
    std::size_t split_dim = 0;
    double split = 0.0;
    std::size_t left = 0, right = 0;
    bool leaf = true;
    std::vector<double> lo, hi;
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{.begin = begin, .end = end});
    const std::size_t d = points_.dim();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = begin; i < end; ++i) {
      const auto p = points_.row(index_[i]);
      for (std::size_t k = 0; k < d; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    }
    if (end - begin > kLeafSize) {
      std::size_t split_dim = 0;
      for (std::size_t k = 1; k < d; ++k) {
        if (hi[k] - lo[k] > hi[split_dim] - lo[split_dim]) split_dim = k;
      }
      if (hi[split_dim] > lo[split_dim]) {
        const std::size_t mid = begin + (end - begin) / 2;
        auto first = index_.begin() + static_cast<std::ptrdiff_t>(begin);
        std::nth_element(first, index_.begin() + static_cast<std::ptrdiff_t>(mid),
                         index_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                           const double va = points_(a, split_dim);
                           const double vb = points_(b, split_dim);
                           return va < vb || (va == vb && a < b);
                         });
        nodes_[id].leaf = false;
        nodes_[id].split_dim = split_dim;
        nodes_[id].split = points_(index_[mid], split_dim);
        const std::size_t left = build(begin, mid);
        const std::size_t right = build(mid, end);
        nodes_[id].left = left;
        nodes_[id].right = right;
      }
    }
    nodes_[id].lo = std::move(lo);
    nodes_[id].hi = std::move(hi);
    return id;
  }

  double box_distance(const Node& n, std::span<const double> q) const {
    double s = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      double d = 0.0;
      if (q[k] < n.lo[k]) d = n.lo[k] - q[k];
      else if (q[k] > n.hi[k]) d = q[k] - n.hi[k];
      s += d * d;
    }
    return s;
  }

  template <typename Allowed>
  void search_nearest(std::size_t id, std::span<const double> q, Allowed& allowed, Neighbor& best) const {
    const Node& n = nodes_[id];
    if (n.leaf) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t j = index_[i];
        if (!allowed(j)) continue;
        const double d = squared_distance(q, points_.row(j));
        if (d < best.squared_distance || (d == best.squared_distance && j < best.index)) best = {j, d};
      }
      return;
    }
    const bool go_left_first = q[n.split_dim] < n.split;
    const std::size_t first = go_left_first ? n.left : n.right;
    const std::size_t second = go_left_first ? n.right : n.left;
    // `<=` keeps equal-distance candidates reachable for the index tie-break.
    if (box_distance(nodes_[first], q) <= best.squared_distance) search_nearest(first, q, allowed, best);
    if (box_distance(nodes_[second], q) <= best.squared_distance) search_nearest(second, q, allowed, best);
  }

  template <typename Visit>
  void search_radius(std::size_t id, std::span<const double> q, double r2, Visit& visit) const {
    const Node& n = nodes_[id];
    if (box_distance(n, q) > r2) return;
    if (n.leaf) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t j = index_[i];
        const double d = squared_distance(q, points_.row(j));
        if (d <= r2) visit(j, d);
      }
      return;
    }
    search_radius(n.left, q, r2, visit);
    search_radius(n.right, q, r2, visit);
  }

  const StateMatrix& points_;
  std::size_t count_;
  std::vector<std::size_t> index_;
  std::vector<Node> nodes_;
};

}  // namespace gaitnl

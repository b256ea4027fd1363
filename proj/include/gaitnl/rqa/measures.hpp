#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/rqa/recurrence_plot.hpp"

namespace gaitnl {

struct RqaMeasures {
  double recurrence_rate_pct = 0.0;
  double determinism_pct = 0.0;
  std::size_t max_diagonal_line = 0;
  double mean_diagonal_line = 0.0;
  double diagonal_line_entropy_nats = 0.0;
  double laminarity_pct = 0.0;
  std::optional<double> trapping_time;  // empty when no vertical line reaches v_min
  std::size_t max_vertical_line = 0;
  std::optional<double> weighted_recurrence_entropy;  // empty without strengths
  std::uint64_t recurrent_cells = 0;  // off-band, both triangles
  std::uint64_t offband_cells = 0;
};

inline constexpr std::size_t kStrengthBins = 64;

/// Line-length histogram: counts[l] = number of lines of exactly length l.
struct LineHistogram {
  std::vector<std::uint64_t> counts;

  explicit LineHistogram(std::size_t n) : counts(n + 1, 0) {}

  void add(std::size_t len, std::uint64_t times = 1) {
    if (len > 0) counts[len] += times;
  }
  std::size_t longest() const {
    for (std::size_t l = counts.size(); l-- > 1;) {
      if (counts[l]) return l;
    }
    return 0;
  }
};

/// Diagonal lines, ignoring the line of identity and Theiler band. Upper
/// diagonals are scanned once and counted twice (the matrix is symmetric).
inline LineHistogram diagonal_lines(const RecurrencePlot& rp) {
  const std::size_t n = rp.n_points();
  LineHistogram h(n);
  for (std::size_t k = rp.theiler_window() + 1; k < n; ++k) {
    std::size_t run = 0;
    std::uint64_t idx = k - 1;  // cell (0, k)
    for (std::size_t i = 0; i + k < n; ++i) {
      if (rp.triangle_bit(idx)) {
        ++run;
      } else {
        h.add(run, 2);
        run = 0;
      }
      idx += n - i - 1;  // (i, i+k) -> (i+1, i+1+k)
    }
    h.add(run, 2);
  }
  return h;
}

/// Vertical lines per column, band cells treated as non-recurrent.
inline LineHistogram vertical_lines(const RecurrencePlot& rp) {
  const std::size_t n = rp.n_points();
  const std::size_t w = rp.theiler_window();
  LineHistogram h(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t run = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t gap = i > j ? i - j : j - i;
      const bool on = gap > w && rp.triangle_bit(i < j ? rp.triangle_index(i, j) : rp.triangle_index(j, i));
      if (on) {
        ++run;
      } else {
        h.add(run);
        run = 0;
      }
    }
    h.add(run);
  }
  return h;
}

/// Shannon entropy (nats) of per-point strengths binned into equal-width bins.
inline std::optional<double> strength_entropy(std::span<const double> strengths, std::size_t bins = kStrengthBins) {
  if (strengths.empty()) return std::nullopt;
  const auto [lo_it, hi_it] = std::minmax_element(strengths.begin(), strengths.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (!(range > 0.0)) return 0.0;
  std::vector<std::uint64_t> counts(bins, 0);
  for (double s : strengths) {
    const auto b = static_cast<std::size_t>((s - lo) / range * static_cast<double>(bins));
    ++counts[std::min(b, bins - 1)];
  }
  double h = 0.0;
  const double total = static_cast<double>(strengths.size());
  for (auto c : counts) {
    if (!c) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

inline RqaMeasures rqa_measures(const RecurrencePlot& rp, std::size_t l_min = 2, std::size_t v_min = 2) {
  require(l_min >= 2 && v_min >= 2, ErrorCode::InvalidArgument, "l_min and v_min must be >= 2");
  RqaMeasures m;
  m.offband_cells = offband_cells(rp.n_points(), rp.theiler_window());
  m.recurrent_cells = rp.offband_recurrences();
  if (m.offband_cells) {
    m.recurrence_rate_pct = 100.0 * static_cast<double>(m.recurrent_cells) / static_cast<double>(m.offband_cells);
  }

  const auto diag = diagonal_lines(rp);
  std::uint64_t points_all = 0, points_long = 0, lines_long = 0;
  for (std::size_t l = 1; l < diag.counts.size(); ++l) {
    points_all += l * diag.counts[l];
    if (l >= l_min) {
      points_long += l * diag.counts[l];
      lines_long += diag.counts[l];
    }
  }
  m.max_diagonal_line = diag.longest();
  if (points_all) m.determinism_pct = 100.0 * static_cast<double>(points_long) / static_cast<double>(points_all);
  if (lines_long) {
    m.mean_diagonal_line = static_cast<double>(points_long) / static_cast<double>(lines_long);
    double h = 0.0;
    for (std::size_t l = l_min; l < diag.counts.size(); ++l) {
      if (!diag.counts[l]) continue;
      const double p = static_cast<double>(diag.counts[l]) / static_cast<double>(lines_long);
      h -= p * std::log(p);
    }
    m.diagonal_line_entropy_nats = std::max(h, 0.0);
  }

  const auto vert = vertical_lines(rp);
  std::uint64_t vpoints_all = 0, vpoints_long = 0, vlines_long = 0;
  for (std::size_t v = 1; v < vert.counts.size(); ++v) {
    vpoints_all += v * vert.counts[v];
    if (v >= v_min) {
      vpoints_long += v * vert.counts[v];
      vlines_long += vert.counts[v];
    }
  }
  m.max_vertical_line = vert.longest();
  if (vpoints_all) m.laminarity_pct = 100.0 * static_cast<double>(vpoints_long) / static_cast<double>(vpoints_all);
  if (vlines_long) m.trapping_time = static_cast<double>(vpoints_long) / static_cast<double>(vlines_long);

  m.weighted_recurrence_entropy = strength_entropy(rp.strengths());
  return m;
}

}  // namespace gaitnl

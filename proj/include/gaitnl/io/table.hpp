#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace gaitnl::io {

/// A decoded column before validation. Numeric columns keep their values
/// (missing cells as NaN); text columns keep the raw cells and are flagged.
struct RawColumn {
  std::string name;
  bool numeric = true;
  std::vector<double> values;
  std::vector<std::string> text;

  std::size_t size() const { return numeric ? values.size() : text.size(); }
};

struct RawTable {
  std::vector<RawColumn> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

}  // namespace gaitnl::io

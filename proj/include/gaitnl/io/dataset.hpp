#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/numeric.hpp"
#include "gaitnl/core/timeseries.hpp"
#include "gaitnl/io/csv.hpp"
#include "gaitnl/io/parquet.hpp"
#include "gaitnl/io/table.hpp"

namespace gaitnl {

enum class DataFormat { Csv, Parquet };

/// A loaded table. Columns keep file order; names are unique and all columns
/// have the same length. Text columns are retained but not usable.
class Dataset {
 public:
  Dataset(std::filesystem::path source, DataFormat format, io::RawTable table)
      : source_(std::move(source)), format_(format), table_(std::move(table)) {}

  const std::filesystem::path& source_path() const noexcept { return source_; }
  DataFormat format() const noexcept { return format_; }
  std::size_t rows() const noexcept { return table_.rows(); }
  std::size_t column_count() const noexcept { return table_.columns.size(); }
  const std::vector<io::RawColumn>& columns() const noexcept { return table_.columns; }
  const io::RawTable& table() const noexcept { return table_; }

  const io::RawColumn* find(std::string_view name) const {
    const auto it = std::find_if(table_.columns.begin(), table_.columns.end(),
                                 [&](const io::RawColumn& c) { return c.name == name; });
    return it == table_.columns.end() ? nullptr : &*it;
  }

  bool usable(std::string_view name) const {
    const auto* c = find(name);
    return c && c->numeric;
  }

 private:
  std::filesystem::path source_;
  DataFormat format_;
  io::RawTable table_;
};

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::UnreadableFile, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::UnreadableFile, "read error on " + path.string());
  return bytes;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

/// Plausible CSV: non-empty, no NUL bytes in the first 4 KiB.
inline bool looks_like_text(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return false;
  const std::size_t n = std::min<std::size_t>(bytes.size(), 4096);
  return std::none_of(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n),
                      [](std::uint8_t b) { return b == 0; });
}

inline void check_table(const io::RawTable& t, const std::filesystem::path& path) {
  if (t.columns.empty() || t.rows() == 0) fail(ErrorCode::EmptyDataset, path.string());
  std::unordered_set<std::string> names;
  for (const auto& c : t.columns) {
    if (!names.insert(c.name).second) fail(ErrorCode::UnreadableFile, "duplicate column " + c.name);
    if (c.size() != t.rows()) fail(ErrorCode::UnreadableFile, "ragged column " + c.name);
  }
}

}  // namespace detail

/// Detects the format by extension (.csv / .parquet), otherwise by content:
/// leading "PAR1" means Parquet, text means CSV.
inline DataFormat detect_format(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  const std::string ext = detail::lower(path.extension().string());
  if (ext == ".csv") return DataFormat::Csv;
  if (ext == ".parquet" || ext == ".pq") return DataFormat::Parquet;
  if (io::has_parquet_magic(bytes)) return DataFormat::Parquet;
  if (detail::looks_like_text(bytes)) return DataFormat::Csv;
  fail(ErrorCode::UnknownFormat, path.string() + " is neither CSV nor Parquet");
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) fail(ErrorCode::UnreadableFile, "no such file " + path.string());
  const auto bytes = detail::read_file_bytes(path);
  if (bytes.empty()) fail(ErrorCode::EmptyDataset, path.string() + " is empty");
  const DataFormat format = detect_format(path, bytes);
  io::RawTable table = format == DataFormat::Parquet
                           ? io::parse_parquet(bytes)
                           : io::parse_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  detail::check_table(table, path);
  return Dataset(path, format, std::move(table));
}

inline void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::UnreadableFile, "cannot write " + path.string());
  out << io::to_csv(dataset.table());
}

inline void write_parquet(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::UnreadableFile, "cannot write " + path.string());
  const auto bytes = io::to_parquet(dataset.table());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

/// Ordered, duplicate-free list of column names to analyse.
class AttributeList {
 public:
  explicit AttributeList(std::vector<std::string> names) : names_(std::move(names)) {
    require(!names_.empty(), ErrorCode::EmptyAttributeList, "attribute list has no names");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
      if (!seen.insert(n).second) throw Error(ErrorCode::DuplicateAttribute, n);
    }
  }

  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

/// One name per line; blank lines and '#' comments are ignored.
inline AttributeList parse_attribute_list(std::string_view text) {
  std::vector<std::string> names;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = io::csv_detail::trim(text.substr(start, end - start));
    if (!line.empty() && line.front() != '#') names.emplace_back(line);
    start = end + 1;
  }
  return AttributeList(std::move(names));
}

inline AttributeList read_attribute_list(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  return parse_attribute_list(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

struct SelectOptions {
  /// Trim a contiguous non-finite prefix and suffix instead of rejecting.
  bool drop_leading_trailing_nan = false;
};

using ColumnSelection = std::variant<TimeSeries, Error>;

/// Validates one column into a finite TimeSeries or throws.
inline TimeSeries select_column(const Dataset& dataset, const std::string& name, const SelectOptions& opts = {}) {
  const auto* col = dataset.find(name);
  if (!col) throw Error(ErrorCode::MissingColumn, name);
  if (!col->numeric) throw Error(ErrorCode::NonNumericColumn, name + ": contains text");
  std::span<const double> v = col->values;
  if (opts.drop_leading_trailing_nan) {
    std::size_t lo = 0;
    std::size_t hi = v.size();
    while (lo < hi && !std::isfinite(v[lo])) ++lo;
    while (hi > lo && !std::isfinite(v[hi - 1])) --hi;
    v = v.subspan(lo, hi - lo);
  }
  if (v.empty()) throw Error(ErrorCode::NonNumericColumn, name + ": no finite samples");
  if (!numeric::all_finite(v)) throw Error(ErrorCode::NonNumericColumn, name + ": contains non-finite samples");
  return TimeSeries(name, std::vector<double>(v.begin(), v.end()));
}

/// Projects the requested columns in request order. Failures are returned
/// per column so the rest can still be processed.
inline std::vector<ColumnSelection> select_columns(const Dataset& dataset, const AttributeList& attrs,
                                                   const SelectOptions& opts = {}) {
  std::vector<ColumnSelection> out;
  out.reserve(attrs.size());
  for (const auto& name : attrs.names()) {
    try {
      out.emplace_back(select_column(dataset, name, opts));
    } catch (const Error& e) {
      out.emplace_back(e);
    }
  }
  return out;
}

}  // namespace gaitnl

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_set>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/io/table.hpp"

namespace gaitnl::io {

namespace csv_detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "N/A" || s == "null" || s == "NULL";
}

}  // namespace csv_detail

/// Parses a numeric cell. Empty and NA-style cells are missing (NaN).
/// Returns nullopt for text that is not a number.
inline std::optional<double> parse_number(std::string_view cell) {
  cell = csv_detail::trim(cell);
  if (csv_detail::is_missing_token(cell)) return std::numeric_limits<double>::quiet_NaN();
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec == std::errc::result_out_of_range) {
    // Overflow saturates; underflow to a subnormal/zero is still a number.
    return value;
  }
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

/// Splits RFC-4180 style text into records of fields. Comma delimiter, double
/// quote escaping, LF or CRLF line endings. Fully blank lines are skipped.
inline std::vector<std::vector<std::string>> split_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool record_has_content = false;

  const auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_record = [&] {
    end_field();
    if (record_has_content || fields.size() > 1 || !fields.front().empty()) {
      records.push_back(std::move(fields));
    }
    fields.clear();
    record_has_content = false;
  };

  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !csv_detail::trim(field).empty()) {
          fail(ErrorCode::UnreadableFile, "stray quote inside unquoted field");
        }
        field.clear();
        in_quotes = true;
        field_started = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
        record_has_content = true;
    }
  }
  if (in_quotes) fail(ErrorCode::UnreadableFile, "unterminated quoted field");
  if (field_started || !fields.empty() || record_has_content) end_record();
  return records;
}

/// Parses CSV text with a mandatory header row into columns. Ragged rows and
/// duplicate header names make the file unreadable.
inline RawTable parse_csv(std::string_view text) {
  const auto records = split_records(text);
  if (records.empty()) fail(ErrorCode::EmptyDataset, "no header row");
  const auto& header = records.front();
  RawTable table;
  std::unordered_set<std::string> seen;
  for (const auto& raw_name : header) {
    std::string name(csv_detail::trim(raw_name));
    if (!seen.insert(name).second) fail(ErrorCode::UnreadableFile, "duplicate column name '" + name + "'");
    table.columns.push_back(RawColumn{.name = std::move(name)});
  }
  if (records.size() < 2) fail(ErrorCode::EmptyDataset, "header present but zero data rows");

  const std::size_t n_rows = records.size() - 1;
  std::vector<std::vector<std::string>> cells(header.size());
  for (auto& col : cells) col.reserve(n_rows);
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != header.size()) {
      fail(ErrorCode::UnreadableFile, "row " + std::to_string(r + 1) + " has " +
                                          std::to_string(records[r].size()) + " fields, header has " +
                                          std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < header.size(); ++c) cells[c].push_back(records[r][c]);
  }

  for (std::size_t c = 0; c < header.size(); ++c) {
    RawColumn& col = table.columns[c];
    col.values.reserve(n_rows);
    for (const auto& cell : cells[c]) {
      const auto v = parse_number(cell);
      if (!v) {
        col.numeric = false;
        break;
      }
      col.values.push_back(*v);
    }
    if (!col.numeric) {
      col.values.clear();
      col.text = std::move(cells[c]);
    }
  }
  return table;
}

/// Shortest text that round-trips the double exactly (17 significant digits).
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

inline std::string quote_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string to_csv(const RawTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out.push_back(',');
    out += quote_field(table.columns[c].name);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out.push_back(',');
      const auto& col = table.columns[c];
      out += col.numeric ? format_double(col.values[r]) : quote_field(col.text[r]);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace gaitnl::io

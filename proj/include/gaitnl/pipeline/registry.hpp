#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/timeseries.hpp"
#include "gaitnl/io/csv.hpp"
#include "gaitnl/io/dataset.hpp"
#include "gaitnl/rqa/recurrence_plot.hpp"

namespace gaitnl::pipeline {

inline constexpr std::string_view kAuto = "auto";

struct ParamSpec {
  std::string key;
  std::string default_value;  // "auto", "" (required) or a literal
  std::string description;
};

/// Concrete key=value parameters for one task.
class ParamValues {
 public:
  ParamValues() = default;
  explicit ParamValues(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  const std::map<std::string, std::string>& all() const noexcept { return values_; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) fail(ErrorCode::InvalidArgument, "parameter '" + key + "' is not set");
    return it->second;
  }
  bool is_auto(const std::string& key) const { return text(key) == kAuto; }

  double real(const std::string& key) const {
    const auto& s = text(key);
    const auto v = io::parse_number(s);
    if (!v || !std::isfinite(*v)) fail(ErrorCode::InvalidArgument, "parameter '" + key + "' is not a number: " + s);
    return *v;
  }

  std::size_t count(const std::string& key) const {
    const auto& s = text(key);
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
      fail(ErrorCode::InvalidArgument, "parameter '" + key + "' is not a non-negative integer: " + s);
    }
    return v;
  }

  std::optional<double> optional_real(const std::string& key) const {
    if (is_auto(key) || text(key) == "none") return std::nullopt;
    return real(key);
  }
  std::optional<std::size_t> optional_count(const std::string& key) const {
    if (is_auto(key) || text(key) == "none") return std::nullopt;
    return count(key);
  }

 private:
  std::map<std::string, std::string> values_;
};

/// One plotted chart: shared x values and one or more y series.
struct Chart {
  std::string x_label;
  std::vector<double> x;
  struct Series {
    std::string label;
    std::vector<double> y;  // NaN marks an undefined point
  };
  std::vector<Series> series;
  bool log_x = false;
  bool log_y = false;
  /// Optional fitted line y = slope*x + intercept in plotted (log) space.
  std::optional<std::pair<double, double>> fit;
};

/// Scalar and list outputs, formatted once so result files are reproducible.
class Outputs {
 public:
  void put(const std::string& key, double v) { values_[key] = io::format_double(v); }
  void put(const std::string& key, std::optional<double> v) {
    values_[key] = v ? io::format_double(*v) : std::string("undefined");
  }
  void put(const std::string& key, std::size_t v) { values_[key] = std::to_string(v); }
  void put(const std::string& key, bool v) { values_[key] = v ? "true" : "false"; }
  void put(const std::string& key, std::string v) { values_[key] = std::move(v); }
  void put(const std::string& key, const char* v) { values_[key] = v; }
  template <class T>
  void put_list(const std::string& key, std::span<const T> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      if constexpr (std::is_floating_point_v<T>) s += io::format_double(static_cast<double>(v[i]));
      else s += std::to_string(v[i]);
    }
    values_[key] = std::move(s);
  }
  void put_list(const std::string& key, std::span<const std::optional<double>> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += v[i] ? io::format_double(*v[i]) : std::string("undefined");
    }
    values_[key] = std::move(s);
  }

  const std::map<std::string, std::string>& all() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct AlgorithmOutput {
  Outputs outputs;
  std::optional<Chart> chart;
  std::shared_ptr<const RecurrencePlot> recurrence_plot;
};

struct TaskContext {
  const TimeSeries& series;
  const Dataset& dataset;
  const ParamValues& params;
  std::uint64_t memory_budget_bytes;
  const SelectOptions& select;
};

using AlgorithmFn = std::function<AlgorithmOutput(const TaskContext&)>;

struct AlgorithmSpec {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  AlgorithmFn run;
  /// Included when the user asks for "all".
  bool in_all = true;
};

class Registry {
 public:
  void add(AlgorithmSpec spec) {
    if (find(spec.name)) throw Error(ErrorCode::DuplicateAlgorithmName, spec.name);
    require(!spec.name.empty() && static_cast<bool>(spec.run), ErrorCode::InvalidArgument,
            "algorithm needs a name and a callable");
    specs_.push_back(std::move(spec));
  }

  const AlgorithmSpec* find(std::string_view name) const {
    for (const auto& s : specs_) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }

  const AlgorithmSpec& at(std::string_view name) const {
    const auto* s = find(name);
    if (!s) throw Error(ErrorCode::UnknownAlgorithm, std::string(name));
    return *s;
  }

  const std::vector<AlgorithmSpec>& specs() const noexcept { return specs_; }

  std::vector<std::string> names_for_all() const {
    std::vector<std::string> out;
    for (const auto& s : specs_) {
      if (s.in_all) out.push_back(s.name);
    }
    return out;
  }

  /// Human-readable listing: name, description, then one line per parameter.
  std::string listing() const {
    std::string out;
    for (const auto& s : specs_) {
      out += s.name + (s.in_all ? "" : " (not in 'all')") + "\n    " + s.description + "\n";
      for (const auto& p : s.params) {
        out += "    " + p.key + "=" + (p.default_value.empty() ? "<required>" : p.default_value) + "  " +
               p.description + "\n";
      }
    }
    return out;
  }

 private:
  std::vector<AlgorithmSpec> specs_;
};

}  // namespace gaitnl::pipeline

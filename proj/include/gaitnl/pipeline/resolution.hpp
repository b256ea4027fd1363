#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "gaitnl/core/error.hpp"
#include "gaitnl/core/timeseries.hpp"
#include "gaitnl/pipeline/registry.hpp"
#include "gaitnl/statespace/ami.hpp"
#include "gaitnl/statespace/fnn.hpp"

namespace gaitnl::pipeline {

inline constexpr std::size_t kAutoAmiMaxLag = 100;

inline std::size_t auto_ami_max_lag(std::size_t n) {
  require(n >= 4, ErrorCode::SeriesTooShort, "AMI needs at least 4 samples");
  return std::max<std::size_t>(1, std::min(kAutoAmiMaxLag, n / 2 - 1));
}

/// tau <- first AMI minimum (16 bins); no minimum within range keeps max_lag.
inline std::size_t derive_tau(const TimeSeries& s) {
  return ami(s.samples(), auto_ami_max_lag(s.size()), kDefaultAmiBins).selected_lag;
}

/// dim <- FNN with default tolerances; a curve that never drops below the
/// threshold is a failure here, since no dimension was actually selected.
inline std::size_t derive_dim(const TimeSeries& s, std::size_t tau) {
  const auto curve = fnn(s.samples(), tau, FnnOptions{});
  if (!curve.converged) {
    fail(ErrorCode::NoConvergence, "false-neighbour fraction never fell below the threshold up to dim " +
                                       std::to_string(curve.dims.empty() ? 0 : curve.dims.back()));
  }
  return curve.selected_dim;
}

/// Per-column tau and per-(column, tau) dim, computed once and shared by
/// every task on that column. The first requester computes; others wait.
class ParameterCache {
 public:
  std::size_t tau(const std::string& file_key, const TimeSeries& s) {
    return lookup(taus_, std::make_tuple(file_key, s.name()), [&] { return derive_tau(s); });
  }

  std::size_t dim(const std::string& file_key, const TimeSeries& s, std::size_t tau) {
    return lookup(dims_, std::make_tuple(file_key, s.name(), tau), [&] { return derive_dim(s, tau); });
  }

 private:
  template <class Key, class Fn>
  std::size_t lookup(std::map<Key, std::shared_future<std::size_t>>& table, const Key& key, Fn compute) {
    std::promise<std::size_t> promise;
    std::shared_future<std::size_t> future;
    bool owner = false;
    {
      std::lock_guard lock(mutex_);
      auto it = table.find(key);
      if (it == table.end()) {
        future = promise.get_future().share();
        table.emplace(key, future);
        owner = true;
      } else {
        future = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(compute());
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return future.get();
  }

  std::mutex mutex_;
  std::map<std::tuple<std::string, std::string>, std::shared_future<std::size_t>> taus_;
  std::map<std::tuple<std::string, std::string, std::size_t>, std::shared_future<std::size_t>> dims_;
};

/// Rejects override keys the algorithm does not declare.
inline void validate_overrides(const AlgorithmSpec& spec, const std::map<std::string, std::string>& overrides) {
  for (const auto& [key, value] : overrides) {
    const bool known = std::any_of(spec.params.begin(), spec.params.end(),
                                   [&](const ParamSpec& p) { return p.key == key; });
    if (!known) fail(ErrorCode::InvalidArgument, spec.name + " has no parameter '" + key + "'");
  }
}

/// Defaults overlaid by overrides, then tau and dim resolved when auto.
/// Other auto values are left for the algorithm to interpret.
inline ParamValues resolve_parameters(const AlgorithmSpec& spec, const TimeSeries& series,
                                      const std::map<std::string, std::string>& overrides,
                                      ParameterCache& cache, const std::string& file_key) {
  validate_overrides(spec, overrides);
  ParamValues values;
  for (const auto& p : spec.params) {
    const auto it = overrides.find(p.key);
    const std::string& v = it != overrides.end() ? it->second : p.default_value;
    if (v.empty()) fail(ErrorCode::InvalidArgument, spec.name + " requires parameter '" + p.key + "'");
    values.set(p.key, v);
  }
  const auto derive = [&](const std::string& key, auto fn) {
    try {
      values.set(key, std::to_string(fn()));
    } catch (const Error& e) {
      throw AutoResolutionError(key, e.code(), e.detail());
    }
  };
  if (values.contains("tau") && values.is_auto("tau")) derive("tau", [&] { return cache.tau(file_key, series); });
  if (values.contains("dim") && values.is_auto("dim")) {
    const std::size_t tau = values.count("tau");
    derive("dim", [&] { return cache.dim(file_key, series, tau); });
  }
  return values;
}

}  // namespace gaitnl::pipeline

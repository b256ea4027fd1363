#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gaitnl {

/// One named attribute column of uniformly sampled observations.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(std::string name, std::vector<double> samples,
             std::optional<double> sample_rate_hz = std::nullopt)
      : name_(std::move(name)), samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {}

  const std::string& name() const noexcept { return name_; }
  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::optional<double> sample_rate_hz() const noexcept { return sample_rate_hz_; }

  double operator[](std::size_t i) const { return samples_[i]; }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::string name_;
  std::vector<double> samples_;
  std::optional<double> sample_rate_hz_;
};

}  // namespace gaitnl

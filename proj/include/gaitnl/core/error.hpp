#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gaitnl {

enum class ErrorCode {
  UnreadableFile,
  UnknownFormat,
  EmptyDataset,
  EmptyAttributeList,
  DuplicateAttribute,
  MissingColumn,
  NonNumericColumn,
  SeriesTooShort,
  DegenerateSeries,
  LengthMismatch,
  InvalidOrder,
  InvalidArgument,
  DegenerateFit,
  EmptyStateMatrix,
  MemoryBudgetExceeded,
  Unreachable,
  NoValidNeighbors,
  NoReplacementFound,
  NoConvergence,
  AutoResolutionFailed,
  DuplicateAlgorithmName,
  UnknownAlgorithm,
  OutputDirUnwritable,
  NoRunnableTasks,
  PlotWriteFailed,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnreadableFile: return "UnreadableFile";
    case ErrorCode::UnknownFormat: return "UnknownFormat";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptyAttributeList: return "EmptyAttributeList";
    case ErrorCode::DuplicateAttribute: return "DuplicateAttribute";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumericColumn: return "NonNumericColumn";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::EmptyStateMatrix: return "EmptyStateMatrix";
    case ErrorCode::MemoryBudgetExceeded: return "MemoryBudgetExceeded";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::NoValidNeighbors: return "NoValidNeighbors";
    case ErrorCode::NoReplacementFound: return "NoReplacementFound";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::AutoResolutionFailed: return "AutoResolutionFailed";
    case ErrorCode::DuplicateAlgorithmName: return "DuplicateAlgorithmName";
    case ErrorCode::UnknownAlgorithm: return "UnknownAlgorithm";
    case ErrorCode::OutputDirUnwritable: return "OutputDirUnwritable";
    case ErrorCode::NoRunnableTasks: return "NoRunnableTasks";
    case ErrorCode::PlotWriteFailed: return "PlotWriteFailed";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
/// `what()` is "<CodeName>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

class MemoryBudgetError : public Error {
 public:
  MemoryBudgetError(std::uint64_t estimated_bytes, std::uint64_t budget_bytes)
      : Error(ErrorCode::MemoryBudgetExceeded,
              "estimated " + std::to_string(estimated_bytes) + " bytes exceeds budget of " +
                  std::to_string(budget_bytes) + " bytes"),
        estimated_bytes_(estimated_bytes),
        budget_bytes_(budget_bytes) {}

  std::uint64_t estimated_bytes() const noexcept { return estimated_bytes_; }
  std::uint64_t budget_bytes() const noexcept { return budget_bytes_; }

 private:
  std::uint64_t estimated_bytes_;
  std::uint64_t budget_bytes_;
};

/// Raised by the radius search when no radius gets within tolerance of the
/// requested recurrence rate. Carries the closest radius that was seen.
class UnreachableRateError : public Error {
 public:
  UnreachableRateError(double target_pct, double closest_radius, double closest_rate_pct)
      : Error(ErrorCode::Unreachable,
              "target recurrence " + std::to_string(target_pct) + "% not reachable; closest " +
                  std::to_string(closest_rate_pct) + "% at radius " +
                  std::to_string(closest_radius)),
        closest_radius_(closest_radius),
        closest_rate_pct_(closest_rate_pct) {}

  double closest_radius() const noexcept { return closest_radius_; }
  double closest_rate_pct() const noexcept { return closest_rate_pct_; }

 private:
  double closest_radius_;
  double closest_rate_pct_;
};

/// A parameter marked auto could not be derived from the data.
class AutoResolutionError : public Error {
 public:
  AutoResolutionError(std::string parameter, ErrorCode cause, const std::string& cause_detail)
      : Error(ErrorCode::AutoResolutionFailed,
              parameter + " <- " + std::string(error_name(cause)) + ": " + cause_detail),
        parameter_(std::move(parameter)),
        cause_(cause) {}

  const std::string& parameter() const noexcept { return parameter_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::string parameter_;
  ErrorCode cause_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

inline void require(bool condition, ErrorCode code, const std::string& detail) {
  if (!condition) fail(code, detail);
}

}  // namespace gaitnl

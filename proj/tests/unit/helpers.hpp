#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>

namespace testing_util {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(GAITNL_FIXTURE_DIR) / name; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gaitnl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline ::testing::AssertionResult close(double actual, double expected, double tol = 1e-12) {
  const double scale = std::max(1.0, std::fabs(expected));
  if (std::fabs(actual - expected) <= tol * scale) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << actual << " vs expected " << expected << " (diff "
                                       << std::fabs(actual - expected) << ")";
}

inline ::testing::AssertionResult close(std::optional<double> actual, std::optional<double> expected,
                                        double tol = 1e-12) {
  if (!actual && !expected) return ::testing::AssertionSuccess();
  if (!actual || !expected) {
    return ::testing::AssertionFailure() << "definedness differs: " << actual.has_value() << " vs "
                                         << expected.has_value();
  }
  return close(*actual, *expected, tol);
}

}  // namespace testing_util

#define EXPECT_ERROR_CODE(stmt, expected_code)                                 \
  do {                                                                         \
    try {                                                                      \
      stmt;                                                                    \
      ADD_FAILURE() << "expected " << gaitnl::error_name(expected_code);       \
    } catch (const gaitnl::Error& e) {                                         \
      EXPECT_EQ(e.code(), expected_code) << e.what();                          \
    }                                                                          \
  } while (0)

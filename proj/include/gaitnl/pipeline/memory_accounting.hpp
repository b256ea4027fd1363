#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <fstream>
#include <string>
#include <unistd.h>

namespace gaitnl::memory {

/// Per-thread heap counters, fed by the operator new/delete replacements in
/// allocation_hooks.hpp. Without the hooks every reading stays zero.
struct Counters {
  std::int64_t current = 0;
  std::int64_t peak = 0;
};

inline thread_local constinit Counters tls_counters{};
inline std::atomic<bool> hooks_installed{false};

inline void on_allocate(std::size_t bytes) noexcept {
  auto& c = tls_counters;
  c.current += static_cast<std::int64_t>(bytes);
  if (c.current > c.peak) c.peak = c.current;
}

inline void on_free(std::size_t bytes) noexcept { tls_counters.current -= static_cast<std::int64_t>(bytes); }

/// Peak additional heap use on this thread while the scope is alive.
class PeakScope {
 public:
  PeakScope() noexcept : baseline_(tls_counters.current), saved_peak_(tls_counters.peak) {
    tls_counters.peak = baseline_;
  }
  ~PeakScope() { tls_counters.peak = std::max(saved_peak_, tls_counters.peak); }
  PeakScope(const PeakScope&) = delete;
  PeakScope& operator=(const PeakScope&) = delete;

  std::uint64_t peak_bytes() const noexcept {
    return static_cast<std::uint64_t>(std::max<std::int64_t>(0, tls_counters.peak - baseline_));
  }

 private:
  std::int64_t baseline_;
  std::int64_t saved_peak_;
};

inline std::uint64_t physical_memory_bytes() {
  const long pages = ::sysconf(_SC_PHYS_PAGES);
  const long page = ::sysconf(_SC_PAGE_SIZE);
  if (pages > 0 && page > 0) return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page);
  return 0;
}

/// 75% of physical memory; 4 GiB when it cannot be detected.
inline std::uint64_t default_memory_budget() {
  const auto phys = physical_memory_bytes();
  return phys ? phys / 4 * 3 : (std::uint64_t{4} << 30);
}

/// Process peak resident set (VmHWM) in bytes, 0 if unavailable.
inline std::uint64_t peak_rss_bytes() {
  std::ifstream in("/proc/self/status");
  std::string key;
  while (in >> key) {
    if (key == "VmHWM:") {
      std::uint64_t kb = 0;
      in >> kb;
      return kb * 1024;
    }
    in.ignore(4096, '\n');
  }
  return 0;
}

}  // namespace gaitnl::memory

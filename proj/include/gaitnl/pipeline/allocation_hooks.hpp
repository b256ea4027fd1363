#pragma once

// Replaces the global allocation functions to feed gaitnl::memory counters.
// Include from exactly one translation unit of an executable.

#include <cstddef>
#include <cstdlib>
#include <malloc.h>
#include <new>

#include "gaitnl/pipeline/memory_accounting.hpp"

namespace gaitnl::memory::detail {

inline void* counted_alloc(std::size_t size, std::size_t align) {
  if (size == 0) size = 1;
  void* p = nullptr;
  if (align <= alignof(std::max_align_t)) {
    p = std::malloc(size);
  } else if (::posix_memalign(&p, align, size) != 0) {
    p = nullptr;
  }
  if (!p) throw std::bad_alloc();
  on_allocate(::malloc_usable_size(p));
  return p;
}

inline void counted_free(void* p) noexcept {
  if (!p) return;
  on_free(::malloc_usable_size(p));
  std::free(p);
}

inline const bool hooks_registered = [] {
  hooks_installed = true;
  return true;
}();

}  // namespace gaitnl::memory::detail

void* operator new(std::size_t n) { return gaitnl::memory::detail::counted_alloc(n, 0); }
void* operator new[](std::size_t n) { return gaitnl::memory::detail::counted_alloc(n, 0); }
void* operator new(std::size_t n, std::align_val_t a) {
  return gaitnl::memory::detail::counted_alloc(n, static_cast<std::size_t>(a));
}
void* operator new[](std::size_t n, std::align_val_t a) {
  return gaitnl::memory::detail::counted_alloc(n, static_cast<std::size_t>(a));
}
void* operator new(std::size_t n, const std::nothrow_t&) noexcept {
  try {
    return gaitnl::memory::detail::counted_alloc(n, 0);
  } catch (...) {
    return nullptr;
  }
}
void* operator new[](std::size_t n, const std::nothrow_t&) noexcept {
  try {
    return gaitnl::memory::detail::counted_alloc(n, 0);
  } catch (...) {
    return nullptr;
  }
}
void operator delete(void* p) noexcept { gaitnl::memory::detail::counted_free(p); }
void operator delete[](void* p) noexcept { gaitnl::memory::detail::counted_free(p); }
void operator delete(void* p, std::size_t) noexcept { gaitnl::memory::detail::counted_free(p); }
void operator delete[](void* p, std::size_t) noexcept { gaitnl::memory::detail::counted_free(p); }
void operator delete(void* p, std::align_val_t) noexcept { gaitnl::memory::detail::counted_free(p); }
void operator delete[](void* p, std::align_val_t) noexcept { gaitnl::memory::detail::counted_free(p); }
void operator delete(void* p, std::size_t, std::align_val_t) noexcept { gaitnl::memory::detail::counted_free(p); }
void operator delete[](void* p, std::size_t, std::align_val_t) noexcept { gaitnl::memory::detail::counted_free(p); }

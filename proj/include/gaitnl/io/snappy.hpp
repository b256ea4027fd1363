#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "gaitnl/core/error.hpp"

namespace gaitnl::io {

/// Decodes a raw (unframed) Snappy block, the form Parquet pages use.
inline std::vector<std::uint8_t> snappy_decompress(std::span<const std::uint8_t> in) {
  std::size_t pos = 0;
  const auto need = [&](std::size_t n) {
    if (pos + n > in.size()) fail(ErrorCode::UnreadableFile, "truncated snappy block");
  };

  std::uint64_t expected = 0;
  for (int shift = 0;; shift += 7) {
    need(1);
    const std::uint8_t b = in[pos++];
    expected |= static_cast<std::uint64_t>(b & 0x7F) << shift;
    if (!(b & 0x80)) break;
    if (shift > 28) fail(ErrorCode::UnreadableFile, "bad snappy length varint");
  }

  std::vector<std::uint8_t> out;
  out.reserve(expected);
  while (pos < in.size()) {
    const std::uint8_t tag = in[pos++];
    std::size_t length = 0;
    std::size_t offset = 0;
    switch (tag & 0x3) {
      case 0: {
        length = (tag >> 2) + 1u;
        if (length > 60) {
          const std::size_t extra = length - 60;
          need(extra);
          length = 0;
          for (std::size_t i = 0; i < extra; ++i) length |= static_cast<std::size_t>(in[pos + i]) << (8 * i);
          length += 1;
          pos += extra;
        }
        need(length);
        out.insert(out.end(), in.begin() + static_cast<std::ptrdiff_t>(pos),
                   in.begin() + static_cast<std::ptrdiff_t>(pos + length));
        pos += length;
        continue;
      }
      case 1:
        need(1);
        length = ((tag >> 2) & 0x7) + 4u;
        offset = (static_cast<std::size_t>(tag >> 5) << 8) | in[pos];
        pos += 1;
        break;
      case 2:
        need(2);
        length = (tag >> 2) + 1u;
        offset = in[pos] | (static_cast<std::size_t>(in[pos + 1]) << 8);
        pos += 2;
        break;
      default:
        need(4);
        length = (tag >> 2) + 1u;
        offset = 0;
        for (int i = 0; i < 4; ++i) offset |= static_cast<std::size_t>(in[pos + i]) << (8 * i);
        pos += 4;
        break;
    }
    if (offset == 0 || offset > out.size()) fail(ErrorCode::UnreadableFile, "bad snappy copy offset");
    const std::size_t from = out.size() - offset;
    // Copies may overlap their own output, so go byte by byte.
    for (std::size_t i = 0; i < length; ++i) out.push_back(out[from + i]);
  }
  if (out.size() != expected) fail(ErrorCode::UnreadableFile, "snappy length mismatch");
  return out;
}

}  // namespace gaitnl::io

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/rqa/recurrence_plot.hpp"

namespace gaitnl {

/// Binary PBM ("P4") image, one bit per cell, recurrent cells black (1).
inline std::vector<std::uint8_t> encode_pgm(const RecurrencePlot& rp) {
  const std::size_t n = rp.n_points();
  const std::string header = "P4\n" + std::to_string(n) + " " + std::to_string(n) + "\n";
  const std::size_t row_bytes = (n + 7) / 8;
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + row_bytes * n);
  std::vector<std::uint8_t> row(row_bytes);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(row.begin(), row.end(), 0);
    for (std::size_t j = 0; j < n; ++j) {
      if (rp(i, j)) row[j / 8] |= static_cast<std::uint8_t>(0x80u >> (j % 8));
    }
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

inline void write_pgm(const RecurrencePlot& rp, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::PlotWriteFailed, "cannot open " + path.string());
  const auto bytes = encode_pgm(rp);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::PlotWriteFailed, "write failed for " + path.string());
}

inline constexpr char kRleMagic[4] = {'R', 'Q', 'A', '1'};
inline constexpr std::size_t kRleHeaderBytes = 32;

/// Archival form: 32-byte little-endian header
///   magic "RQA1" | u32 norm | u64 n_points | f64 radius | u32 theiler | u32 0
/// then LEB128 run lengths over the upper-triangle bit stream, alternating
/// zero-runs and one-runs, starting with a (possibly empty) zero-run.
/// Strengths are not archived.
inline std::vector<std::uint8_t> encode_rle(const RecurrencePlot& rp) {
  std::vector<std::uint8_t> out;
  const auto put = [&](std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  out.insert(out.end(), kRleMagic, kRleMagic + 4);
  put(static_cast<std::uint32_t>(rp.norm()), 4);
  put(rp.n_points(), 8);
  put(std::bit_cast<std::uint64_t>(rp.radius()), 8);
  put(rp.theiler_window(), 4);
  put(0, 4);

  const auto varint = [&](std::uint64_t v) {
    while (v >= 0x80) {
      out.push_back(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v));
  };
  const std::uint64_t cells = triangle_cells(rp.n_points());
  bool current = false;
  std::uint64_t run = 0;
  for (std::uint64_t idx = 0; idx < cells; ++idx) {
    const bool bit = rp.triangle_bit(idx);
    if (bit != current) {
      varint(run);
      run = 0;
      current = bit;
    }
    ++run;
  }
  varint(run);
  return out;
}

inline RecurrencePlot decode_rle(std::span<const std::uint8_t> in) {
  if (in.size() < kRleHeaderBytes || std::memcmp(in.data(), kRleMagic, 4) != 0) {
    fail(ErrorCode::UnreadableFile, "not an RQA1 archive");
  }
  const auto get = [&](std::size_t off, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[off + i]) << (8 * i);
    return v;
  };
  const auto norm_code = get(4, 4);
  if (norm_code > 2) fail(ErrorCode::UnreadableFile, "bad norm code in archive");
  const std::uint64_t n = get(8, 8);
  const double radius = std::bit_cast<double>(get(16, 8));
  const auto theiler = static_cast<std::size_t>(get(24, 4));

  std::vector<std::uint64_t> words(packed_bytes(n) / 8, 0);
  const std::uint64_t cells = triangle_cells(n);
  std::size_t pos = kRleHeaderBytes;
  std::uint64_t idx = 0;
  bool bit = false;
  while (pos < in.size()) {
    std::uint64_t run = 0;
    for (int shift = 0;; shift += 7) {
      if (pos >= in.size() || shift > 63) fail(ErrorCode::UnreadableFile, "truncated run length");
      const std::uint8_t b = in[pos++];
      run |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if (!(b & 0x80)) break;
    }
    if (idx + run > cells) fail(ErrorCode::UnreadableFile, "runs overflow the matrix");
    if (bit) {
      for (std::uint64_t k = idx; k < idx + run; ++k) words[k >> 6] |= std::uint64_t{1} << (k & 63);
    }
    idx += run;
    bit = !bit;
  }
  if (idx != cells) fail(ErrorCode::UnreadableFile, "runs do not cover the matrix");
  return RecurrencePlot(static_cast<std::size_t>(n), radius, static_cast<Norm>(norm_code), theiler, std::move(words));
}

inline void write_rle(const RecurrencePlot& rp, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::PlotWriteFailed, "cannot open " + path.string());
  const auto bytes = encode_rle(rp);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline RecurrencePlot read_rle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::UnreadableFile, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_rle(bytes);
}

}  // namespace gaitnl

#pragma once

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/io/snappy.hpp"
#include "gaitnl/io/table.hpp"
#include "gaitnl/io/thrift_compact.hpp"

// Flat-schema Parquet support: reads PLAIN and dictionary encoded pages
// (v1 and v2) compressed with nothing, Snappy or gzip; writes uncompressed
// PLAIN files.
namespace gaitnl::io {

namespace parquet {

inline constexpr char kMagic[4] = {'P', 'A', 'R', '1'};

enum PhysicalType : int {
  kBoolean = 0,
  kInt32 = 1,
  kInt64 = 2,
  kInt96 = 3,
  kFloat = 4,
  kDouble = 5,
  kByteArray = 6,
  kFixedLenByteArray = 7,
};

enum Encoding : int { kPlain = 0, kPlainDictionary = 2, kRle = 3, kRleDictionary = 8 };
enum Codec : int { kUncompressed = 0, kSnappy = 1, kGzip = 2 };
enum PageType : int { kDataPage = 0, kIndexPage = 1, kDictionaryPage = 2, kDataPageV2 = 3 };
enum Repetition : int { kRequired = 0, kOptional = 1, kRepeated = 2 };
inline constexpr int kConvertedUtf8 = 0;
inline constexpr int kConvertedDecimal = 5;

struct SchemaElement {
  int type = -1;
  int type_length = 0;
  int repetition = kRequired;
  std::string name;
  int num_children = 0;
  int converted_type = -1;
  int scale = 0;
};

struct ColumnMeta {
  int type = -1;
  int codec = kUncompressed;
  std::int64_t num_values = 0;
  std::int64_t data_page_offset = -1;
  std::int64_t dictionary_page_offset = -1;
  std::int64_t total_compressed_size = 0;
};

struct RowGroup {
  std::int64_t num_rows = 0;
  std::vector<ColumnMeta> columns;
};

struct FileMeta {
  std::vector<SchemaElement> schema;
  std::int64_t num_rows = 0;
  std::vector<RowGroup> row_groups;
};

struct PageHeader {
  int type = -1;
  std::int32_t uncompressed_size = 0;
  std::int32_t compressed_size = 0;
  std::int32_t num_values = 0;
  int encoding = kPlain;
  // v2 only
  std::int32_t num_nulls = 0;
  std::int32_t def_levels_length = 0;
  std::int32_t rep_levels_length = 0;
  bool is_compressed = true;
};

using thrift::Reader;
using thrift::Type;

inline SchemaElement read_schema_element(Reader& r) {
  SchemaElement e;
  r.begin_struct();
  for (auto h = r.field(); h.type != Type::Stop; h = r.field()) {
    switch (h.id) {
      case 1: e.type = r.i32(); break;
      case 2: e.type_length = r.i32(); break;
      case 3: e.repetition = r.i32(); break;
      case 4: e.name = r.binary(); break;
      case 5: e.num_children = r.i32(); break;
      case 6: e.converted_type = r.i32(); break;
      case 7: e.scale = r.i32(); break;
      default: r.skip(h.type);
    }
  }
  r.end_struct();
  return e;
}

inline ColumnMeta read_column_meta(Reader& r) {
  ColumnMeta m;
  r.begin_struct();
  for (auto h = r.field(); h.type != Type::Stop; h = r.field()) {
    switch (h.id) {
      case 1: m.type = r.i32(); break;
      case 4: m.codec = r.i32(); break;
      case 5: m.num_values = r.i64(); break;
      case 7: m.total_compressed_size = r.i64(); break;
      case 9: m.data_page_offset = r.i64(); break;
      case 11: m.dictionary_page_offset = r.i64(); break;
      default: r.skip(h.type);
    }
  }
  r.end_struct();
  return m;
}

inline RowGroup read_row_group(Reader& r) {
  RowGroup g;
  r.begin_struct();
  for (auto h = r.field(); h.type != Type::Stop; h = r.field()) {
    if (h.id == 1 && h.type == Type::List) {
      const auto lh = r.list();
      for (std::uint32_t i = 0; i < lh.size; ++i) {
        ColumnMeta meta;
        bool has_meta = false;
        r.begin_struct();
        for (auto ch = r.field(); ch.type != Type::Stop; ch = r.field()) {
          if (ch.id == 3 && ch.type == Type::Struct) {
            meta = read_column_meta(r);
            has_meta = true;
          } else {
            r.skip(ch.type);
          }
        }
        r.end_struct();
        if (!has_meta) fail(ErrorCode::UnreadableFile, "column chunk without inline metadata");
        g.columns.push_back(meta);
      }
    } else if (h.id == 3) {
      g.num_rows = r.i64();
    } else {
      r.skip(h.type);
    }
  }
  r.end_struct();
  return g;
}

inline FileMeta read_file_meta(std::span<const std::uint8_t> footer) {
  Reader r(footer);
  FileMeta meta;
  r.begin_struct();
  for (auto h = r.field(); h.type != Type::Stop; h = r.field()) {
    if (h.id == 2 && h.type == Type::List) {
      const auto lh = r.list();
      for (std::uint32_t i = 0; i < lh.size; ++i) meta.schema.push_back(read_schema_element(r));
    } else if (h.id == 3) {
      meta.num_rows = r.i64();
    } else if (h.id == 4 && h.type == Type::List) {
      const auto lh = r.list();
      for (std::uint32_t i = 0; i < lh.size; ++i) meta.row_groups.push_back(read_row_group(r));
    } else {
      r.skip(h.type);
    }
  }
  r.end_struct();
  return meta;
}

inline PageHeader read_page_header(Reader& r) {
  PageHeader p;
  r.begin_struct();
  for (auto h = r.field(); h.type != Type::Stop; h = r.field()) {
    switch (h.id) {
      case 1: p.type = r.i32(); break;
      case 2: p.uncompressed_size = r.i32(); break;
      case 3: p.compressed_size = r.i32(); break;
      case 5:  // DataPageHeader
      case 7:  // DictionaryPageHeader
        r.begin_struct();
        for (auto d = r.field(); d.type != Type::Stop; d = r.field()) {
          if (d.id == 1) p.num_values = r.i32();
          else if (d.id == 2) p.encoding = r.i32();
          else r.skip(d.type);
        }
        r.end_struct();
        break;
      case 8:  // DataPageHeaderV2
        r.begin_struct();
        for (auto d = r.field(); d.type != Type::Stop; d = r.field()) {
          switch (d.id) {
            case 1: p.num_values = r.i32(); break;
            case 2: p.num_nulls = r.i32(); break;
            case 4: p.encoding = r.i32(); break;
            case 5: p.def_levels_length = r.i32(); break;
            case 6: p.rep_levels_length = r.i32(); break;
            case 7: p.is_compressed = r.boolean(d.type); break;
            default: r.skip(d.type);
          }
        }
        r.end_struct();
        break;
      default: r.skip(h.type);
    }
  }
  r.end_struct();
  return p;
}

inline std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> in, std::size_t expected) {
  std::vector<std::uint8_t> out(expected);
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) fail(ErrorCode::UnreadableFile, "zlib init failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) fail(ErrorCode::UnreadableFile, "gzip page decode failed");
  return out;
}

inline std::vector<std::uint8_t> decompress(int codec, std::span<const std::uint8_t> in, std::size_t expected) {
  switch (codec) {
    case kUncompressed:
      return {in.begin(), in.end()};
    case kSnappy:
      return snappy_decompress(in);
    case kGzip:
      return gunzip(in, expected);
    default:
      fail(ErrorCode::UnreadableFile, "unsupported parquet compression codec " + std::to_string(codec));
  }
}

/// RLE / bit-packed hybrid decoding of `count` unsigned values.
inline std::vector<std::uint32_t> decode_hybrid(std::span<const std::uint8_t> data, int bit_width,
                                                std::size_t count) {
  std::vector<std::uint32_t> out;
  out.reserve(count);
  std::size_t pos = 0;
  const auto varint = [&] {
    std::uint64_t v = 0;
    for (int shift = 0;; shift += 7) {
      if (pos >= data.size()) fail(ErrorCode::UnreadableFile, "truncated RLE data");
      const std::uint8_t b = data[pos++];
      v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if (!(b & 0x80)) return v;
      if (shift > 56) fail(ErrorCode::UnreadableFile, "bad RLE varint");
    }
  };
  const std::size_t value_bytes = (static_cast<std::size_t>(bit_width) + 7) / 8;
  while (out.size() < count) {
    const std::uint64_t header = varint();
    if (header & 1) {
      const std::size_t n = static_cast<std::size_t>(header >> 1) * 8;
      const std::size_t nbytes = (n * static_cast<std::size_t>(bit_width) + 7) / 8;
      if (pos + nbytes > data.size()) fail(ErrorCode::UnreadableFile, "truncated bit-packed run");
      for (std::size_t i = 0; i < n && out.size() < count; ++i) {
        std::uint32_t v = 0;
        for (int b = 0; b < bit_width; ++b) {
          const std::size_t bit = i * static_cast<std::size_t>(bit_width) + static_cast<std::size_t>(b);
          if (data[pos + bit / 8] >> (bit % 8) & 1u) v |= 1u << b;
        }
        out.push_back(v);
      }
      pos += nbytes;
    } else {
      const std::size_t n = static_cast<std::size_t>(header >> 1);
      if (pos + value_bytes > data.size()) fail(ErrorCode::UnreadableFile, "truncated RLE run");
      std::uint32_t v = 0;
      for (std::size_t b = 0; b < value_bytes; ++b) v |= static_cast<std::uint32_t>(data[pos + b]) << (8 * b);
      pos += value_bytes;
      for (std::size_t i = 0; i < n && out.size() < count; ++i) out.push_back(v);
    }
  }
  return out;
}

/// Values of one column as either doubles or strings, depending on type.
struct ValueBuffer {
  std::vector<double> numbers;
  std::vector<std::string> strings;
};

template <typename T>
T load_le(const std::uint8_t* p) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(p[i]) << (8 * i);
  return std::bit_cast<T>(u);
}

inline void decode_plain(std::span<const std::uint8_t> data, const SchemaElement& leaf, std::size_t count,
                         ValueBuffer& out) {
  std::size_t pos = 0;
  const auto need = [&](std::size_t n) {
    if (pos + n > data.size()) fail(ErrorCode::UnreadableFile, "truncated PLAIN values in column " + leaf.name);
  };
  const double decimal_scale =
      leaf.converted_type == kConvertedDecimal ? std::pow(10.0, static_cast<double>(leaf.scale)) : 1.0;
  for (std::size_t i = 0; i < count; ++i) {
    switch (leaf.type) {
      case kBoolean:
        if (i / 8 >= data.size()) fail(ErrorCode::UnreadableFile, "truncated booleans in column " + leaf.name);
        out.numbers.push_back((data[i / 8] >> (i % 8)) & 1u ? 1.0 : 0.0);
        break;
      case kInt32:
        need(4);
        out.numbers.push_back(static_cast<double>(load_le<std::int32_t>(data.data() + pos)) / decimal_scale);
        pos += 4;
        break;
      case kInt64:
        need(8);
        out.numbers.push_back(static_cast<double>(load_le<std::int64_t>(data.data() + pos)) / decimal_scale);
        pos += 8;
        break;
      case kFloat:
        need(4);
        out.numbers.push_back(static_cast<double>(load_le<float>(data.data() + pos)));
        pos += 4;
        break;
      case kDouble:
        need(8);
        out.numbers.push_back(load_le<double>(data.data() + pos));
        pos += 8;
        break;
      case kByteArray: {
        need(4);
        const auto len = load_le<std::uint32_t>(data.data() + pos);
        pos += 4;
        need(len);
        out.strings.emplace_back(reinterpret_cast<const char*>(data.data() + pos), len);
        pos += len;
        break;
      }
      case kFixedLenByteArray:
      case kInt96: {
        const std::size_t len = leaf.type == kInt96 ? 12 : static_cast<std::size_t>(leaf.type_length);
        need(len);
        out.strings.emplace_back(reinterpret_cast<const char*>(data.data() + pos), len);
        pos += len;
        break;
      }
      default:
        fail(ErrorCode::UnreadableFile, "unknown physical type in column " + leaf.name);
    }
  }
}

inline bool is_numeric_type(int t) {
  return t == kBoolean || t == kInt32 || t == kInt64 || t == kFloat || t == kDouble;
}

inline void read_chunk(std::span<const std::uint8_t> file, const ColumnMeta& meta, const SchemaElement& leaf,
                       std::int64_t rows, RawColumn& col) {
  if (leaf.repetition == kRepeated) fail(ErrorCode::UnreadableFile, "repeated column " + leaf.name);
  const bool optional = leaf.repetition == kOptional;
  const bool numeric = is_numeric_type(leaf.type);

  std::int64_t start = meta.data_page_offset;
  if (meta.dictionary_page_offset > 0 && meta.dictionary_page_offset < start) start = meta.dictionary_page_offset;
  if (start < 4 || static_cast<std::size_t>(start) >= file.size()) {
    fail(ErrorCode::UnreadableFile, "bad page offset in column " + leaf.name);
  }

  ValueBuffer dictionary;
  std::int64_t produced = 0;
  std::size_t pos = static_cast<std::size_t>(start);
  while (produced < rows) {
    if (pos >= file.size()) fail(ErrorCode::UnreadableFile, "column " + leaf.name + " ends early");
    Reader r(file.subspan(pos));
    const PageHeader page = read_page_header(r);
    pos += r.position();
    if (page.compressed_size < 0 || pos + static_cast<std::size_t>(page.compressed_size) > file.size()) {
      fail(ErrorCode::UnreadableFile, "page overruns file in column " + leaf.name);
    }
    const auto payload = file.subspan(pos, static_cast<std::size_t>(page.compressed_size));
    pos += static_cast<std::size_t>(page.compressed_size);

    if (page.type == kDictionaryPage) {
      const auto raw = decompress(meta.codec, payload, static_cast<std::size_t>(page.uncompressed_size));
      dictionary = {};
      decode_plain(raw, leaf, static_cast<std::size_t>(page.num_values), dictionary);
      continue;
    }
    if (page.type != kDataPage && page.type != kDataPageV2) continue;

    std::vector<std::uint8_t> body;
    std::vector<std::uint32_t> def_levels;
    const auto n = static_cast<std::size_t>(page.num_values);
    if (page.type == kDataPage) {
      body = decompress(meta.codec, payload, static_cast<std::size_t>(page.uncompressed_size));
      std::size_t off = 0;
      if (optional) {
        if (body.size() < 4) fail(ErrorCode::UnreadableFile, "truncated definition levels");
        const auto len = load_le<std::uint32_t>(body.data());
        if (4 + static_cast<std::size_t>(len) > body.size()) fail(ErrorCode::UnreadableFile, "bad definition levels");
        def_levels = decode_hybrid(std::span(body).subspan(4, len), 1, n);
        off = 4 + len;
      }
      body.erase(body.begin(), body.begin() + static_cast<std::ptrdiff_t>(off));
    } else {
      const auto levels = static_cast<std::size_t>(page.rep_levels_length + page.def_levels_length);
      if (levels > payload.size()) fail(ErrorCode::UnreadableFile, "bad v2 level lengths");
      if (optional) {
        def_levels = decode_hybrid(
            payload.subspan(static_cast<std::size_t>(page.rep_levels_length),
                            static_cast<std::size_t>(page.def_levels_length)),
            1, n);
      }
      const auto values = payload.subspan(levels);
      body = page.is_compressed
                 ? decompress(meta.codec, values, static_cast<std::size_t>(page.uncompressed_size) - levels)
                 : std::vector<std::uint8_t>(values.begin(), values.end());
    }

    std::size_t present = n;
    if (optional) {
      present = 0;
      for (auto d : def_levels) present += d;
    }

    ValueBuffer values;
    if (page.encoding == kPlain) {
      decode_plain(body, leaf, present, values);
    } else if (page.encoding == kPlainDictionary || page.encoding == kRleDictionary) {
      if (body.empty()) {
        if (present) fail(ErrorCode::UnreadableFile, "empty dictionary-index page");
      } else {
        const int width = body.front();
        const auto idx = decode_hybrid(std::span(body).subspan(1), width, present);
        for (auto k : idx) {
          const std::size_t dict_size = numeric ? dictionary.numbers.size() : dictionary.strings.size();
          if (k >= dict_size) fail(ErrorCode::UnreadableFile, "dictionary index out of range");
          if (numeric) values.numbers.push_back(dictionary.numbers[k]);
          else values.strings.push_back(dictionary.strings[k]);
        }
      }
    } else {
      fail(ErrorCode::UnreadableFile, "unsupported encoding " + std::to_string(page.encoding) + " in column " +
                                          leaf.name);
    }

    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool is_null = optional && def_levels[i] == 0;
      if (numeric) {
        col.values.push_back(is_null ? std::numeric_limits<double>::quiet_NaN() : values.numbers[next]);
      } else {
        col.text.push_back(is_null ? std::string() : values.strings[next]);
      }
      if (!is_null) ++next;
    }
    produced += page.num_values;
  }
}

}  // namespace parquet

inline bool has_parquet_magic(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 4 && std::memcmp(bytes.data(), parquet::kMagic, 4) == 0;
}

inline RawTable parse_parquet(std::span<const std::uint8_t> file) {
  using namespace parquet;
  if (file.size() < 12 || !has_parquet_magic(file) || std::memcmp(file.data() + file.size() - 4, kMagic, 4) != 0) {
    fail(ErrorCode::UnreadableFile, "missing parquet magic bytes");
  }
  const auto footer_len = load_le<std::uint32_t>(file.data() + file.size() - 8);
  if (static_cast<std::size_t>(footer_len) + 12 > file.size()) fail(ErrorCode::UnreadableFile, "bad footer length");
  const FileMeta meta = read_file_meta(file.subspan(file.size() - 8 - footer_len, footer_len));

  if (meta.schema.empty()) fail(ErrorCode::EmptyDataset, "parquet schema is empty");
  std::vector<SchemaElement> leaves(meta.schema.begin() + 1, meta.schema.end());
  for (const auto& e : leaves) {
    if (e.num_children > 0) fail(ErrorCode::UnreadableFile, "nested parquet schemas are not supported");
  }
  if (leaves.empty() || meta.num_rows == 0) fail(ErrorCode::EmptyDataset, "parquet file has no rows or columns");

  RawTable table;
  for (const auto& leaf : leaves) table.columns.push_back(RawColumn{.name = leaf.name, .numeric = is_numeric_type(leaf.type)});
  for (const auto& group : meta.row_groups) {
    if (group.columns.size() != leaves.size()) fail(ErrorCode::UnreadableFile, "row group column count mismatch");
    for (std::size_t c = 0; c < leaves.size(); ++c) {
      read_chunk(file, group.columns[c], leaves[c], group.num_rows, table.columns[c]);
    }
  }
  for (const auto& col : table.columns) {
    if (col.size() != static_cast<std::size_t>(meta.num_rows)) {
      fail(ErrorCode::UnreadableFile, "column " + col.name + " row count disagrees with footer");
    }
  }
  return table;
}

/// Writes a single row group, uncompressed PLAIN, all columns REQUIRED.
/// Numeric columns become DOUBLE, text columns UTF8 BYTE_ARRAY.
inline std::vector<std::uint8_t> to_parquet(const RawTable& table) {
  using namespace parquet;
  using thrift::Writer;
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  const auto rows = static_cast<std::int64_t>(table.rows());

  struct ChunkInfo {
    std::int64_t offset;
    std::int64_t size;
  };
  std::vector<ChunkInfo> chunks;

  for (const auto& col : table.columns) {
    std::vector<std::uint8_t> values;
    if (col.numeric) {
      for (double v : col.values) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) values.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
      }
    } else {
      for (const auto& s : col.text) {
        const auto len = static_cast<std::uint32_t>(s.size());
        for (int i = 0; i < 4; ++i) values.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
        values.insert(values.end(), s.begin(), s.end());
      }
    }
    Writer page;
    page.begin_struct();
    page.i32_field(1, kDataPage);
    page.i32_field(2, static_cast<std::int32_t>(values.size()));
    page.i32_field(3, static_cast<std::int32_t>(values.size()));
    page.field(5, thrift::Type::Struct);
    page.begin_struct();
    page.i32_field(1, static_cast<std::int32_t>(rows));
    page.i32_field(2, kPlain);
    page.i32_field(3, kRle);
    page.i32_field(4, kRle);
    page.end_struct();
    page.end_struct();

    const auto offset = static_cast<std::int64_t>(out.size());
    out.insert(out.end(), page.bytes().begin(), page.bytes().end());
    out.insert(out.end(), values.begin(), values.end());
    chunks.push_back({offset, static_cast<std::int64_t>(out.size()) - offset});
  }

  Writer meta;
  meta.begin_struct();
  meta.i32_field(1, 1);
  meta.field(2, thrift::Type::List);
  meta.list_header(thrift::Type::Struct, static_cast<std::uint32_t>(table.columns.size() + 1));
  meta.begin_struct();
  meta.binary_field(4, "schema");
  meta.i32_field(5, static_cast<std::int32_t>(table.columns.size()));
  meta.end_struct();
  for (const auto& col : table.columns) {
    meta.begin_struct();
    meta.i32_field(1, col.numeric ? kDouble : kByteArray);
    meta.i32_field(3, kRequired);
    meta.binary_field(4, col.name);
    if (!col.numeric) meta.i32_field(6, kConvertedUtf8);
    meta.end_struct();
  }
  meta.i64_field(3, rows);
  meta.field(4, thrift::Type::List);
  meta.list_header(thrift::Type::Struct, 1);
  meta.begin_struct();
  meta.field(1, thrift::Type::List);
  meta.list_header(thrift::Type::Struct, static_cast<std::uint32_t>(table.columns.size()));
  std::int64_t total = 0;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const auto& col = table.columns[c];
    total += chunks[c].size;
    meta.begin_struct();
    meta.i64_field(2, chunks[c].offset);
    meta.field(3, thrift::Type::Struct);
    meta.begin_struct();
    meta.i32_field(1, col.numeric ? kDouble : kByteArray);
    meta.field(2, thrift::Type::List);
    meta.list_header(thrift::Type::I32, 1);
    meta.zigzag(kPlain);
    meta.field(3, thrift::Type::List);
    meta.list_header(thrift::Type::Binary, 1);
    meta.binary(col.name);
    meta.i32_field(4, kUncompressed);
    meta.i64_field(5, rows);
    meta.i64_field(6, chunks[c].size);
    meta.i64_field(7, chunks[c].size);
    meta.i64_field(9, chunks[c].offset);
    meta.end_struct();
    meta.end_struct();
  }
  meta.i64_field(2, total);
  meta.i64_field(3, rows);
  meta.end_struct();
  meta.binary_field(6, "gaitnl");
  meta.end_struct();

  const auto footer_len = static_cast<std::uint32_t>(meta.bytes().size());
  out.insert(out.end(), meta.bytes().begin(), meta.bytes().end());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(footer_len >> (8 * i)));
  out.insert(out.end(), kMagic, kMagic + 4);
  return out;
}

}  // namespace gaitnl::io

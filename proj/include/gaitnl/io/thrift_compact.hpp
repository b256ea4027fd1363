#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "gaitnl/core/error.hpp"

// Minimal Thrift compact protocol, enough for Parquet footers and page headers.
namespace gaitnl::io::thrift {

enum class Type : std::uint8_t {
  Stop = 0,
  BoolTrue = 1,
  BoolFalse = 2,
  Byte = 3,
  I16 = 4,
  I32 = 5,
  I64 = 6,
  Double = 7,
  Binary = 8,
  List = 9,
  Set = 10,
  Map = 11,
  Struct = 12,
};

struct FieldHeader {
  std::int16_t id = 0;
  Type type = Type::Stop;
};

struct ListHeader {
  std::uint32_t size = 0;
  Type elem = Type::Stop;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t position() const { return pos_; }

  /// Call at the start of each struct; field ids are delta-coded per struct.
  void begin_struct() { last_ids_.push_back(0); }
  void end_struct() { last_ids_.pop_back(); }

  FieldHeader field() {
    const std::uint8_t b = byte();
    FieldHeader h;
    h.type = static_cast<Type>(b & 0x0F);
    if (h.type == Type::Stop) return h;
    const std::uint8_t delta = b >> 4;
    h.id = delta ? static_cast<std::int16_t>(last_ids_.back() + delta) : static_cast<std::int16_t>(zigzag());
    last_ids_.back() = h.id;
    return h;
  }

  bool boolean(Type t) { return t == Type::BoolTrue; }
  std::int32_t i32() { return static_cast<std::int32_t>(zigzag()); }
  std::int64_t i64() { return zigzag(); }

  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  std::string binary() {
    const std::uint64_t n = varint();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  ListHeader list() {
    const std::uint8_t b = byte();
    ListHeader h;
    h.elem = static_cast<Type>(b & 0x0F);
    h.size = b >> 4;
    if (h.size == 15) h.size = static_cast<std::uint32_t>(varint());
    return h;
  }

  void skip(Type t) {
    switch (t) {
      case Type::BoolTrue:
      case Type::BoolFalse:
        return;
      case Type::Byte:
        byte();
        return;
      case Type::I16:
      case Type::I32:
      case Type::I64:
        varint();
        return;
      case Type::Double:
        need(8);
        pos_ += 8;
        return;
      case Type::Binary: {
        const std::uint64_t n = varint();
        need(n);
        pos_ += n;
        return;
      }
      case Type::List:
      case Type::Set: {
        const ListHeader h = list();
        for (std::uint32_t i = 0; i < h.size; ++i) skip_element(h.elem);
        return;
      }
      case Type::Map: {
        const std::uint64_t n = varint();
        if (n == 0) return;
        const std::uint8_t kv = byte();
        for (std::uint64_t i = 0; i < n; ++i) {
          skip_element(static_cast<Type>(kv >> 4));
          skip_element(static_cast<Type>(kv & 0x0F));
        }
        return;
      }
      case Type::Struct:
        skip_struct();
        return;
      case Type::Stop:
        return;
    }
    fail(ErrorCode::UnreadableFile, "unknown thrift type");
  }

  void skip_struct() {
    begin_struct();
    for (FieldHeader h = field(); h.type != Type::Stop; h = field()) skip(h.type);
    end_struct();
  }

 private:
  void skip_element(Type t) {
    // Inside containers booleans occupy one byte.
    if (t == Type::BoolTrue || t == Type::BoolFalse) {
      byte();
      return;
    }
    skip(t);
  }

  void need(std::uint64_t n) const {
    if (pos_ + n > data_.size()) fail(ErrorCode::UnreadableFile, "truncated thrift structure");
  }

  std::uint8_t byte() {
    need(1);
    return data_[pos_++];
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const std::uint8_t b = byte();
      v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if (!(b & 0x80)) return v;
    }
    fail(ErrorCode::UnreadableFile, "varint too long");
  }

  std::int64_t zigzag() {
    const std::uint64_t u = varint();
    return static_cast<std::int64_t>(u >> 1) ^ -static_cast<std::int64_t>(u & 1);
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::vector<std::int16_t> last_ids_{0};
};

class Writer {
 public:
  std::vector<std::uint8_t>& bytes() { return out_; }

  void begin_struct() { last_ids_.push_back(0); }
  void end_struct() {
    out_.push_back(0);
    last_ids_.pop_back();
  }

  void field(std::int16_t id, Type t) {
    const int delta = id - last_ids_.back();
    if (delta > 0 && delta <= 15) {
      out_.push_back(static_cast<std::uint8_t>((delta << 4) | static_cast<int>(t)));
    } else {
      out_.push_back(static_cast<std::uint8_t>(t));
      zigzag(id);
    }
    last_ids_.back() = id;
  }

  void i32_field(std::int16_t id, std::int32_t v) {
    field(id, Type::I32);
    zigzag(v);
  }
  void i64_field(std::int16_t id, std::int64_t v) {
    field(id, Type::I64);
    zigzag(v);
  }
  void binary_field(std::int16_t id, const std::string& s) {
    field(id, Type::Binary);
    binary(s);
  }

  void list_header(Type elem, std::uint32_t size) {
    if (size < 15) {
      out_.push_back(static_cast<std::uint8_t>((size << 4) | static_cast<unsigned>(elem)));
    } else {
      out_.push_back(static_cast<std::uint8_t>(0xF0 | static_cast<unsigned>(elem)));
      varint(size);
    }
  }

  void binary(const std::string& s) {
    varint(s.size());
    out_.insert(out_.end(), s.begin(), s.end());
  }

  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      out_.push_back(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    out_.push_back(static_cast<std::uint8_t>(v));
  }

  void zigzag(std::int64_t v) {
    varint((static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63));
  }

 private:
  std::vector<std::uint8_t> out_;
  std::vector<std::int16_t> last_ids_{0};
};

}  // namespace gaitnl::io::thrift

#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "deobs/error.hpp"

namespace deobs::detail {

class ByteWriter {
 public:
  void bytes(std::span<const std::uint8_t> data) {
    out_.insert(out_.end(), data.begin(), data.end());
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { little_endian(v, 2); }
  void u32(std::uint32_t v) { little_endian(v, 4); }
  void u64(std::uint64_t v) { little_endian(v, 8); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }

  std::vector<std::uint8_t> take() && { return std::move(out_); }

 private:
  void little_endian(std::uint64_t v, int width) {
    for (int b = 0; b < width; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }

  std::vector<std::uint8_t> out_;
};

/// Bounds-checked reader; every overrun is a MalformedFile error.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::span<const std::uint8_t> bytes(std::size_t count, const char* what) {
    if (count > remaining()) {
      throw Error(ErrorCode::kMalformedFile,
                  std::string("truncated while reading ") + what);
    }
    auto out = data_.subspan(pos_, count);
    pos_ += count;
    return out;
  }
  std::uint8_t u8(const char* what) { return bytes(1, what)[0]; }
  std::uint16_t u16(const char* what) {
    return static_cast<std::uint16_t>(little_endian(2, what));
  }
  std::uint32_t u32(const char* what) {
    return static_cast<std::uint32_t>(little_endian(4, what));
  }
  std::uint64_t u64(const char* what) { return little_endian(8, what); }
  double f64(const char* what) {
    const std::uint64_t bits = u64(what);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }

  void expect_end() const {
    if (remaining() != 0) {
      throw Error(ErrorCode::kMalformedFile,
                  std::to_string(remaining()) + " trailing bytes");
    }
  }

 private:
  std::uint64_t little_endian(int width, const char* what) {
    const auto raw = bytes(static_cast<std::size_t>(width), what);
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) v |= std::uint64_t{raw[b]} << (8 * b);
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace deobs::detail

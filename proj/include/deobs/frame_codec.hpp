#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace deobs {

/// Largest supported side length; every coordinate must fit in one byte.
inline constexpr std::size_t kMaxSide = 256;

/// A single grayscale observation, row-major, one byte per pixel.
class Frame {
 public:
  Frame() = default;

  /// Zero-filled frame. Throws InvalidConfig for sides outside 1..256.
  Frame(std::size_t height, std::size_t width);

  /// Throws DimensionMismatch when `pixels.size() != height * width`.
  Frame(std::size_t height, std::size_t width, std::vector<std::uint8_t> pixels);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  std::uint8_t at(std::size_t row, std::size_t col) const {
    return pixels_[row * width_ + col];
  }
  std::uint8_t& at(std::size_t row, std::size_t col) {
    return pixels_[row * width_ + col];
  }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  bool same_shape(const Frame& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Throws InvalidConfig unless both sides are in 1..256.
void check_dimensions(std::size_t height, std::size_t width);

struct PixelCoord {
  std::uint8_t row;
  std::uint8_t col;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Difference between a frame and its base, either as a coordinate list of
/// nonzero deltas or, when that list would outgrow the image, a raw copy.
///
/// Sparse records keep `inds` strictly ascending in row-major order and never
/// store a zero delta, so two records of the same diff are byte-identical.
class DiffRecord {
 public:
  enum class Kind : std::uint8_t { kSparse, kDense };

  DiffRecord() = default;

  static DiffRecord sparse(std::size_t height, std::size_t width,
                           std::vector<PixelCoord> inds,
                           std::vector<std::int16_t> vals);
  static DiffRecord dense(Frame frame);

  Kind kind() const noexcept { return kind_; }
  bool is_sparse() const noexcept { return kind_ == Kind::kSparse; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }

  /// Number of stored entries: n for sparse records, 0 for dense ones.
  std::size_t entry_count() const noexcept { return inds_.size(); }

  std::span<const PixelCoord> inds() const noexcept { return inds_; }
  std::span<const std::int16_t> vals() const noexcept { return vals_; }
  std::span<const std::uint8_t> dense_pixels() const noexcept { return dense_; }

  friend bool operator==(const DiffRecord&, const DiffRecord&) = default;

 private:
  friend DiffRecord encode_diff(const Frame& base, const Frame& target);

  Kind kind_ = Kind::kSparse;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<PixelCoord> inds_;
  std::vector<std::int16_t> vals_;
  std::vector<std::uint8_t> dense_;
};

/// Encodes `target - base`. The result is dense iff 4 * (differing pixels)
/// exceeds the pixel count.
DiffRecord encode_diff(const Frame& base, const Frame& target);

/// Applies a record to its base frame. Throws CorruptDiff on out-of-range
/// coordinates or reconstructed values, DimensionMismatch on shape mismatch.
Frame decode_diff(const Frame& base, const DiffRecord& diff);

/// In-place variant of decode_diff; `out` must already have base's shape.
void decode_diff_into(const Frame& base, const DiffRecord& diff, Frame& out);

/// Model byte size: 4n for sparse (2 index + 2 value bytes per entry),
/// height * width for dense.
std::size_t payload_bytes(const DiffRecord& diff) noexcept;

}  // namespace deobs

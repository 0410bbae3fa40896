#include "deobs/frame_codec.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "deobs/error.hpp"

namespace deobs {

void check_dimensions(std::size_t height, std::size_t width) {
  if (height == 0 || width == 0 || height > kMaxSide || width > kMaxSide) {
    throw Error(ErrorCode::kInvalidConfig,
                "frame dimensions " + std::to_string(height) + "x" +
                    std::to_string(width) + " outside 1..256");
  }
}

Frame::Frame(std::size_t height, std::size_t width)
    : height_(height), width_(width) {
  check_dimensions(height, width);
  pixels_.assign(height * width, 0);
}

Frame::Frame(std::size_t height, std::size_t width,
             std::vector<std::uint8_t> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  check_dimensions(height, width);
  if (pixels_.size() != height * width) {
    throw Error(ErrorCode::kDimensionMismatch,
                "pixel buffer of " + std::to_string(pixels_.size()) +
                    " bytes for a " + std::to_string(height) + "x" +
                    std::to_string(width) + " frame");
  }
}

DiffRecord DiffRecord::sparse(std::size_t height, std::size_t width,
                              std::vector<PixelCoord> inds,
                              std::vector<std::int16_t> vals) {
  check_dimensions(height, width);
  if (inds.size() != vals.size()) {
    throw Error(ErrorCode::kCorruptDiff, "index/value length mismatch");
  }
  if (4 * inds.size() > height * width) {
    throw Error(ErrorCode::kCorruptDiff,
                "sparse record larger than its dense fallback");
  }
  long prev = -1;
  for (std::size_t k = 0; k < inds.size(); ++k) {
    const auto [row, col] = inds[k];
    if (row >= height || col >= width) {
      throw Error(ErrorCode::kCorruptDiff, "coordinate outside frame");
    }
    const long linear = static_cast<long>(row) * static_cast<long>(width) + col;
    if (linear <= prev) {
      throw Error(ErrorCode::kCorruptDiff, "entries not strictly row-major");
    }
    prev = linear;
    if (vals[k] == 0 || vals[k] < -255 || vals[k] > 255) {
      throw Error(ErrorCode::kCorruptDiff, "delta outside [-255, 255] \\ {0}");
    }
  }
  DiffRecord out;
  out.kind_ = Kind::kSparse;
  out.height_ = height;
  out.width_ = width;
  out.inds_ = std::move(inds);
  out.vals_ = std::move(vals);
  return out;
}

DiffRecord DiffRecord::dense(Frame frame) {
  DiffRecord out;
  out.kind_ = Kind::kDense;
  out.height_ = frame.height();
  out.width_ = frame.width();
  out.dense_.assign(frame.pixels().begin(), frame.pixels().end());
  return out;
}

DiffRecord encode_diff(const Frame& base, const Frame& target) {
  if (!base.same_shape(target)) {
    throw Error(ErrorCode::kDimensionMismatch, "encode_diff frame shapes differ");
  }
  const auto a = base.pixels();
  const auto b = target.pixels();
  const std::size_t total = a.size();

  std::size_t changed = 0;
  for (std::size_t p = 0; p < total; ++p) changed += a[p] != b[p];

  if (4 * changed > total) return DiffRecord::dense(target);

  DiffRecord out;
  out.kind_ = DiffRecord::Kind::kSparse;
  out.height_ = base.height();
  out.width_ = base.width();
  out.inds_.reserve(changed);
  out.vals_.reserve(changed);
  const std::size_t width = base.width();
  for (std::size_t p = 0; p < total && out.inds_.size() < changed; ++p) {
    if (a[p] == b[p]) continue;
    out.inds_.push_back({static_cast<std::uint8_t>(p / width),
                         static_cast<std::uint8_t>(p % width)});
    out.vals_.push_back(static_cast<std::int16_t>(int{b[p]} - int{a[p]}));
  }
  return out;
}

void decode_diff_into(const Frame& base, const DiffRecord& diff, Frame& out) {
  if (base.height() != diff.height() || base.width() != diff.width() ||
      !base.same_shape(out)) {
    throw Error(ErrorCode::kDimensionMismatch, "decode_diff frame shapes differ");
  }
  auto dst = out.pixels();
  if (!diff.is_sparse()) {
    const auto src = diff.dense_pixels();
    if (src.size() != dst.size()) {
      throw Error(ErrorCode::kCorruptDiff, "dense payload has wrong length");
    }
    std::copy(src.begin(), src.end(), dst.begin());
    return;
  }
  const auto src = base.pixels();
  if (&out != &base) std::copy(src.begin(), src.end(), dst.begin());
  const auto inds = diff.inds();
  const auto vals = diff.vals();
  const std::size_t width = base.width();
  for (std::size_t k = 0; k < inds.size(); ++k) {
    const auto [row, col] = inds[k];
    if (row >= base.height() || col >= width) {
      throw Error(ErrorCode::kCorruptDiff, "coordinate outside frame");
    }
    const std::size_t p = std::size_t{row} * width + col;
    const int value = int{src[p]} + vals[k];
    if (value < 0 || value > 255) {
      throw Error(ErrorCode::kCorruptDiff,
                  "reconstructed pixel " + std::to_string(value) +
                      " outside [0, 255]");
    }
    dst[p] = static_cast<std::uint8_t>(value);
  }
}

Frame decode_diff(const Frame& base, const DiffRecord& diff) {
  Frame out(base.height(), base.width());
  decode_diff_into(base, diff, out);
  return out;
}

std::size_t payload_bytes(const DiffRecord& diff) noexcept {
  return diff.is_sparse() ? 4 * diff.entry_count()
                          : diff.height() * diff.width();
}

}  // namespace deobs

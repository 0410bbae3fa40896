#include "deobs/analytics.hpp"

#include <string>

#include "deobs/error.hpp"

namespace deobs {

namespace {

void check_capacity(std::uint64_t capacity, std::uint64_t frame_stack) {
  if (frame_stack == 0 || capacity == 0 || capacity % frame_stack != 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "capacity " + std::to_string(capacity) +
                    " is not a positive multiple of f=" +
                    std::to_string(frame_stack));
  }
}

double model_bytes_real(std::uint64_t pixels_per_image, std::uint64_t capacity,
                        std::uint64_t frame_stack, double sparse_entries) {
  const std::uint64_t d = capacity / frame_stack;
  const std::uint64_t fixed = pixels_per_image * d + 8 * d * (frame_stack - 1) +
                              4 * capacity * frame_stack;
  return static_cast<double>(fixed) + 4.0 * sparse_entries;
}

}  // namespace

std::uint64_t model_bytes(std::uint64_t pixels_per_image, std::uint64_t blocks,
                          std::uint64_t frame_stack, std::uint64_t sparse_entries,
                          std::uint64_t capacity) {
  if (frame_stack == 0 || capacity != blocks * frame_stack) {
    throw Error(ErrorCode::kInvalidConfig,
                "capacity " + std::to_string(capacity) + " != d*f = " +
                    std::to_string(blocks) + "*" + std::to_string(frame_stack));
  }
  return pixels_per_image * blocks + 8 * blocks * (frame_stack - 1) +
         4 * sparse_entries + 4 * capacity * frame_stack;
}

double compression_factor(std::uint64_t pixels_per_image, std::uint64_t capacity,
                          std::uint64_t frame_stack, double sparse_entries) {
  check_capacity(capacity, frame_stack);
  if (sparse_entries < 0.0) {
    throw Error(ErrorCode::kInvalidConfig, "negative entry count");
  }
  const double uncompressed =
      static_cast<double>(pixels_per_image * capacity * frame_stack);
  return uncompressed /
         model_bytes_real(pixels_per_image, capacity, frame_stack, sparse_entries);
}

double simplified_factor(double frame_stack, double mean_entries) {
  return 1764.0 * frame_stack /
         ((1762.0 - mean_entries) / frame_stack + 2.0 + mean_entries);
}

AnalyticsReport theoretical_report(std::uint64_t pixels_per_image,
                                   std::uint64_t capacity,
                                   std::uint64_t frame_stack,
                                   double mean_entries) {
  check_capacity(capacity, frame_stack);
  AnalyticsReport r;
  r.mode = StorageMode::kFull;
  r.capacity = capacity;
  r.frame_stack = frame_stack;
  r.blocks = capacity / frame_stack;
  r.pixels_per_image = pixels_per_image;
  r.steps_resident = capacity;
  r.mean_entries = mean_entries;
  r.sparse_entries =
      static_cast<double>(r.blocks * (frame_stack - 1)) * mean_entries;
  r.phi = mean_entries / static_cast<double>(pixels_per_image);
  r.model_bytes = model_bytes_real(pixels_per_image, capacity, frame_stack,
                                   r.sparse_entries);
  r.uncompressed_bytes = pixels_per_image * capacity * frame_stack;
  r.factor = static_cast<double>(r.uncompressed_bytes) / r.model_bytes;
  return r;
}

AnalyticsReport measure(const ObsStore& store) {
  const auto& config = store.config();
  const auto memory = store.memory_bytes();
  AnalyticsReport r;
  r.mode = config.mode;
  r.capacity = config.capacity_steps;
  r.frame_stack = config.frame_stack;
  r.blocks = config.blocks();
  r.pixels_per_image = config.pixels_per_image();
  if (const auto range = store.valid_range()) r.steps_resident = range->size();
  r.sparse_entries = static_cast<double>(memory.sparse_payload_bytes) / 4.0;
  if (store.diff_records() > 0) {
    r.mean_entries =
        r.sparse_entries / static_cast<double>(store.diff_records());
  }
  r.phi = r.mean_entries / static_cast<double>(r.pixels_per_image);
  r.model_bytes = static_cast<double>(memory.total_bytes);
  r.uncompressed_bytes = r.pixels_per_image * r.capacity * r.frame_stack;
  r.factor = static_cast<double>(r.uncompressed_bytes) / r.model_bytes;
  return r;
}

SweepTable sweep(std::span<const std::uint64_t> frame_stacks,
                 std::span<const double> phis, std::uint64_t pixels_per_image) {
  if (frame_stacks.empty() || phis.empty() || pixels_per_image == 0) {
    throw Error(ErrorCode::kInvalidParams, "sweep needs non-empty grids");
  }
  SweepTable table;
  table.frame_stacks.assign(frame_stacks.begin(), frame_stacks.end());
  table.phis.assign(phis.begin(), phis.end());
  for (const auto f : frame_stacks) {
    if (f == 0) throw Error(ErrorCode::kInvalidParams, "f must be positive");
    auto& row = table.factors.emplace_back();
    for (const double phi : phis) {
      if (!(phi >= 0.0 && phi <= 1.0)) {
        throw Error(ErrorCode::kInvalidParams, "phi must lie in [0, 1]");
      }
      // The factor does not depend on |D|, so one block is enough.
      const double n = phi * static_cast<double>(pixels_per_image);
      row.push_back(theoretical_report(pixels_per_image, f, f, n).factor);
    }
  }
  return table;
}

}  // namespace deobs

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "deobs/obs_store.hpp"

namespace deobs {

/// Memory-model quantities for one store configuration.
///
/// `sparse_entries` is the effective N: sparse entries plus, for each dense
/// fallback record, pixels_per_image / 4, so that 4 * N is always the
/// payload term. `mean_entries` (n) averages over occupied diff slots.
struct AnalyticsReport {
  StorageMode mode = StorageMode::kFull;
  std::uint64_t capacity = 0;
  std::uint64_t blocks = 0;
  std::uint64_t frame_stack = 0;
  std::uint64_t pixels_per_image = 0;
  std::uint64_t steps_resident = 0;
  double sparse_entries = 0.0;
  double mean_entries = 0.0;
  double phi = 0.0;
  double model_bytes = 0.0;
  std::uint64_t uncompressed_bytes = 0;
  double factor = 0.0;
};

/// H*W*d + 8*d*(f-1) + 4*N + 4*|D|*f, exact. Throws InvalidConfig unless
/// capacity == d * f.
std::uint64_t model_bytes(std::uint64_t pixels_per_image, std::uint64_t blocks,
                          std::uint64_t frame_stack, std::uint64_t sparse_entries,
                          std::uint64_t capacity);

/// H*W*|D|*f divided by the model bytes; N may be fractional.
double compression_factor(std::uint64_t pixels_per_image, std::uint64_t capacity,
                          std::uint64_t frame_stack, double sparse_entries);

/// Closed form for 84x84 images, 1764f / ((1762 - n)/f + 2 + n).
///
/// Substituting d = |D|/f and N = d(f-1)n into compression_factor and
/// dividing through by 4|D| gives a denominator larger by exactly f, because
/// this form drops the index-table term. So
/// 1764f / compression_factor - 1764f / simplified_factor == f.
double simplified_factor(double frame_stack, double mean_entries);

/// Theoretical report for a store in which every diff slot holds n entries.
AnalyticsReport theoretical_report(std::uint64_t pixels_per_image,
                                   std::uint64_t capacity,
                                   std::uint64_t frame_stack,
                                   double mean_entries);

/// Report of a live store, using its resident N.
AnalyticsReport measure(const ObsStore& store);

struct SweepTable {
  std::vector<std::uint64_t> frame_stacks;
  std::vector<double> phis;
  /// factors[row][col] for frame_stacks[row], phis[col].
  std::vector<std::vector<double>> factors;
};

/// compression_factor over a grid with n = phi * pixels_per_image.
/// Throws InvalidParams on empty grids, f == 0 or phi outside [0, 1].
SweepTable sweep(std::span<const std::uint64_t> frame_stacks,
                 std::span<const double> phis, std::uint64_t pixels_per_image);

}  // namespace deobs

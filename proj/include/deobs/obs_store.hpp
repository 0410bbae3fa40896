#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "deobs/frame_codec.hpp"

namespace deobs {

using StepIndex = std::uint64_t;

/// Full stores one raw keyframe per block of f steps plus sparse diffs for the
/// rest; Half stores every frame raw and shares them through index rows; None
/// materializes every f-frame stack (the uncompressed baseline).
enum class StorageMode : std::uint8_t { kFull = 0, kHalf = 1, kNone = 2 };

std::string_view to_string(StorageMode mode);
std::optional<StorageMode> parse_storage_mode(std::string_view text);

struct StoreConfig {
  std::size_t capacity_steps = 0;
  std::size_t frame_stack = 1;
  std::size_t height = 84;
  std::size_t width = 84;
  StorageMode mode = StorageMode::kFull;

  std::size_t pixels_per_image() const noexcept { return height * width; }
  /// Number of keyframe blocks, capacity / f.
  std::size_t blocks() const noexcept { return capacity_steps / frame_stack; }
};

/// Throws InvalidConfig when capacity is zero or not a multiple of f, f is
/// zero, or a side is outside 1..256.
void validate(const StoreConfig& config);

/// Inclusive range of steps.
struct StepRange {
  StepIndex lo = 0;
  StepIndex hi = 0;

  std::uint64_t size() const noexcept { return hi - lo + 1; }
  bool contains(StepIndex i) const noexcept { return i >= lo && i <= hi; }
  friend bool operator==(const StepRange&, const StepRange&) = default;
};

/// f frames, oldest first.
struct State {
  std::vector<Frame> frames;

  friend bool operator==(const State&, const State&) = default;
};

/// Model byte counts. For Full mode these follow
/// H*W*d + 8*d*(f-1) + 4*N + 4*|D|*f, where a dense fallback record is
/// charged H*W bytes of payload instead of 4n.
struct MemoryBreakdown {
  std::uint64_t keyframe_bytes = 0;
  std::uint64_t sparse_overhead_bytes = 0;
  std::uint64_t sparse_payload_bytes = 0;
  std::uint64_t index_bytes = 0;
  std::uint64_t total_bytes = 0;

  friend bool operator==(const MemoryBreakdown&, const MemoryBreakdown&) = default;
};

/// Ring-buffered store of an append-only frame stream that serves f-frame
/// stacked states.
///
/// Each step i gets a row of f step pointers (the index table). Outside the
/// first f-1 steps of an episode the row is {i-f+1, ..., i}; inside them the
/// episode's first step is repeated to fill the front. In Full mode a step
/// with i % f == 0 is a keyframe; every other step is a DiffRecord against
/// the keyframe of its block, regardless of episode boundaries.
///
/// Eviction is by keyframe block in Full mode and by step otherwise. A step
/// is readable only while every frame its row points at is still resident.
///
/// Single writer. Const members may run concurrently with each other.
class ObsStore {
 public:
  /// Step pointers are 32-bit, so the stream ends at this many steps.
  static constexpr StepIndex kMaxSteps = StepIndex{1} << 32;

  explicit ObsStore(const StoreConfig& config);

  const StoreConfig& config() const noexcept { return config_; }
  StepIndex head() const noexcept { return head_; }
  bool empty() const noexcept { return head_ == 0; }

  /// Stores the newest frame and returns its step index. The very first
  /// append always starts an episode.
  StepIndex append(const Frame& frame, bool episode_start);

  /// Append expressed as "set the state at step i". Only i == head() is
  /// accepted. The step starts an episode when the stack's leading frames do
  /// not continue the current episode and are all copies of its last frame.
  void set(StepIndex i, const State& state);

  /// Throws NotYetWritten for i >= head(), Evicted below valid_range().
  State get(StepIndex i) const;

  /// Readable steps, or nullopt when none are.
  std::optional<StepRange> valid_range() const;

  MemoryBreakdown memory_bytes() const;

  /// Pointer row of a readable step (empty in None mode).
  std::span<const std::uint32_t> index_row(StepIndex i) const;

  /// Start of the episode the next append continues.
  StepIndex current_episode_start() const noexcept { return episode_start_; }

  std::uint64_t sparse_entries() const noexcept { return sparse_entries_; }
  std::uint64_t dense_records() const noexcept { return dense_records_; }
  std::uint64_t diff_records() const noexcept { return diff_records_; }

  /// Raw slot tables, exposed for serialization.
  std::span<const Frame> frame_slots() const noexcept { return frames_; }
  std::span<const std::optional<DiffRecord>> diff_slots() const noexcept {
    return diffs_;
  }
  std::span<const std::uint32_t> index_table() const noexcept { return index_; }

  /// Rebuilds a store from its slot tables. Throws MalformedFile when the
  /// tables are inconsistent with the config or with each other.
  static ObsStore restore(const StoreConfig& config, StepIndex head,
                          StepIndex episode_start, std::vector<Frame> frames,
                          std::vector<std::optional<DiffRecord>> diffs,
                          std::vector<std::uint32_t> index);

 private:
  std::size_t frame_slot_count() const noexcept;
  StepIndex resident_floor() const noexcept;
  Frame frame_at(StepIndex step) const;
  void fill_index_row(StepIndex i);
  void put_diff(std::size_t slot, std::optional<DiffRecord> record);
  void check_readable(StepIndex i) const;

  StoreConfig config_;
  std::vector<Frame> frames_;
  std::vector<std::optional<DiffRecord>> diffs_;
  std::vector<std::uint32_t> index_;
  StepIndex head_ = 0;
  StepIndex episode_start_ = 0;
  std::uint64_t sparse_entries_ = 0;
  std::uint64_t dense_records_ = 0;
  std::uint64_t diff_records_ = 0;
};

}  // namespace deobs

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "deobs/obs_store.hpp"

namespace deobs {

/// Uncompressed stand-in for ObsStore used to check it: keeps every frame raw
/// in a per-step ring and rebuilds stacks by walking back through the episode,
/// without index rows or diffs. The ring holds capacity + f frames so a
/// self-contained stack at the resident floor can still be rebuilt.
class ReferenceStore {
 public:
  /// `eviction_block` rounds the resident floor up to a multiple of itself;
  /// `self_contained` marks stacks that stay readable while their own step is
  /// resident (None mode) instead of requiring every stacked frame.
  ReferenceStore(std::size_t capacity, std::size_t frame_stack,
                 std::size_t eviction_block = 1, bool self_contained = false);

  /// Reference with the same readable window as an ObsStore built from config.
  static ReferenceStore matching(const StoreConfig& config);

  StepIndex append(const Frame& frame, bool episode_start);
  StepIndex head() const noexcept { return head_; }
  std::optional<StepRange> valid_range() const;
  State get(StepIndex i) const;

 private:
  struct Slot {
    Frame frame;
    StepIndex episode_start = 0;
  };

  std::size_t capacity_;
  std::size_t frame_stack_;
  std::size_t eviction_block_;
  bool self_contained_;
  std::vector<Slot> ring_;
  StepIndex head_ = 0;
  StepIndex episode_start_ = 0;
};

}  // namespace deobs

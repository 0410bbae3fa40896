#include "deobs/reference_store.hpp"

#include <string>

#include "deobs/error.hpp"

namespace deobs {

ReferenceStore::ReferenceStore(std::size_t capacity, std::size_t frame_stack,
                               std::size_t eviction_block, bool self_contained)
    : capacity_(capacity),
      frame_stack_(frame_stack),
      eviction_block_(eviction_block),
      self_contained_(self_contained),
      ring_(capacity + frame_stack) {
  if (capacity == 0 || frame_stack == 0 || eviction_block == 0) {
    throw Error(ErrorCode::kInvalidConfig, "reference store sizes must be positive");
  }
}

ReferenceStore ReferenceStore::matching(const StoreConfig& config) {
  validate(config);
  const bool full = config.mode == StorageMode::kFull;
  return ReferenceStore(config.capacity_steps, config.frame_stack,
                        full ? config.frame_stack : 1,
                        config.mode == StorageMode::kNone);
}

StepIndex ReferenceStore::append(const Frame& frame, bool episode_start) {
  if (episode_start || head_ == 0) episode_start_ = head_;
  ring_[head_ % ring_.size()] = Slot{frame, episode_start_};
  return head_++;
}

std::optional<StepRange> ReferenceStore::valid_range() const {
  if (head_ == 0) return std::nullopt;
  StepIndex floor = 0;
  if (head_ > capacity_) {
    const StepIndex oldest = head_ - capacity_;
    floor = (oldest + eviction_block_ - 1) / eviction_block_ * eviction_block_;
  }
  for (StepIndex i = floor; i < head_; ++i) {
    if (self_contained_) return StepRange{i, head_ - 1};
    const StepIndex episode = ring_[i % ring_.size()].episode_start;
    const StepIndex reach = i + 1 >= frame_stack_ ? i + 1 - frame_stack_ : 0;
    if ((episode > reach ? episode : reach) >= floor) {
      return StepRange{i, head_ - 1};
    }
  }
  return std::nullopt;
}

State ReferenceStore::get(StepIndex i) const {
  const auto range = valid_range();
  if (i >= head_) {
    throw Error(ErrorCode::kNotYetWritten, "step " + std::to_string(i));
  }
  if (!range || i < range->lo) {
    throw Error(ErrorCode::kEvicted, "step " + std::to_string(i));
  }
  // Walk back from i, repeating the episode's first frame once we run out.
  const StepIndex episode = ring_[i % ring_.size()].episode_start;
  State state;
  state.frames.resize(frame_stack_);
  StepIndex step = i;
  for (std::size_t k = frame_stack_; k-- > 0;) {
    state.frames[k] = ring_[step % ring_.size()].frame;
    if (step > episode) --step;
  }
  return state;
}

}  // namespace deobs

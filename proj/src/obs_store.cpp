#include "deobs/obs_store.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "deobs/error.hpp"

namespace deobs {

std::string_view to_string(StorageMode mode) {
  switch (mode) {
    case StorageMode::kFull: return "full";
    case StorageMode::kHalf: return "half";
    case StorageMode::kNone: return "none";
  }
  return "unknown";
}

std::optional<StorageMode> parse_storage_mode(std::string_view text) {
  if (text == "full") return StorageMode::kFull;
  if (text == "half") return StorageMode::kHalf;
  if (text == "none") return StorageMode::kNone;
  return std::nullopt;
}

void validate(const StoreConfig& config) {
  if (config.frame_stack == 0) {
    throw Error(ErrorCode::kInvalidConfig, "frame stack must be at least 1");
  }
  if (config.capacity_steps == 0 ||
      config.capacity_steps % config.frame_stack != 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "capacity " + std::to_string(config.capacity_steps) +
                    " is not a positive multiple of frame stack " +
                    std::to_string(config.frame_stack));
  }
  check_dimensions(config.height, config.width);
}

ObsStore::ObsStore(const StoreConfig& config) : config_(config) {
  validate(config_);
  frames_.assign(frame_slot_count(), Frame(config_.height, config_.width));
  if (config_.mode == StorageMode::kFull) {
    diffs_.resize(config_.blocks() * (config_.frame_stack - 1));
  }
  if (config_.mode != StorageMode::kNone) {
    index_.assign(config_.capacity_steps * config_.frame_stack, 0);
  }
}

std::size_t ObsStore::frame_slot_count() const noexcept {
  switch (config_.mode) {
    case StorageMode::kFull: return config_.blocks();
    case StorageMode::kHalf: return config_.capacity_steps;
    case StorageMode::kNone:
      return config_.capacity_steps * config_.frame_stack;
  }
  return 0;
}

StepIndex ObsStore::resident_floor() const noexcept {
  if (head_ == 0) return 0;
  if (config_.mode == StorageMode::kFull) {
    const StepIndex f = config_.frame_stack;
    const StepIndex live_blocks = (head_ - 1) / f + 1;
    const StepIndex d = config_.blocks();
    return live_blocks > d ? (live_blocks - d) * f : 0;
  }
  const StepIndex cap = config_.capacity_steps;
  return head_ > cap ? head_ - cap : 0;
}

std::optional<StepRange> ObsStore::valid_range() const {
  if (head_ == 0) return std::nullopt;
  const StepIndex floor = resident_floor();
  if (config_.mode == StorageMode::kNone) return StepRange{floor, head_ - 1};
  // The oldest pointer of a row is nondecreasing in the step, and the row of
  // floor + f - 1 never reaches below floor, so this scans at most f steps.
  const std::size_t f = config_.frame_stack;
  for (StepIndex i = floor; i < head_; ++i) {
    const std::size_t row = (i % config_.capacity_steps) * f;
    if (index_[row] >= floor) return StepRange{i, head_ - 1};
  }
  return std::nullopt;
}

void ObsStore::check_readable(StepIndex i) const {
  if (i >= head_) {
    throw Error(ErrorCode::kNotYetWritten,
                "step " + std::to_string(i) + " >= head " +
                    std::to_string(head_));
  }
  const auto range = valid_range();
  if (!range || i < range->lo) {
    throw Error(ErrorCode::kEvicted, "step " + std::to_string(i) +
                                         " is no longer resident");
  }
}

Frame ObsStore::frame_at(StepIndex step) const {
  const std::size_t f = config_.frame_stack;
  switch (config_.mode) {
    case StorageMode::kFull: {
      const std::size_t slot = (step / f) % config_.blocks();
      const std::size_t pos = step % f;
      if (pos == 0) return frames_[slot];
      const auto& diff = diffs_[slot * (f - 1) + pos - 1];
      if (!diff) {
        throw Error(ErrorCode::kCorruptDiff,
                    "missing diff for step " + std::to_string(step));
      }
      return decode_diff(frames_[slot], *diff);
    }
    case StorageMode::kHalf:
      return frames_[step % config_.capacity_steps];
    case StorageMode::kNone:
      return frames_[(step % config_.capacity_steps) * f + f - 1];
  }
  return {};
}

void ObsStore::put_diff(std::size_t slot, std::optional<DiffRecord> record) {
  if (const auto& old = diffs_[slot]) {
    --diff_records_;
    if (old->is_sparse()) {
      sparse_entries_ -= old->entry_count();
    } else {
      --dense_records_;
    }
  }
  if (record) {
    ++diff_records_;
    if (record->is_sparse()) {
      sparse_entries_ += record->entry_count();
    } else {
      ++dense_records_;
    }
  }
  diffs_[slot] = std::move(record);
}

void ObsStore::fill_index_row(StepIndex i) {
  const std::size_t f = config_.frame_stack;
  auto* row = index_.data() + (i % config_.capacity_steps) * f;
  for (std::size_t k = 0; k < f; ++k) {
    const StepIndex wanted = i + 1 + k >= f ? i + 1 + k - f : 0;
    row[k] = static_cast<std::uint32_t>(std::max(wanted, episode_start_));
  }
}

StepIndex ObsStore::append(const Frame& frame, bool episode_start) {
  if (frame.height() != config_.height || frame.width() != config_.width) {
    throw Error(ErrorCode::kDimensionMismatch,
                "frame is " + std::to_string(frame.height()) + "x" +
                    std::to_string(frame.width()) + ", store expects " +
                    std::to_string(config_.height) + "x" +
                    std::to_string(config_.width));
  }
  if (head_ >= kMaxSteps) {
    throw Error(ErrorCode::kCapacityExhausted, "32-bit step pointers exhausted");
  }
  const StepIndex i = head_;
  if (episode_start || i == 0) episode_start_ = i;

  const std::size_t f = config_.frame_stack;
  const std::size_t cap = config_.capacity_steps;
  switch (config_.mode) {
    case StorageMode::kFull: {
      const std::size_t slot = (i / f) % config_.blocks();
      const std::size_t pos = i % f;
      if (pos == 0) {
        for (std::size_t k = 0; k + 1 < f; ++k) {
          put_diff(slot * (f - 1) + k, std::nullopt);
        }
        frames_[slot] = frame;
      } else {
        put_diff(slot * (f - 1) + pos - 1, encode_diff(frames_[slot], frame));
      }
      break;
    }
    case StorageMode::kHalf:
      frames_[i % cap] = frame;
      break;
    case StorageMode::kNone: {
      std::vector<Frame> stack(f, frame);
      if (i != episode_start_) {
        const std::size_t prev = ((i - 1) % cap) * f;
        for (std::size_t k = 0; k + 1 < f; ++k) stack[k] = frames_[prev + k + 1];
      }
      std::move(stack.begin(), stack.end(), frames_.begin() + (i % cap) * f);
      break;
    }
  }
  if (config_.mode != StorageMode::kNone) fill_index_row(i);
  ++head_;
  return i;
}

void ObsStore::set(StepIndex i, const State& state) {
  if (i != head_) {
    throw Error(ErrorCode::kOutOfOrderSet, "set(" + std::to_string(i) +
                                               ") with head " +
                                               std::to_string(head_));
  }
  const std::size_t f = config_.frame_stack;
  if (state.frames.size() != f) {
    throw Error(ErrorCode::kInconsistentState,
                "state has " + std::to_string(state.frames.size()) +
                    " frames, expected " + std::to_string(f));
  }
  for (const auto& frame : state.frames) {
    if (frame.height() != config_.height || frame.width() != config_.width) {
      throw Error(ErrorCode::kDimensionMismatch, "state frame shape differs");
    }
  }
  const Frame& newest = state.frames.back();
  if (head_ == 0) {
    append(newest, true);
    return;
  }

  const bool repeated =
      std::all_of(state.frames.begin(), state.frames.end(),
                  [&](const Frame& frame) { return frame == newest; });

  // Frames the next row would point at if the episode continues.
  const StepIndex floor = resident_floor();
  bool checkable = true;
  bool continues = true;
  for (std::size_t k = 0; k + 1 < f && continues; ++k) {
    const StepIndex wanted = i + 1 + k >= f ? i + 1 + k - f : 0;
    const StepIndex step = std::max(wanted, episode_start_);
    if (step < floor) {
      checkable = false;
      break;
    }
    continues = frame_at(step) == state.frames[k];
  }

  if (checkable && continues) {
    append(newest, false);
  } else if (repeated) {
    append(newest, true);
  } else if (!checkable) {
    append(newest, false);
  } else {
    throw Error(ErrorCode::kInconsistentState,
                "state neither continues the episode nor starts a new one");
  }
}

State ObsStore::get(StepIndex i) const {
  check_readable(i);
  const std::size_t f = config_.frame_stack;
  State state;
  state.frames.reserve(f);
  if (config_.mode == StorageMode::kNone) {
    const auto first = frames_.begin() + (i % config_.capacity_steps) * f;
    state.frames.assign(first, first + f);
    return state;
  }
  const auto row = index_row(i);
  for (std::size_t k = 0; k < f; ++k) {
    if (k > 0 && row[k] == row[k - 1]) {
      state.frames.push_back(state.frames.back());
    } else {
      state.frames.push_back(frame_at(row[k]));
    }
  }
  return state;
}

std::span<const std::uint32_t> ObsStore::index_row(StepIndex i) const {
  check_readable(i);
  if (config_.mode == StorageMode::kNone) return {};
  const std::size_t f = config_.frame_stack;
  return std::span(index_).subspan((i % config_.capacity_steps) * f, f);
}

MemoryBreakdown ObsStore::memory_bytes() const {
  const std::uint64_t image = config_.pixels_per_image();
  const std::uint64_t cap = config_.capacity_steps;
  const std::uint64_t f = config_.frame_stack;
  const std::uint64_t d = config_.blocks();
  MemoryBreakdown out;
  switch (config_.mode) {
    case StorageMode::kFull:
      out.keyframe_bytes = image * d;
      out.sparse_overhead_bytes = 8 * d * (f - 1);
      out.sparse_payload_bytes = 4 * sparse_entries_ + image * dense_records_;
      out.index_bytes = 4 * cap * f;
      break;
    case StorageMode::kHalf:
      out.keyframe_bytes = image * cap;
      out.index_bytes = 4 * cap * f;
      break;
    case StorageMode::kNone:
      out.keyframe_bytes = image * cap * f;
      break;
  }
  out.total_bytes = out.keyframe_bytes + out.sparse_overhead_bytes +
                    out.sparse_payload_bytes + out.index_bytes;
  return out;
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedFile, what);
}

}  // namespace

ObsStore ObsStore::restore(const StoreConfig& config, StepIndex head,
                           StepIndex episode_start, std::vector<Frame> frames,
                           std::vector<std::optional<DiffRecord>> diffs,
                           std::vector<std::uint32_t> index) {
  ObsStore store(config);
  if (frames.size() != store.frames_.size() ||
      diffs.size() != store.diffs_.size() ||
      index.size() != store.index_.size()) {
    malformed("slot table sizes do not match the configuration");
  }
  if (head > kMaxSteps) malformed("head beyond 32-bit pointer range");
  if (head == 0 ? episode_start != 0 : episode_start >= head) {
    malformed("episode start outside written steps");
  }
  for (const auto& frame : frames) {
    if (frame.height() != config.height || frame.width() != config.width) {
      malformed("keyframe shape mismatch");
    }
  }
  for (const auto& diff : diffs) {
    if (diff && (diff->height() != config.height || diff->width() != config.width)) {
      malformed("diff record shape mismatch");
    }
  }

  store.frames_ = std::move(frames);
  store.index_ = std::move(index);
  store.head_ = head;
  store.episode_start_ = episode_start;
  for (std::size_t slot = 0; slot < diffs.size(); ++slot) {
    store.put_diff(slot, std::move(diffs[slot]));
  }

  const std::size_t f = config.frame_stack;
  const StepIndex floor = store.resident_floor();
  if (config.mode == StorageMode::kFull && f > 1) {
    std::vector<bool> expected(store.diffs_.size(), false);
    for (StepIndex j = floor; j < head; ++j) {
      if (j % f == 0) continue;
      expected[((j / f) % config.blocks()) * (f - 1) + j % f - 1] = true;
    }
    for (std::size_t slot = 0; slot < expected.size(); ++slot) {
      if (expected[slot] != store.diffs_[slot].has_value()) {
        malformed("diff slot " + std::to_string(slot) +
                  " occupancy disagrees with head");
      }
    }
  }
  if (config.mode != StorageMode::kNone) {
    for (StepIndex j = floor; j < head; ++j) {
      const auto* row = store.index_.data() + (j % config.capacity_steps) * f;
      if (row[f - 1] != j || row[0] > j) {
        malformed("index row of step " + std::to_string(j) + " is invalid");
      }
      for (std::size_t k = 0; k < f; ++k) {
        const StepIndex wanted = j + 1 + k >= f ? j + 1 + k - f : 0;
        if (row[k] != std::max<StepIndex>(row[0], wanted)) {
          malformed("index row of step " + std::to_string(j) + " is invalid");
        }
      }
    }
  }
  return store;
}

}  // namespace deobs

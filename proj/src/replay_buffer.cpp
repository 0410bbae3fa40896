#include "deobs/replay_buffer.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "deobs/error.hpp"

namespace deobs {

namespace {

std::vector<std::uint8_t> pack(const std::vector<State>& states) {
  std::vector<std::uint8_t> out;
  for (const auto& state : states) {
    for (const auto& frame : state.frames) {
      out.insert(out.end(), frame.pixels().begin(), frame.pixels().end());
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> Batch::packed_states() const { return pack(states); }

std::vector<std::uint8_t> Batch::packed_next_states() const {
  return next_states ? pack(*next_states) : std::vector<std::uint8_t>{};
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  // 2^64 mod bound; raw draws below it would bias the low residues.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

ReplayBuffer::ReplayBuffer(const StoreConfig& config, std::size_t action_width)
    : ReplayBuffer(ObsStore(config), action_width) {}

ReplayBuffer::ReplayBuffer(ObsStore store, std::size_t action_width)
    : store_(std::move(store)), action_width_(action_width) {
  const std::size_t cap = store_.config().capacity_steps;
  actions_.assign(cap * action_width_, 0);
  rewards_.assign(cap, 0.0);
  dones_.assign(cap, 0);
  starts_.assign(cap, 0);
}

std::uint64_t ReplayBuffer::size() const {
  const auto range = store_.valid_range();
  return range ? range->size() : 0;
}

StepIndex ReplayBuffer::add(const Frame& frame, const TransitionMeta& meta,
                            bool episode_start) {
  if (meta.action.size() != action_width_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "action has " + std::to_string(meta.action.size()) +
                    " bytes, buffer expects " + std::to_string(action_width_));
  }
  const StepIndex head = store_.head();
  if (head > 0 && dones_[slot(head - 1)] && !episode_start) {
    throw Error(ErrorCode::kEpisodeDiscipline,
                "step " + std::to_string(head) +
                    " follows a terminal step but does not start an episode");
  }
  const StepIndex i = store_.append(frame, episode_start);
  const std::size_t s = slot(i);
  std::copy(meta.action.begin(), meta.action.end(),
            actions_.begin() + s * action_width_);
  rewards_[s] = meta.reward;
  dones_[s] = meta.done ? 1 : 0;
  starts_[s] = (episode_start || i == 0) ? 1 : 0;
  return i;
}

TransitionMeta ReplayBuffer::meta(StepIndex i) const {
  const auto range = store_.valid_range();
  if (!range || !range->contains(i)) {
    throw Error(i >= store_.head() ? ErrorCode::kNotYetWritten
                                   : ErrorCode::kEvicted,
                "step " + std::to_string(i));
  }
  const std::size_t s = slot(i);
  TransitionMeta out;
  out.action.assign(actions_.begin() + s * action_width_,
                    actions_.begin() + (s + 1) * action_width_);
  out.reward = rewards_[s];
  out.done = dones_[s] != 0;
  return out;
}

bool ReplayBuffer::is_episode_start(StepIndex i) const {
  return starts_[slot(i)] != 0;
}

void ReplayBuffer::fill_meta(Batch& batch) const {
  batch.states.reserve(batch.indices.size());
  batch.actions.reserve(batch.indices.size() * action_width_);
  for (const StepIndex i : batch.indices) {
    const std::size_t s = slot(i);
    batch.states.push_back(store_.get(i));
    batch.actions.insert(batch.actions.end(),
                         actions_.begin() + s * action_width_,
                         actions_.begin() + (s + 1) * action_width_);
    batch.rewards.push_back(rewards_[s]);
    batch.dones.push_back(dones_[s]);
  }
}

Batch ReplayBuffer::sample_states(std::size_t batch_size,
                                  std::uint64_t seed) const {
  if (batch_size == 0) {
    throw Error(ErrorCode::kInvalidParams, "batch size must be positive");
  }
  const auto range = store_.valid_range();
  if (!range) throw Error(ErrorCode::kEmptyBuffer, "nothing to sample");
  std::mt19937_64 rng(seed);
  Batch batch;
  batch.indices.reserve(batch_size);
  for (std::size_t k = 0; k < batch_size; ++k) {
    batch.indices.push_back(range->lo + uniform_below(rng, range->size()));
  }
  fill_meta(batch);
  return batch;
}

std::vector<StepIndex> ReplayBuffer::transition_candidates(
    const StepRange& range) const {
  std::vector<StepIndex> out;
  for (StepIndex i = range.lo; i < range.hi; ++i) {
    if (!starts_[slot(i + 1)] || dones_[slot(i)]) out.push_back(i);
  }
  return out;
}

Batch ReplayBuffer::sample_transitions(std::size_t batch_size,
                                       std::uint64_t seed) const {
  if (batch_size == 0) {
    throw Error(ErrorCode::kInvalidParams, "batch size must be positive");
  }
  const auto range = store_.valid_range();
  if (!range) throw Error(ErrorCode::kEmptyBuffer, "nothing to sample");
  const auto candidates = transition_candidates(*range);
  if (candidates.empty()) {
    throw Error(ErrorCode::kNoValidTransitions,
                "no readable step has a usable successor");
  }
  std::mt19937_64 rng(seed);
  Batch batch;
  batch.indices.reserve(batch_size);
  for (std::size_t k = 0; k < batch_size; ++k) {
    batch.indices.push_back(candidates[uniform_below(rng, candidates.size())]);
  }
  fill_meta(batch);
  auto& next = batch.next_states.emplace();
  next.reserve(batch_size);
  for (const StepIndex i : batch.indices) next.push_back(store_.get(i + 1));
  return batch;
}

ReplayBuffer ReplayBuffer::restore(ObsStore store, std::size_t action_width,
                                   std::vector<std::uint8_t> actions,
                                   std::vector<double> rewards,
                                   std::vector<std::uint8_t> dones,
                                   std::vector<std::uint8_t> starts) {
  ReplayBuffer buffer(std::move(store), action_width);
  if (actions.size() != buffer.actions_.size() ||
      rewards.size() != buffer.rewards_.size() ||
      dones.size() != buffer.dones_.size() ||
      starts.size() != buffer.starts_.size()) {
    throw Error(ErrorCode::kMalformedFile, "metadata arrays have wrong length");
  }
  const auto flag = [](std::uint8_t v) { return v > 1; };
  if (std::any_of(dones.begin(), dones.end(), flag) ||
      std::any_of(starts.begin(), starts.end(), flag)) {
    throw Error(ErrorCode::kMalformedFile, "flag byte other than 0 or 1");
  }
  buffer.actions_ = std::move(actions);
  buffer.rewards_ = std::move(rewards);
  buffer.dones_ = std::move(dones);
  buffer.starts_ = std::move(starts);
  return buffer;
}

}  // namespace deobs

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "deobs/analytics.hpp"
#include "deobs/obs_store.hpp"

namespace deobs {

struct TransitionMeta {
  std::vector<std::uint8_t> action;
  double reward = 0.0;
  bool done = false;
};

struct Batch {
  std::vector<StepIndex> indices;
  std::vector<State> states;
  /// indices.size() * action_width bytes, row per sample.
  std::vector<std::uint8_t> actions;
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;
  std::optional<std::vector<State>> next_states;

  std::size_t size() const noexcept { return indices.size(); }

  /// States as one contiguous [batch, f, H, W] byte array.
  std::vector<std::uint8_t> packed_states() const;
  /// Same layout for next_states; empty when the batch has none.
  std::vector<std::uint8_t> packed_next_states() const;

  friend bool operator==(const Batch&, const Batch&) = default;
};

/// Uniform integer in [0, bound) by rejection on the raw 64-bit output, so
/// draws are identical on every standard library.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Experience replay over an ObsStore. Per-step metadata lives uncompressed
/// in flat arrays indexed by step % capacity.
///
/// Sampling draws with replacement from std::mt19937_64 seeded with the given
/// seed. sample_states picks lo + uniform_below(size) of valid_range();
/// sample_transitions picks uniformly among the ascending list of steps i
/// whose successor is readable and either continues i's episode or follows a
/// terminal step. Terminal transitions are returned with done set.
class ReplayBuffer {
 public:
  ReplayBuffer(const StoreConfig& config, std::size_t action_width);

  const StoreConfig& config() const noexcept { return store_.config(); }
  std::size_t action_width() const noexcept { return action_width_; }
  const ObsStore& store() const noexcept { return store_; }

  /// Steps currently readable.
  std::uint64_t size() const;

  /// Throws EpisodeDiscipline when the previous step was terminal and this
  /// one does not start an episode, DimensionMismatch on a wrong action width.
  StepIndex add(const Frame& frame, const TransitionMeta& meta,
                bool episode_start);

  State get(StepIndex i) const { return store_.get(i); }
  std::optional<StepRange> valid_range() const { return store_.valid_range(); }
  TransitionMeta meta(StepIndex i) const;
  bool is_episode_start(StepIndex i) const;

  /// Throws InvalidParams for batch_size 0, EmptyBuffer with nothing readable.
  Batch sample_states(std::size_t batch_size, std::uint64_t seed) const;

  /// Also throws NoValidTransitions when no step has a usable successor.
  Batch sample_transitions(std::size_t batch_size, std::uint64_t seed) const;

  AnalyticsReport stats() const { return measure(store_); }

  /// Flat metadata arrays, one entry per slot, exposed for serialization.
  const std::vector<std::uint8_t>& action_slots() const noexcept { return actions_; }
  const std::vector<double>& reward_slots() const noexcept { return rewards_; }
  const std::vector<std::uint8_t>& done_slots() const noexcept { return dones_; }
  const std::vector<std::uint8_t>& start_slots() const noexcept { return starts_; }

  static ReplayBuffer restore(ObsStore store, std::size_t action_width,
                              std::vector<std::uint8_t> actions,
                              std::vector<double> rewards,
                              std::vector<std::uint8_t> dones,
                              std::vector<std::uint8_t> starts);

 private:
  explicit ReplayBuffer(ObsStore store, std::size_t action_width);

  std::size_t slot(StepIndex i) const noexcept {
    return static_cast<std::size_t>(i % store_.config().capacity_steps);
  }
  std::vector<StepIndex> transition_candidates(const StepRange& range) const;
  void fill_meta(Batch& batch) const;

  ObsStore store_;
  std::size_t action_width_;
  std::vector<std::uint8_t> actions_;
  std::vector<double> rewards_;
  std::vector<std::uint8_t> dones_;
  std::vector<std::uint8_t> starts_;
};

}  // namespace deobs

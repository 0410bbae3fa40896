#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "deobs/trace_io.hpp"

namespace deobs {

/// Static: one fixed textured frame repeated.
/// Drift: a solid blob x blob square sliding over a fixed texture by
///   (velocity_x, velocity_y) pixels per step, wrapping at the edges.
/// Noise: each pixel changes to a different value with probability rho per step.
/// Episodic: episodes of uniform length in [min_episode, max_episode], each a
///   fresh Static, Drift or Noise segment.
enum class GenMode { kStatic, kDrift, kNoise, kEpisodic };

std::optional<GenMode> parse_gen_mode(std::string_view text);
std::string_view to_string(GenMode mode);

struct GenParams {
  std::size_t frames = 100;
  std::size_t height = 84;
  std::size_t width = 84;
  std::size_t blob = 5;
  int velocity_x = 1;
  int velocity_y = 0;
  double rho = 0.05;
  std::size_t min_episode = 20;
  std::size_t max_episode = 200;
};

/// Deterministic in (mode, params, seed). Throws InvalidParams on zero
/// frames, a blob larger than the frame, rho outside [0, 1] or an empty
/// episode-length range.
Trace generate(GenMode mode, const GenParams& params, std::uint64_t seed);

/// Expected fraction of pixels changing between consecutive frames of one
/// episode (an upper bound for Drift).
double expected_change_density(GenMode mode, const GenParams& params);

/// Mean fraction of pixels that differ between consecutive frames of the
/// same episode.
double measured_change_density(const Trace& trace);

}  // namespace deobs

#include "deobs/synthetic.hpp"

#include <algorithm>
#include <random>

#include "deobs/error.hpp"

namespace deobs {

std::optional<GenMode> parse_gen_mode(std::string_view text) {
  if (text == "static") return GenMode::kStatic;
  if (text == "drift") return GenMode::kDrift;
  if (text == "noise") return GenMode::kNoise;
  if (text == "episodic") return GenMode::kEpisodic;
  return std::nullopt;
}

std::string_view to_string(GenMode mode) {
  switch (mode) {
    case GenMode::kStatic: return "static";
    case GenMode::kDrift: return "drift";
    case GenMode::kNoise: return "noise";
    case GenMode::kEpisodic: return "episodic";
  }
  return "unknown";
}

namespace {

// Standard distributions are implementation-defined; these are not.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

// Texture values stay below the blob intensity so every blob pixel differs.
constexpr std::uint8_t kBlobValue = 255;
constexpr std::uint64_t kTextureLevels = 200;

Frame texture(const GenParams& p, std::mt19937_64& rng) {
  Frame frame(p.height, p.width);
  for (auto& px : frame.pixels()) px = static_cast<std::uint8_t>(below(rng, kTextureLevels));
  return frame;
}

long wrap(long v, long m) { return ((v % m) + m) % m; }

void static_segment(const GenParams& p, std::size_t count, std::mt19937_64& rng,
                    std::vector<Frame>& out) {
  const Frame base = texture(p, rng);
  for (std::size_t k = 0; k < count; ++k) out.push_back(base);
}

void drift_segment(const GenParams& p, std::size_t count, int vx, int vy,
                   std::mt19937_64& rng, std::vector<Frame>& out) {
  const Frame base = texture(p, rng);
  const long h = static_cast<long>(p.height);
  const long w = static_cast<long>(p.width);
  long row = static_cast<long>(below(rng, p.height));
  long col = static_cast<long>(below(rng, p.width));
  for (std::size_t k = 0; k < count; ++k) {
    Frame frame = base;
    for (std::size_t dr = 0; dr < p.blob; ++dr) {
      for (std::size_t dc = 0; dc < p.blob; ++dc) {
        frame.at(wrap(row + static_cast<long>(dr), h),
                 wrap(col + static_cast<long>(dc), w)) = kBlobValue;
      }
    }
    out.push_back(std::move(frame));
    row = wrap(row + vy, h);
    col = wrap(col + vx, w);
  }
}

void noise_segment(const GenParams& p, std::size_t count, std::mt19937_64& rng,
                   std::vector<Frame>& out) {
  Frame frame(p.height, p.width);
  for (auto& px : frame.pixels()) px = static_cast<std::uint8_t>(below(rng, 256));
  for (std::size_t k = 0; k < count; ++k) {
    if (k > 0) {
      for (auto& px : frame.pixels()) {
        if (unit(rng) < p.rho) {
          px = static_cast<std::uint8_t>((px + 1 + below(rng, 255)) % 256);
        }
      }
    }
    out.push_back(frame);
  }
}

void check(const GenParams& p) {
  try {
    check_dimensions(p.height, p.width);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidParams, e.what());
  }
  if (p.frames == 0) throw Error(ErrorCode::kInvalidParams, "frames must be positive");
  if (p.frames > 0xFFFFFFFFull) {
    throw Error(ErrorCode::kInvalidParams, "too many frames");
  }
  if (p.blob == 0 || p.blob > p.height || p.blob > p.width) {
    throw Error(ErrorCode::kInvalidParams, "blob must fit inside the frame");
  }
  if (!(p.rho >= 0.0 && p.rho <= 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "rho must lie in [0, 1]");
  }
  if (p.min_episode == 0 || p.min_episode > p.max_episode) {
    throw Error(ErrorCode::kInvalidParams, "need 1 <= min_episode <= max_episode");
  }
}

}  // namespace

Trace generate(GenMode mode, const GenParams& params, std::uint64_t seed) {
  check(params);
  std::mt19937_64 rng(seed);
  Trace trace;
  trace.height = params.height;
  trace.width = params.width;
  trace.frames.reserve(params.frames);
  trace.episode_starts = {0};

  switch (mode) {
    case GenMode::kStatic:
      static_segment(params, params.frames, rng, trace.frames);
      break;
    case GenMode::kDrift:
      drift_segment(params, params.frames, params.velocity_x, params.velocity_y,
                    rng, trace.frames);
      break;
    case GenMode::kNoise:
      noise_segment(params, params.frames, rng, trace.frames);
      break;
    case GenMode::kEpisodic: {
      trace.episode_starts.clear();
      while (trace.frames.size() < params.frames) {
        const std::size_t span = params.max_episode - params.min_episode + 1;
        const std::size_t length = std::min(
            params.min_episode + below(rng, span), params.frames - trace.frames.size());
        trace.episode_starts.push_back(trace.frames.size());
        switch (below(rng, 3)) {
          case 0: static_segment(params, length, rng, trace.frames); break;
          case 1: {
            const int vx = static_cast<int>(below(rng, 5)) - 2;
            const int vy = static_cast<int>(below(rng, 5)) - 2;
            drift_segment(params, length, vx, vy, rng, trace.frames);
            break;
          }
          default: noise_segment(params, length, rng, trace.frames); break;
        }
      }
      break;
    }
  }
  return trace;
}

double expected_change_density(GenMode mode, const GenParams& params) {
  const double pixels = static_cast<double>(params.height * params.width);
  const double blob = static_cast<double>(params.blob * params.blob);
  const bool moving = params.velocity_x != 0 || params.velocity_y != 0;
  switch (mode) {
    case GenMode::kStatic: return 0.0;
    case GenMode::kDrift: return moving ? std::min(1.0, 2.0 * blob / pixels) : 0.0;
    case GenMode::kNoise: return params.rho;
    case GenMode::kEpisodic:
      return (std::min(1.0, 2.0 * blob / pixels) + params.rho) / 3.0;
  }
  return 0.0;
}

double measured_change_density(const Trace& trace) {
  const auto starts = trace.start_flags();
  std::uint64_t changed = 0;
  std::uint64_t compared = 0;
  for (std::size_t k = 1; k < trace.frames.size(); ++k) {
    if (starts[k]) continue;
    const auto a = trace.frames[k - 1].pixels();
    const auto b = trace.frames[k].pixels();
    for (std::size_t p = 0; p < a.size(); ++p) changed += a[p] != b[p];
    compared += a.size();
  }
  return compared == 0 ? 0.0
                       : static_cast<double>(changed) / static_cast<double>(compared);
}

}  // namespace deobs

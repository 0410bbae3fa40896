#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "deobs/frame_codec.hpp"
#include "deobs/obs_store.hpp"

namespace deobs {

/// A recorded frame stream with its episode boundaries.
struct Trace {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<Frame> frames;
  /// Strictly increasing, starts at 0, every entry < frames.size().
  std::vector<StepIndex> episode_starts;

  /// Throws InvalidParams when the invariants above or frame shapes fail.
  void validate() const;

  /// Per-frame episode-start flags.
  std::vector<bool> start_flags() const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Trace file layout, little-endian:
///   "DEOBSTR1" | u32 width | u32 height | u32 frame_count | u32 episode_count
///   | episode_count x u32 start | frame_count x (height*width) pixel bytes
inline constexpr char kTraceMagic[8] = {'D', 'E', 'O', 'B', 'S', 'T', 'R', '1'};
inline constexpr std::size_t kTraceHeaderBytes = 24;

std::vector<std::uint8_t> encode_trace(const Trace& trace);
/// Throws MalformedFile on bad magic, truncation, trailing bytes or
/// inconsistent counts.
Trace decode_trace(std::span<const std::uint8_t> bytes);

void write_trace(const Trace& trace, std::ostream& out);
Trace read_trace(std::istream& in);
void write_trace_file(const Trace& trace, const std::filesystem::path& path);
Trace read_trace_file(const std::filesystem::path& path);

/// Reads a whole file; throws Io when it cannot be opened.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace deobs

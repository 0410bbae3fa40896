#include "deobs/trace_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <string>

#include "byte_io.hpp"
#include "deobs/error.hpp"

namespace deobs {

void Trace::validate() const {
  check_dimensions(height, width);
  if (frames.empty()) {
    throw Error(ErrorCode::kInvalidParams, "trace has no frames");
  }
  if (frames.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidParams, "trace too long for 32-bit counts");
  }
  for (const auto& frame : frames) {
    if (frame.height() != height || frame.width() != width) {
      throw Error(ErrorCode::kInvalidParams, "frame shape differs from trace");
    }
  }
  if (episode_starts.empty() || episode_starts.front() != 0) {
    throw Error(ErrorCode::kInvalidParams, "episode starts must begin with 0");
  }
  for (std::size_t k = 0; k < episode_starts.size(); ++k) {
    if (episode_starts[k] >= frames.size() ||
        (k > 0 && episode_starts[k] <= episode_starts[k - 1])) {
      throw Error(ErrorCode::kInvalidParams,
                  "episode starts must be strictly increasing frame indices");
    }
  }
}

std::vector<bool> Trace::start_flags() const {
  std::vector<bool> flags(frames.size(), false);
  for (const auto s : episode_starts) {
    if (s < flags.size()) flags[s] = true;
  }
  return flags;
}

std::vector<std::uint8_t> encode_trace(const Trace& trace) {
  trace.validate();
  detail::ByteWriter w;
  w.bytes({reinterpret_cast<const std::uint8_t*>(kTraceMagic), 8});
  w.u32(static_cast<std::uint32_t>(trace.width));
  w.u32(static_cast<std::uint32_t>(trace.height));
  w.u32(static_cast<std::uint32_t>(trace.frames.size()));
  w.u32(static_cast<std::uint32_t>(trace.episode_starts.size()));
  for (const auto s : trace.episode_starts) w.u32(static_cast<std::uint32_t>(s));
  for (const auto& frame : trace.frames) w.bytes(frame.pixels());
  return std::move(w).take();
}

Trace decode_trace(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  const auto magic = r.bytes(8, "trace magic");
  if (!std::equal(magic.begin(), magic.end(),
                  reinterpret_cast<const std::uint8_t*>(kTraceMagic))) {
    throw Error(ErrorCode::kMalformedFile, "not a trace file (bad magic)");
  }
  Trace trace;
  trace.width = r.u32("width");
  trace.height = r.u32("height");
  const std::uint32_t frame_count = r.u32("frame count");
  const std::uint32_t episode_count = r.u32("episode count");
  if (trace.height == 0 || trace.width == 0 || trace.height > kMaxSide ||
      trace.width > kMaxSide) {
    throw Error(ErrorCode::kMalformedFile, "frame dimensions outside 1..256");
  }
  if (frame_count == 0) throw Error(ErrorCode::kMalformedFile, "zero frames");
  const std::uint64_t expected = kTraceHeaderBytes + 4ull * episode_count +
                                 std::uint64_t{frame_count} * trace.height * trace.width;
  if (bytes.size() != expected) {
    throw Error(ErrorCode::kMalformedFile,
                "file is " + std::to_string(bytes.size()) + " bytes, header implies " +
                    std::to_string(expected));
  }
  trace.episode_starts.reserve(episode_count);
  for (std::uint32_t k = 0; k < episode_count; ++k) {
    trace.episode_starts.push_back(r.u32("episode start"));
  }
  const std::size_t pixels = trace.height * trace.width;
  trace.frames.reserve(frame_count);
  for (std::uint32_t k = 0; k < frame_count; ++k) {
    const auto raw = r.bytes(pixels, "frame");
    trace.frames.emplace_back(trace.height, trace.width,
                              std::vector<std::uint8_t>(raw.begin(), raw.end()));
  }
  r.expect_end();
  try {
    trace.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedFile, e.what());
  }
  return trace;
}

void write_trace(const Trace& trace, std::ostream& out) {
  const auto bytes = encode_trace(trace);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "trace write failed");
}

Trace read_trace(std::istream& in) {
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_trace(bytes);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

void write_trace_file(const Trace& trace, const std::filesystem::path& path) {
  write_file_bytes(path, encode_trace(trace));
}

Trace read_trace_file(const std::filesystem::path& path) {
  return decode_trace(read_file_bytes(path));
}

}  // namespace deobs

#include "deobs/buffer_file.hpp"

#include <algorithm>
#include <string>

#include "byte_io.hpp"
#include "deobs/error.hpp"
#include "deobs/trace_io.hpp"

namespace deobs {

std::vector<std::uint8_t> serialize_buffer(const ReplayBuffer& buffer) {
  const auto& store = buffer.store();
  const auto& config = store.config();
  detail::ByteWriter w;
  w.bytes({reinterpret_cast<const std::uint8_t*>(kBufferMagic), 8});
  w.u32(kBufferVersion);
  w.u32(static_cast<std::uint32_t>(config.width));
  w.u32(static_cast<std::uint32_t>(config.height));
  w.u32(static_cast<std::uint32_t>(config.frame_stack));
  w.u32(static_cast<std::uint32_t>(config.capacity_steps));
  w.u32(static_cast<std::uint32_t>(store.head() & 0xFFFFFFFFu));
  w.u32(static_cast<std::uint32_t>(store.head() >> 32));
  w.u32(static_cast<std::uint32_t>(config.mode));

  for (const auto& frame : store.frame_slots()) w.bytes(frame.pixels());

  for (const auto& slot : store.diff_slots()) {
    if (!slot) {
      w.u32(kVacantDiff);
    } else if (!slot->is_sparse()) {
      w.u32(kDenseFlag | static_cast<std::uint32_t>(config.pixels_per_image()));
      w.bytes(slot->dense_pixels());
    } else {
      w.u32(static_cast<std::uint32_t>(slot->entry_count()));
      const auto inds = slot->inds();
      const auto vals = slot->vals();
      for (std::size_t k = 0; k < inds.size(); ++k) {
        w.u8(inds[k].row);
        w.u8(inds[k].col);
        w.u16(static_cast<std::uint16_t>(vals[k]));
      }
    }
  }

  w.u64(store.current_episode_start());
  for (const auto p : store.index_table()) w.u32(p);

  w.u32(static_cast<std::uint32_t>(buffer.action_width()));
  w.bytes(buffer.action_slots());
  for (const double r : buffer.reward_slots()) w.f64(r);
  w.bytes(buffer.done_slots());
  w.bytes(buffer.start_slots());
  return std::move(w).take();
}

ReplayBuffer deserialize_buffer(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  const auto magic = r.bytes(8, "buffer magic");
  if (!std::equal(magic.begin(), magic.end(),
                  reinterpret_cast<const std::uint8_t*>(kBufferMagic))) {
    throw Error(ErrorCode::kMalformedFile, "not a buffer file (bad magic)");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kBufferVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "buffer file version " + std::to_string(version) +
                    ", expected " + std::to_string(kBufferVersion));
  }
  StoreConfig config;
  config.width = r.u32("width");
  config.height = r.u32("height");
  config.frame_stack = r.u32("frame stack");
  config.capacity_steps = r.u32("capacity");
  const std::uint64_t head_low = r.u32("head");
  const std::uint64_t head = head_low | (std::uint64_t{r.u32("head")} << 32);
  const std::uint32_t mode = r.u32("mode");
  if (mode > 2) throw Error(ErrorCode::kMalformedFile, "unknown storage mode");
  config.mode = static_cast<StorageMode>(mode);
  try {
    validate(config);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedFile, e.what());
  }

  const std::size_t pixels = config.pixels_per_image();
  const std::size_t f = config.frame_stack;
  const std::size_t cap = config.capacity_steps;
  std::size_t frame_slots = 0;
  switch (config.mode) {
    case StorageMode::kFull: frame_slots = config.blocks(); break;
    case StorageMode::kHalf: frame_slots = cap; break;
    case StorageMode::kNone: frame_slots = cap * f; break;
  }
  // Reject sizes the remaining bytes cannot possibly hold before allocating.
  if (frame_slots * pixels > r.remaining()) {
    throw Error(ErrorCode::kMalformedFile, "truncated frame section");
  }
  std::vector<Frame> frames;
  frames.reserve(frame_slots);
  for (std::size_t k = 0; k < frame_slots; ++k) {
    const auto raw = r.bytes(pixels, "frame slot");
    frames.emplace_back(config.height, config.width,
                        std::vector<std::uint8_t>(raw.begin(), raw.end()));
  }

  std::vector<std::optional<DiffRecord>> diffs;
  if (config.mode == StorageMode::kFull) {
    diffs.resize(config.blocks() * (f - 1));
    for (auto& slot : diffs) {
      const std::uint32_t tag = r.u32("diff tag");
      if (tag == kVacantDiff) continue;
      if (tag & kDenseFlag) {
        if ((tag & ~kDenseFlag) != pixels) {
          throw Error(ErrorCode::kMalformedFile, "dense record size mismatch");
        }
        const auto raw = r.bytes(pixels, "dense diff");
        slot = DiffRecord::dense(Frame(config.height, config.width,
                                       std::vector<std::uint8_t>(raw.begin(), raw.end())));
        continue;
      }
      if (std::uint64_t{tag} * 4 > r.remaining()) {
        throw Error(ErrorCode::kMalformedFile, "truncated sparse diff");
      }
      std::vector<PixelCoord> inds(tag);
      std::vector<std::int16_t> vals(tag);
      for (std::uint32_t k = 0; k < tag; ++k) {
        inds[k].row = r.u8("diff row");
        inds[k].col = r.u8("diff col");
        vals[k] = static_cast<std::int16_t>(r.u16("diff value"));
      }
      try {
        slot = DiffRecord::sparse(config.height, config.width, std::move(inds),
                                  std::move(vals));
      } catch (const Error& e) {
        throw Error(ErrorCode::kMalformedFile, e.what());
      }
    }
  }

  const std::uint64_t episode_start = r.u64("episode start");
  std::vector<std::uint32_t> index;
  if (config.mode != StorageMode::kNone) {
    if (cap * f * 4 > r.remaining()) {
      throw Error(ErrorCode::kMalformedFile, "truncated index section");
    }
    index.resize(cap * f);
    for (auto& p : index) p = r.u32("index pointer");
  }

  const std::uint32_t action_width = r.u32("action width");
  if (std::uint64_t{action_width} * cap > r.remaining()) {
    throw Error(ErrorCode::kMalformedFile, "truncated action section");
  }
  const auto action_raw = r.bytes(std::size_t{action_width} * cap, "actions");
  std::vector<double> rewards(cap);
  for (auto& v : rewards) v = r.f64("reward");
  const auto done_raw = r.bytes(cap, "done flags");
  const auto start_raw = r.bytes(cap, "episode flags");
  r.expect_end();

  ObsStore store = ObsStore::restore(config, head, episode_start, std::move(frames),
                                     std::move(diffs), std::move(index));
  return ReplayBuffer::restore(
      std::move(store), action_width,
      std::vector<std::uint8_t>(action_raw.begin(), action_raw.end()),
      std::move(rewards), std::vector<std::uint8_t>(done_raw.begin(), done_raw.end()),
      std::vector<std::uint8_t>(start_raw.begin(), start_raw.end()));
}

void save_buffer(const ReplayBuffer& buffer, const std::filesystem::path& path) {
  write_file_bytes(path, serialize_buffer(buffer));
}

ReplayBuffer load_buffer(const std::filesystem::path& path) {
  return deserialize_buffer(read_file_bytes(path));
}

}  // namespace deobs

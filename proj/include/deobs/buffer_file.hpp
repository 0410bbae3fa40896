#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "deobs/replay_buffer.hpp"

namespace deobs {

/// Buffer file layout, little-endian throughout:
///
///   header   "DEOBSBF1" | u32 version (1) | u32 width | u32 height | u32 f
///            | u32 capacity | u32 head_low | u32 head_high
///            | u32 mode (0 full, 1 half, 2 none)
///   frames   every frame slot, raw: d slots (full), capacity (half),
///            capacity * f (none)
///   diffs    full mode only, d * (f - 1) slots, each a u32 tag then payload:
///              0xFFFFFFFF           vacant slot, no payload
///              0x80000000 | H*W     dense record, H*W pixel bytes
///              n                    sparse record, n x (u8 row, u8 col, i16 delta)
///   index    u64 current episode start, then capacity * f u32 step
///            pointers (absent in none mode)
///   meta     u32 action width, capacity * width action bytes,
///            capacity f64 rewards, capacity u8 done, capacity u8 episode start
///
/// The same buffer always serializes to the same bytes.
inline constexpr char kBufferMagic[8] = {'D', 'E', 'O', 'B', 'S', 'B', 'F', '1'};
inline constexpr std::uint32_t kBufferVersion = 1;
inline constexpr std::uint32_t kVacantDiff = 0xFFFFFFFFu;
inline constexpr std::uint32_t kDenseFlag = 0x80000000u;

std::vector<std::uint8_t> serialize_buffer(const ReplayBuffer& buffer);

/// Throws MalformedFile or VersionMismatch; never returns a partial buffer.
ReplayBuffer deserialize_buffer(std::span<const std::uint8_t> bytes);

void save_buffer(const ReplayBuffer& buffer, const std::filesystem::path& path);
ReplayBuffer load_buffer(const std::filesystem::path& path);

}  // namespace deobs

#pragma once

// Binary field snapshots.
//
//   offset  size      content
//   0       4         magic "ACFH"
//   4       4         format version (u32, currently 1)
//   8       4         dim (u32)
//   12      4         N (u32)
//   16      8         L (f64)
//   24      8*N^dim   values, canonical storage order
//
// All integers and floats little-endian.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "acfh/grid.hpp"

namespace acfh {

inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<std::uint8_t> encode_snapshot(const Field& u);
/// Throws ParseError with the byte offset of the first malformed element.
Field decode_snapshot(std::span<const std::uint8_t> bytes);

void save_snapshot(const std::filesystem::path& path, const Field& u);
Field load_snapshot(const std::filesystem::path& path);

}  // namespace acfh

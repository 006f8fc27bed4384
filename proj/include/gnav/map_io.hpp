#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gnav/worldgen.hpp"

namespace gnav {

/// Binary map container, version 1. All integers and floats little-endian:
///   "GNAVMAP\0" | u32 version | WorldConfig | u32 nx | u32 nz | f32 heights[nx*nz] (row-major)
///   | u8 kinds[nx*nz] | u32 box_count | boxes | u32 pad_count | pads
inline constexpr std::uint32_t kMapFormatVersion = 1;

std::vector<std::uint8_t> encode_map(const TerrainMap& map);
TerrainMap decode_map(const std::vector<std::uint8_t>& bytes);

void save_map(const TerrainMap& map, const std::filesystem::path& path);
TerrainMap load_map(const std::filesystem::path& path);

}  // namespace gnav

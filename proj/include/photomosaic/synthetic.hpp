#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "photomosaic/image.hpp"
#include "photomosaic/tiledb.hpp"

namespace photomosaic {

// Procedural stand-ins for a photo corpus, used by the benchmarks and the
// `synth` subcommand when no real tile collection is at hand.

/// Tiles of two-colour gradients with a few overlaid ellipses, smooth
/// value-noise shading and pixel noise; colours are drawn in HSV so the
/// set covers hue, saturation and brightness broadly.
std::vector<std::vector<std::uint8_t>> synthetic_tile_pixels(std::size_t count, TileSize size, std::uint64_t seed);

TileDatabase synthetic_database(std::size_t count, TileSize size, int bins_per_channel, std::uint64_t seed);

/// Landscape-like target: graded sky with a sun, a ridge of hills, a lake
/// and a textured foreground, with clouds and ripples, plus pixel noise.
Image synthetic_scene(int height, int width, std::uint64_t seed);

/// Writes `count` synthetic tiles as tile_00000.png, ... into `directory`.
void write_synthetic_tiles(const std::filesystem::path& directory, std::size_t count, TileSize size,
                           std::uint64_t seed);

} // namespace photomosaic

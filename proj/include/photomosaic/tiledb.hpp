#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "photomosaic/image.hpp"

namespace photomosaic {

/// Pixel dimensions of a tile (and of a target block): height m_b by width n_b.
struct TileSize {
    int height = 32;
    int width = 32;

    [[nodiscard]] std::size_t channel_values() const { return static_cast<std::size_t>(height) * width * 3; }
    friend bool operator==(const TileSize&, const TileSize&) = default;
};

/// Parses "32x32" (height x width). Throws MosaicError on malformed input.
TileSize parse_tile_size(const std::string& text);
std::string format_tile_size(TileSize size);

struct Tile {
    int id = 0;
    std::string source_path;
    /// height * width * 3 interleaved RGB bytes; intensity = byte / 255.
    std::vector<std::uint8_t> pixels;

    [[nodiscard]] double intensity(std::size_t i) const { return pixels[i] / 255.0; }
    friend bool operator==(const Tile&, const Tile&) = default;
};

/// B bins per RGB channel, channels concatenated (R bins, G bins, B bins).
/// Each channel's bins sum to 1.
struct Histogram {
    int bins_per_channel = 0;
    std::vector<double> bins;

    friend bool operator==(const Histogram&, const Histogram&) = default;
};

/// Bin i of a channel holds intensities v with i/B <= v < (i+1)/B; v == 1
/// lands in the last bin. Evaluated in exact integer arithmetic on the
/// 8-bit values, so boundary intensities never suffer rounding drift.
Histogram compute_histogram(std::span<const std::uint8_t> rgb, int bins_per_channel);
Histogram compute_histogram(const Tile& tile, int bins_per_channel);

/// Immutable set of candidate tiles with aligned histograms. Ids are the
/// positions 0..n-1.
class TileDatabase {
public:
    TileDatabase() = default;

    /// Builds a database from already-sized pixel blocks. Histograms are
    /// computed here. Throws if any block has the wrong size.
    TileDatabase(TileSize tile_size, int bins_per_channel, std::vector<std::vector<std::uint8_t>> pixels,
                 std::vector<std::string> source_paths = {});

    /// Assembles a database from stored parts (cache load). Validates alignment.
    TileDatabase(TileSize tile_size, int bins_per_channel, std::vector<Tile> tiles, std::vector<Histogram> histograms);

    [[nodiscard]] TileSize tile_size() const { return tile_size_; }
    [[nodiscard]] int bins_per_channel() const { return bins_; }
    [[nodiscard]] std::size_t size() const { return tiles_.size(); }
    [[nodiscard]] const Tile& tile(std::size_t id) const { return tiles_.at(id); }
    [[nodiscard]] const Histogram& histogram(std::size_t id) const { return histograms_.at(id); }
    [[nodiscard]] const std::vector<Tile>& tiles() const { return tiles_; }
    [[nodiscard]] const std::vector<Histogram>& histograms() const { return histograms_; }

    /// Raw pixel bytes for tile id without bounds checking (hot loop).
    [[nodiscard]] const std::uint8_t* pixel_data(std::size_t id) const { return tiles_[id].pixels.data(); }

    /// Histograms as a row-major n x 3B matrix, the input to k-means.
    [[nodiscard]] std::vector<double> histogram_matrix() const;

    friend bool operator==(const TileDatabase&, const TileDatabase&) = default;

private:
    TileSize tile_size_{};
    int bins_ = 0;
    std::vector<Tile> tiles_;
    std::vector<Histogram> histograms_;
};

struct IngestReport {
    std::vector<std::string> skipped;
};

/// Decodes every file directly inside `directory` (sorted by path), resizes
/// each decodable image to tile_size with bilinear filtering and builds the
/// database. Undecodable files are skipped with a warning on stderr and
/// listed in `report`. Throws if the directory is missing or yields no tile.
TileDatabase ingest_tiles(const std::filesystem::path& directory, TileSize tile_size, int bins_per_channel = 15,
                          IngestReport* report = nullptr, unsigned threads = 0);

/// Binary cache, layout documented in docs/cache_format.md.
void save_cache(const TileDatabase& db, const std::filesystem::path& path);

/// Throws MosaicError on bad magic, version, truncation, checksum mismatch,
/// or when `expected_size` is given and differs from the stored tile size.
TileDatabase load_cache(const std::filesystem::path& path, std::optional<TileSize> expected_size = std::nullopt);

} // namespace photomosaic

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "photomosaic/image.hpp"
#include "photomosaic/problem.hpp"
#include "photomosaic/rng.hpp"
#include "photomosaic/tiledb.hpp"

namespace testutil {

inline std::vector<std::uint8_t> random_bytes(photomosaic::Rng& rng, std::size_t n)
{
    std::vector<std::uint8_t> out(n);
    for (auto& v : out) {
        v = static_cast<std::uint8_t>(photomosaic::uniform_below(rng, 256));
    }
    return out;
}

inline photomosaic::TileDatabase random_db(std::size_t n, photomosaic::TileSize size, std::uint64_t seed, int bins = 4)
{
    photomosaic::Rng rng(seed);
    std::vector<std::vector<std::uint8_t>> px;
    for (std::size_t i = 0; i < n; ++i) {
        px.push_back(random_bytes(rng, size.channel_values()));
    }
    return photomosaic::TileDatabase(size, bins, std::move(px));
}

inline photomosaic::Image random_image(int h, int w, std::uint64_t seed)
{
    photomosaic::Rng rng(seed);
    photomosaic::Image img(h, w);
    img.rgb = random_bytes(rng, img.rgb.size());
    return img;
}

inline photomosaic::Image constant_image(int h, int w, std::uint8_t v)
{
    photomosaic::Image img(h, w);
    std::fill(img.rgb.begin(), img.rgb.end(), v);
    return img;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("photomosaic_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace testutil

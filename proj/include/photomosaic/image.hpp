#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace photomosaic {

/// 8-bit interleaved RGB raster, row-major. Intensity v maps to v / 255.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int h, int w);

    [[nodiscard]] bool empty() const { return height == 0 || width == 0; }
    [[nodiscard]] std::size_t index(int row, int col, int channel) const
    {
        return (static_cast<std::size_t>(row) * width + col) * 3 + channel;
    }
    [[nodiscard]] std::uint8_t at(int row, int col, int channel) const { return rgb[index(row, col, channel)]; }
    std::uint8_t& at(int row, int col, int channel) { return rgb[index(row, col, channel)]; }

    friend bool operator==(const Image&, const Image&) = default;
};

/// Decodes any raster format OpenCV understands (PNG, JPEG, BMP, ...).
/// Grayscale and alpha inputs are converted to RGB. Throws MosaicError.
Image load_image(const std::filesystem::path& path);

/// Non-throwing probe used by tile ingestion; returns an empty image when
/// the file is not a decodable raster.
Image try_load_image(const std::filesystem::path& path);

/// Encodes by extension (.png lossless, .jpg/.jpeg quality 95).
void save_image(const Image& image, const std::filesystem::path& path);

/// Bilinear resampling with pixel-center alignment (the convention used by
/// most imaging libraries), rounding half up back to 8 bits. Resizing to
/// the same dimensions returns an identical image.
Image resize_bilinear(const Image& src, int height, int width);

} // namespace photomosaic

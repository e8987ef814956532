#include "photomosaic/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "photomosaic/error.hpp"
#include "photomosaic/rng.hpp"

namespace photomosaic {

namespace {

using Color = std::array<double, 3>;

double uniform(Rng& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform_unit(rng);
}

Color hsv(double h, double s, double v)
{
    h = h - std::floor(h);
    const double c = v * s;
    const double hp = h * 6.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    Color rgb{};
    switch (static_cast<int>(hp) % 6) {
    case 0: rgb = {c, x, 0}; break;
    case 1: rgb = {x, c, 0}; break;
    case 2: rgb = {0, c, x}; break;
    case 3: rgb = {0, x, c}; break;
    case 4: rgb = {x, 0, c}; break;
    default: rgb = {c, 0, x}; break;
    }
    const double m = v - c;
    return {(rgb[0] + m) * 255.0, (rgb[1] + m) * 255.0, (rgb[2] + m) * 255.0};
}

Color random_color(Rng& rng)
{
    return hsv(uniform_unit(rng), uniform(rng, 0.0, 0.85), uniform(rng, 0.08, 1.0));
}

Color mix(const Color& a, const Color& b, double t)
{
    return {a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t, a[2] + (b[2] - a[2]) * t};
}

std::uint8_t to_byte(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

struct Ellipse {
    double cy, cx, ry, rx;
    Color color;
};

// Smooth random field in [-1, 1]: bilinear interpolation of a random
// lattice with `cells` cells along the shorter side, two octaves.
class ValueNoise {
public:
    ValueNoise(Rng& rng, int height, int width, int cells)
        : step_(static_cast<double>(std::min(height, width)) / cells),
          rows_(static_cast<int>(height / step_) + 2),
          cols_(static_cast<int>(width / step_) + 2),
          lattice_(static_cast<std::size_t>(rows_) * cols_ * 2)
    {
        for (double& v : lattice_) {
            v = uniform(rng, -1.0, 1.0);
        }
    }

    [[nodiscard]] double operator()(double y, double x) const
    {
        return 0.65 * octave(y / step_, x / step_, 0) + 0.35 * octave(2.0 * y / step_, 2.0 * x / step_, 1);
    }

private:
    [[nodiscard]] double octave(double fy, double fx, int layer) const
    {
        const int span_r = rows_ - 1;
        const int span_c = cols_ - 1;
        fy = std::fmod(fy, static_cast<double>(span_r));
        fx = std::fmod(fx, static_cast<double>(span_c));
        const int y0 = static_cast<int>(fy);
        const int x0 = static_cast<int>(fx);
        const double ty = fy - y0;
        const double tx = fx - x0;
        auto at = [&](int r, int c) {
            return lattice_[(static_cast<std::size_t>(layer) * rows_ + r) * cols_ + c];
        };
        const double top = at(y0, x0) * (1 - tx) + at(y0, x0 + 1) * tx;
        const double bottom = at(y0 + 1, x0) * (1 - tx) + at(y0 + 1, x0 + 1) * tx;
        return top * (1 - ty) + bottom * ty;
    }

    double step_;
    int rows_;
    int cols_;
    std::vector<double> lattice_;
};

} // namespace

std::vector<std::vector<std::uint8_t>> synthetic_tile_pixels(std::size_t count, TileSize size, std::uint64_t seed)
{
    std::vector<std::vector<std::uint8_t>> tiles;
    tiles.reserve(count);
    const double h = size.height;
    const double w = size.width;
    for (std::size_t t = 0; t < count; ++t) {
        Rng rng(derive_seed(seed, t));
        const Color base = random_color(rng);
        const Color other = mix(base, random_color(rng), uniform(rng, 0.1, 0.6));
        const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const double dy = std::sin(angle);
        const double dx = std::cos(angle);
        std::vector<Ellipse> blobs(uniform_below(rng, 4));
        for (auto& e : blobs) {
            e = {uniform(rng, 0, h), uniform(rng, 0, w), uniform(rng, h * 0.08, h * 0.4), uniform(rng, w * 0.08, w * 0.4),
                 mix(base, random_color(rng), uniform(rng, 0.2, 0.9))};
        }
        const double noise = uniform(rng, 2.0, 14.0);
        const ValueNoise texture(rng, size.height, size.width, 1 + static_cast<int>(uniform_below(rng, 6)));
        const double texture_amp = uniform(rng, 5.0, 50.0);

        std::vector<std::uint8_t> px(size.channel_values());
        for (int y = 0; y < size.height; ++y) {
            for (int x = 0; x < size.width; ++x) {
                const double u = ((y + 0.5) / h - 0.5) * dy + ((x + 0.5) / w - 0.5) * dx + 0.5;
                Color c = mix(base, other, std::clamp(u, 0.0, 1.0));
                for (const auto& e : blobs) {
                    const double ny = (y + 0.5 - e.cy) / e.ry;
                    const double nx = (x + 0.5 - e.cx) / e.rx;
                    if (ny * ny + nx * nx <= 1.0) {
                        c = e.color;
                    }
                }
                const double shade = texture_amp * texture(y, x);
                for (int ch = 0; ch < 3; ++ch) {
                    px[(static_cast<std::size_t>(y) * size.width + x) * 3 + ch] =
                        to_byte(c[static_cast<std::size_t>(ch)] + shade + uniform(rng, -noise, noise));
                }
            }
        }
        tiles.push_back(std::move(px));
    }
    return tiles;
}

TileDatabase synthetic_database(std::size_t count, TileSize size, int bins_per_channel, std::uint64_t seed)
{
    return TileDatabase(size, bins_per_channel, synthetic_tile_pixels(count, size, seed));
}

Image synthetic_scene(int height, int width, std::uint64_t seed)
{
    if (height <= 0 || width <= 0) {
        throw MosaicError("synthetic scene needs positive dimensions");
    }
    Rng rng(seed);
    const double H = height;
    const double W = width;
    const double horizon = uniform(rng, 0.35, 0.5) * H;
    const double lake_top = uniform(rng, 0.68, 0.78) * H;
    const Color sky_top = hsv(uniform(rng, 0.55, 0.65), uniform(rng, 0.5, 0.8), uniform(rng, 0.5, 0.8));
    const Color sky_bottom = hsv(uniform(rng, 0.05, 0.15), uniform(rng, 0.2, 0.5), uniform(rng, 0.85, 1.0));
    const Color hill_near = hsv(uniform(rng, 0.22, 0.33), uniform(rng, 0.4, 0.7), uniform(rng, 0.25, 0.45));
    const Color hill_far = hsv(uniform(rng, 0.5, 0.6), uniform(rng, 0.2, 0.4), uniform(rng, 0.45, 0.6));
    const Color water = hsv(uniform(rng, 0.52, 0.6), uniform(rng, 0.5, 0.8), uniform(rng, 0.3, 0.55));
    const Color ground = hsv(uniform(rng, 0.06, 0.12), uniform(rng, 0.4, 0.7), uniform(rng, 0.3, 0.5));
    const double sun_y = uniform(rng, 0.1, 0.25) * H;
    const double sun_x = uniform(rng, 0.15, 0.85) * W;
    const double sun_r = uniform(rng, 0.04, 0.07) * std::min(H, W);

    std::array<double, 4> freq{};
    std::array<double, 4> phase{};
    std::array<double, 4> amp{};
    for (std::size_t i = 0; i < freq.size(); ++i) {
        freq[i] = uniform(rng, 1.0, 3.0) * static_cast<double>(i + 1);
        phase[i] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        amp[i] = uniform(rng, 0.02, 0.08) / static_cast<double>(i + 1);
    }
    auto ridge = [&](double x, double offset) {
        double v = 0.0;
        for (std::size_t i = 0; i < freq.size(); ++i) {
            v += amp[i] * std::sin(freq[i] * 2.0 * std::numbers::pi * x / W + phase[i] + offset);
        }
        return (v + offset * 0.02) * H;
    };

    const ValueNoise clouds(rng, height, width, 6);
    const ValueNoise foliage(rng, height, width, 90);
    const ValueNoise ripples(rng, height, width, 160);

    Image img(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            Color c;
            const double far_line = horizon - ridge(x, 1.7) - 0.06 * H;
            const double near_line = horizon + 0.08 * H - ridge(x, 0.0);
            if (y < far_line) {
                c = mix(sky_top, sky_bottom, y / horizon);
                c = mix(c, hsv(0.6, 0.05, 0.97), std::max(0.0, clouds(y, x)) * 0.8);
                const double d = std::hypot(y - sun_y, x - sun_x);
                if (d < sun_r) {
                    c = hsv(0.13, 0.35, 1.0);
                } else if (d < 3.0 * sun_r) {
                    c = mix(hsv(0.12, 0.3, 1.0), c, (d - sun_r) / (2.0 * sun_r));
                }
            } else if (y < near_line) {
                c = mix(hill_far, hill_near, 0.3 * (y - far_line) / std::max(1.0, near_line - far_line));
                const double f = 35.0 * foliage(y, x);
                c = {c[0] + f, c[1] + f, c[2] + f};
            } else if (y < lake_top) {
                const double t = (y - near_line) / std::max(1.0, lake_top - near_line);
                c = mix(hill_near, ground, t);
                c = mix(c, hsv(0.25, 0.6, 0.2), 0.5 * (0.5 + 0.5 * std::sin(x * 0.21 + y * 0.37)));
                const double f = 60.0 * foliage(y, x);
                c = {c[0] + f, c[1] + 1.2 * f, c[2] + 0.6 * f};
            } else {
                const double t = (y - lake_top) / std::max(1.0, H - lake_top);
                c = mix(water, mix(water, sky_bottom, 0.4), 0.5 + 0.5 * std::sin(y * 0.9 + 3.0 * std::sin(x * 0.02)));
                c = mix(c, ground, std::max(0.0, (t - 0.7) / 0.3));
                const double r = 30.0 * ripples(y, x);
                c = {c[0] + r, c[1] + r, c[2] + r};
            }
            for (int ch = 0; ch < 3; ++ch) {
                img.at(y, x, ch) = to_byte(c[static_cast<std::size_t>(ch)] + uniform(rng, -6.0, 6.0));
            }
        }
    }
    return img;
}

void write_synthetic_tiles(const std::filesystem::path& directory, std::size_t count, TileSize size,
                           std::uint64_t seed)
{
    std::filesystem::create_directories(directory);
    const auto tiles = synthetic_tile_pixels(count, size, seed);
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        Image img(size.height, size.width);
        img.rgb = tiles[i];
        char name[32];
        std::snprintf(name, sizeof name, "tile_%05zu.png", i);
        save_image(img, directory / name);
    }
}

} // namespace photomosaic

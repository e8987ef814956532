#include "photomosaic/tiledb.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <thread>

#include <zlib.h>

#include "photomosaic/error.hpp"

namespace photomosaic {

TileSize parse_tile_size(const std::string& text)
{
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) {
        throw MosaicError("expected HEIGHTxWIDTH, got '" + text + "'");
    }
    try {
        std::size_t used_h = 0;
        std::size_t used_w = 0;
        const std::string h = text.substr(0, x);
        const std::string w = text.substr(x + 1);
        TileSize size{std::stoi(h, &used_h), std::stoi(w, &used_w)};
        if (used_h != h.size() || used_w != w.size() || size.height <= 0 || size.width <= 0) {
            throw MosaicError("");
        }
        return size;
    } catch (const std::exception&) {
        throw MosaicError("expected positive HEIGHTxWIDTH, got '" + text + "'");
    }
}

std::string format_tile_size(TileSize size)
{
    return std::to_string(size.height) + "x" + std::to_string(size.width);
}

Histogram compute_histogram(std::span<const std::uint8_t> rgb, int bins_per_channel)
{
    if (bins_per_channel < 1) {
        throw MosaicError("histogram needs at least one bin per channel");
    }
    if (rgb.empty() || rgb.size() % 3 != 0) {
        throw MosaicError("histogram input must be a non-empty RGB pixel array");
    }
    const auto B = static_cast<unsigned>(bins_per_channel);
    std::vector<std::size_t> counts(3 * B, 0);
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        const unsigned channel = static_cast<unsigned>(i % 3);
        const unsigned bin = std::min(B - 1, rgb[i] * B / 255u);
        ++counts[channel * B + bin];
    }
    const double pixels = static_cast<double>(rgb.size() / 3);
    Histogram h{bins_per_channel, std::vector<double>(3 * B)};
    for (std::size_t i = 0; i < counts.size(); ++i) {
        h.bins[i] = static_cast<double>(counts[i]) / pixels;
    }
    return h;
}

Histogram compute_histogram(const Tile& tile, int bins_per_channel)
{
    return compute_histogram(std::span<const std::uint8_t>(tile.pixels), bins_per_channel);
}

TileDatabase::TileDatabase(TileSize tile_size, int bins_per_channel, std::vector<std::vector<std::uint8_t>> pixels,
                           std::vector<std::string> source_paths)
    : tile_size_(tile_size), bins_(bins_per_channel)
{
    if (tile_size.height <= 0 || tile_size.width <= 0) {
        throw MosaicError("tile size must be positive");
    }
    if (!source_paths.empty() && source_paths.size() != pixels.size()) {
        throw MosaicError("source path list does not match tile count");
    }
    tiles_.reserve(pixels.size());
    histograms_.reserve(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        if (pixels[i].size() != tile_size.channel_values()) {
            throw MosaicError("tile " + std::to_string(i) + " does not match tile size " + format_tile_size(tile_size));
        }
        Tile t{static_cast<int>(i), source_paths.empty() ? std::string{} : std::move(source_paths[i]),
               std::move(pixels[i])};
        histograms_.push_back(compute_histogram(t, bins_per_channel));
        tiles_.push_back(std::move(t));
    }
}

TileDatabase::TileDatabase(TileSize tile_size, int bins_per_channel, std::vector<Tile> tiles,
                           std::vector<Histogram> histograms)
    : tile_size_(tile_size), bins_(bins_per_channel), tiles_(std::move(tiles)), histograms_(std::move(histograms))
{
    if (tiles_.size() != histograms_.size()) {
        throw MosaicError("tile and histogram counts differ");
    }
    for (std::size_t i = 0; i < tiles_.size(); ++i) {
        if (tiles_[i].id != static_cast<int>(i)) {
            throw MosaicError("tile ids must be 0..n-1 without gaps");
        }
        if (tiles_[i].pixels.size() != tile_size_.channel_values()) {
            throw MosaicError("tile " + std::to_string(i) + " has wrong pixel count");
        }
        if (histograms_[i].bins_per_channel != bins_ ||
            histograms_[i].bins.size() != 3 * static_cast<std::size_t>(bins_)) {
            throw MosaicError("histogram " + std::to_string(i) + " has wrong bin count");
        }
    }
}

std::vector<double> TileDatabase::histogram_matrix() const
{
    std::vector<double> out;
    out.reserve(histograms_.size() * 3 * static_cast<std::size_t>(bins_));
    for (const auto& h : histograms_) {
        out.insert(out.end(), h.bins.begin(), h.bins.end());
    }
    return out;
}

TileDatabase ingest_tiles(const std::filesystem::path& directory, TileSize tile_size, int bins_per_channel,
                          IngestReport* report, unsigned threads)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(directory)) {
        throw MosaicError("tile directory does not exist: " + directory.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file()) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw MosaicError("tile directory is empty: " + directory.string());
    }

    std::vector<std::vector<std::uint8_t>> decoded(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            Image img = try_load_image(files[i]);
            if (!img.empty()) {
                decoded[i] = resize_bilinear(img, tile_size.height, tile_size.width).rgb;
            }
        }
    };
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(files.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }

    std::vector<std::vector<std::uint8_t>> pixels;
    std::vector<std::string> paths;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (decoded[i].empty()) {
            std::cerr << "warning: skipping undecodable file " << files[i].string() << '\n';
            if (report != nullptr) {
                report->skipped.push_back(files[i].string());
            }
            continue;
        }
        pixels.push_back(std::move(decoded[i]));
        paths.push_back(files[i].string());
    }
    if (pixels.empty()) {
        throw MosaicError("no decodable images in tile directory: " + directory.string());
    }
    return TileDatabase(tile_size, bins_per_channel, std::move(pixels), std::move(paths));
}

// ---------------------------------------------------------------------------
// Cache encoding

namespace {

constexpr char kMagic[4] = {'P', 'M', 'T', 'C'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    void bytes(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const std::uint8_t*>(data);
        buf_.insert(buf_.end(), p, p + n);
    }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i) {
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    std::vector<std::uint8_t>& buffer() { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> data, std::string origin) : data_(data), origin_(std::move(origin)) {}

    std::span<const std::uint8_t> take(std::size_t n)
    {
        if (n > data_.size() - pos_) {
            throw MosaicError("tile cache truncated: " + origin_);
        }
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }
    std::uint32_t u32()
    {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) {
            v = (v << 8) | b[static_cast<std::size_t>(i)];
        }
        return v;
    }
    std::uint64_t u64()
    {
        auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) {
            v = (v << 8) | b[static_cast<std::size_t>(i)];
        }
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    [[nodiscard]] bool done() const { return pos_ == data_.size(); }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
    std::string origin_;
};

std::uint32_t checksum(std::span<const std::uint8_t> data)
{
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks for multi-gigabyte caches.
    constexpr std::size_t chunk = 1u << 30;
    for (std::size_t off = 0; off < data.size(); off += chunk) {
        const auto n = std::min(chunk, data.size() - off);
        crc = crc32(crc, data.data() + off, static_cast<uInt>(n));
    }
    return static_cast<std::uint32_t>(crc);
}

} // namespace

void save_cache(const TileDatabase& db, const std::filesystem::path& path)
{
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(db.tile_size().height));
    w.u32(static_cast<std::uint32_t>(db.tile_size().width));
    w.u32(static_cast<std::uint32_t>(db.bins_per_channel()));
    w.u64(db.size());
    for (std::size_t i = 0; i < db.size(); ++i) {
        const Tile& t = db.tile(i);
        w.u32(static_cast<std::uint32_t>(t.source_path.size()));
        w.bytes(t.source_path.data(), t.source_path.size());
        w.bytes(t.pixels.data(), t.pixels.size());
        for (double v : db.histogram(i).bins) {
            w.f64(v);
        }
    }
    w.u32(checksum(w.buffer()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw MosaicError("cannot open cache for writing: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(w.buffer().data()), static_cast<std::streamsize>(w.buffer().size()));
    if (!out) {
        throw MosaicError("failed writing cache: " + path.string());
    }
}

TileDatabase load_cache(const std::filesystem::path& path, std::optional<TileSize> expected_size)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MosaicError("cannot open tile cache: " + path.string());
    }
    const std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string origin = path.string();

    if (data.size() < sizeof kMagic || std::memcmp(data.data(), kMagic, sizeof kMagic) != 0) {
        throw MosaicError("not a tile cache (bad magic): " + origin);
    }
    if (data.size() < sizeof kMagic + 4) {
        throw MosaicError("tile cache truncated: " + origin);
    }
    const std::span<const std::uint8_t> all(data);
    const auto body = all.first(data.size() - 4);
    Reader trailer(all.last(4), origin);
    if (trailer.u32() != checksum(body)) {
        throw MosaicError("tile cache checksum mismatch (corrupt or truncated): " + origin);
    }

    Reader r(body, origin);
    r.take(sizeof kMagic);
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw MosaicError("tile cache version " + std::to_string(version) + " unsupported (expected " +
                          std::to_string(kVersion) + "): " + origin);
    }
    TileSize size{static_cast<int>(r.u32()), static_cast<int>(r.u32())};
    const int bins = static_cast<int>(r.u32());
    const std::uint64_t n = r.u64();
    if (size.height <= 0 || size.width <= 0 || bins <= 0) {
        throw MosaicError("tile cache header invalid: " + origin);
    }
    if (expected_size && *expected_size != size) {
        throw MosaicError("tile cache holds " + format_tile_size(size) + " tiles but " +
                          format_tile_size(*expected_size) + " was requested: " + origin);
    }

    std::vector<Tile> tiles;
    std::vector<Histogram> histograms;
    for (std::uint64_t i = 0; i < n; ++i) {
        Tile t;
        t.id = static_cast<int>(i);
        const auto path_bytes = r.take(r.u32());
        t.source_path.assign(path_bytes.begin(), path_bytes.end());
        const auto px = r.take(size.channel_values());
        t.pixels.assign(px.begin(), px.end());
        Histogram h{bins, std::vector<double>(3 * static_cast<std::size_t>(bins))};
        for (double& v : h.bins) {
            v = r.f64();
        }
        tiles.push_back(std::move(t));
        histograms.push_back(std::move(h));
    }
    if (!r.done()) {
        throw MosaicError("tile cache has trailing bytes: " + origin);
    }
    return TileDatabase(size, bins, std::move(tiles), std::move(histograms));
}

} // namespace photomosaic

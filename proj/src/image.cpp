#include "photomosaic/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "photomosaic/error.hpp"

namespace photomosaic {

Image::Image(int h, int w) : height(h), width(w), rgb(static_cast<std::size_t>(h) * w * 3, 0)
{
    if (h < 0 || w < 0) {
        throw MosaicError("negative image dimensions");
    }
}

namespace {

Image from_bgr(const cv::Mat& bgr)
{
    Image out(bgr.rows, bgr.cols);
    for (int r = 0; r < bgr.rows; ++r) {
        const auto* row = bgr.ptr<cv::Vec3b>(r);
        for (int c = 0; c < bgr.cols; ++c) {
            out.at(r, c, 0) = row[c][2];
            out.at(r, c, 1) = row[c][1];
            out.at(r, c, 2) = row[c][0];
        }
    }
    return out;
}

struct Tap {
    int lo;
    int hi;
    double frac;
};

std::vector<Tap> taps(int src_len, int dst_len)
{
    std::vector<Tap> out(static_cast<std::size_t>(dst_len));
    const double scale = static_cast<double>(src_len) / dst_len;
    for (int i = 0; i < dst_len; ++i) {
        double s = (i + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
        const int lo = static_cast<int>(std::floor(s));
        out[static_cast<std::size_t>(i)] = {lo, std::min(lo + 1, src_len - 1), s - lo};
    }
    return out;
}

} // namespace

Image try_load_image(const std::filesystem::path& path)
{
    cv::Mat bgr;
    try {
        bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    } catch (const cv::Exception&) {
        return {};
    }
    if (bgr.empty() || bgr.type() != CV_8UC3) {
        return {};
    }
    return from_bgr(bgr);
}

Image load_image(const std::filesystem::path& path)
{
    if (!std::filesystem::is_regular_file(path)) {
        throw MosaicError("image not found: " + path.string());
    }
    Image img = try_load_image(path);
    if (img.empty()) {
        throw MosaicError("cannot decode image: " + path.string());
    }
    return img;
}

void save_image(const Image& image, const std::filesystem::path& path)
{
    if (image.empty()) {
        throw MosaicError("refusing to write an empty image: " + path.string());
    }
    cv::Mat bgr(image.height, image.width, CV_8UC3);
    for (int r = 0; r < image.height; ++r) {
        auto* row = bgr.ptr<cv::Vec3b>(r);
        for (int c = 0; c < image.width; ++c) {
            row[c] = cv::Vec3b(image.at(r, c, 2), image.at(r, c, 1), image.at(r, c, 0));
        }
    }
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    std::vector<int> params;
    if (ext == ".jpg" || ext == ".jpeg") {
        params = {cv::IMWRITE_JPEG_QUALITY, 95};
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), bgr, params);
    } catch (const cv::Exception& e) {
        throw MosaicError("cannot write image " + path.string() + ": " + e.what());
    }
    if (!ok) {
        throw MosaicError("cannot write image: " + path.string());
    }
}

Image resize_bilinear(const Image& src, int height, int width)
{
    if (src.empty() || height <= 0 || width <= 0) {
        throw MosaicError("resize requires non-empty source and target dimensions");
    }
    if (src.height == height && src.width == width) {
        return src;
    }
    const auto ys = taps(src.height, height);
    const auto xs = taps(src.width, width);
    Image out(height, width);
    for (int r = 0; r < height; ++r) {
        const Tap& ty = ys[static_cast<std::size_t>(r)];
        for (int c = 0; c < width; ++c) {
            const Tap& tx = xs[static_cast<std::size_t>(c)];
            for (int ch = 0; ch < 3; ++ch) {
                const double top = (1.0 - tx.frac) * src.at(ty.lo, tx.lo, ch) + tx.frac * src.at(ty.lo, tx.hi, ch);
                const double bottom = (1.0 - tx.frac) * src.at(ty.hi, tx.lo, ch) + tx.frac * src.at(ty.hi, tx.hi, ch);
                const double v = (1.0 - ty.frac) * top + ty.frac * bottom;
                out.at(r, c, ch) = static_cast<std::uint8_t>(std::min(255.0, std::floor(v + 0.5)));
            }
        }
    }
    return out;
}

} // namespace photomosaic

// image.hpp - 8-bit RGB raster, block geometry, PSNR, resize and crop.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace etcjpeg {

// Interleaved 8-bit RGB raster, row-major. Immutable by convention: the
// operations below return fresh images instead of mutating in place.
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // size == width * height * 3

    RasterImage() = default;

    RasterImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(check_dims(w, h), fill) {}

    RasterImage(int w, int h, std::vector<std::uint8_t> px)
        : width(w), height(h), pixels(std::move(px)) {
        if (pixels.size() != check_dims(w, h))
            throw std::invalid_argument("pixel buffer size does not match dimensions");
    }

    std::uint8_t& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }

    bool same_size(const RasterImage& o) const {
        return width == o.width && height == o.height;
    }

    bool operator==(const RasterImage& o) const = default;

private:
    static std::size_t check_dims(int w, int h) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("image dimensions must be >= 1");
        return static_cast<std::size_t>(w) * h * 3;
    }
};

// Number of whole BxB blocks that fit in an X x Y image: floor(X/Bx)*floor(Y/By).
inline std::int64_t block_count(int width, int height, int block_w, int block_h) {
    if (width < 1 || height < 1 || block_w < 1 || block_h < 1)
        throw std::invalid_argument("block_count: all dimensions must be >= 1");
    return static_cast<std::int64_t>(width / block_w) * (height / block_h);
}

// Block partition of an image; remainder pixels are outside the grid.
struct BlockGrid {
    int block_w = 0;
    int block_h = 0;
    int cols = 0;
    int rows = 0;
    std::int64_t total() const { return static_cast<std::int64_t>(cols) * rows; }
};

inline BlockGrid make_block_grid(int width, int height, int block_w, int block_h) {
    block_count(width, height, block_w, block_h);  // validates
    return BlockGrid{block_w, block_h, width / block_w, height / block_h};
}

// PSNR over all interleaved samples of all three channels, in dB.
// Returns +infinity when the images are identical.
inline double psnr(const RasterImage& a, const RasterImage& b) {
    if (!a.same_size(b))
        throw std::invalid_argument("psnr: image dimensions differ");
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
        sum_sq += d * d;
    }
    if (sum_sq == 0.0)
        return std::numeric_limits<double>::infinity();
    const double mse = sum_sq / static_cast<double>(a.pixels.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace detail {

inline std::uint8_t bilinear_sample(const RasterImage& img, double sx, double sy, int c) {
    const auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
    const int x0 = clampi(static_cast<int>(std::floor(sx)), 0, img.width - 1);
    const int y0 = clampi(static_cast<int>(std::floor(sy)), 0, img.height - 1);
    const int x1 = clampi(x0 + 1, 0, img.width - 1);
    const int y1 = clampi(y0 + 1, 0, img.height - 1);
    const double tx = sx - std::floor(sx);
    const double ty = sy - std::floor(sy);
    const double top = img.at(x0, y0, c) * (1.0 - tx) + img.at(x1, y0, c) * tx;
    const double bot = img.at(x0, y1, c) * (1.0 - tx) + img.at(x1, y1, c) * tx;
    const long v = std::lround(top * (1.0 - ty) + bot * ty);
    return static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
}

}  // namespace detail

// Downscale so both dimensions fit within (max_w, max_h), preserving aspect
// ratio; identity when the image already fits. Bilinear, half-pixel centers.
inline RasterImage resize_bilinear(const RasterImage& img, int max_w, int max_h) {
    if (max_w < 1 || max_h < 1)
        throw std::invalid_argument("resize_bilinear: limits must be >= 1");
    if (img.width <= max_w && img.height <= max_h)
        return img;
    const double scale = std::min(static_cast<double>(max_w) / img.width,
                                  static_cast<double>(max_h) / img.height);
    const int out_w = std::min<int>(max_w, std::max<long>(1, std::lround(img.width * scale)));
    const int out_h = std::min<int>(max_h, std::max<long>(1, std::lround(img.height * scale)));
    RasterImage out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        const double sy = (y + 0.5) * img.height / out_h - 0.5;
        for (int x = 0; x < out_w; ++x) {
            const double sx = (x + 0.5) * img.width / out_w - 0.5;
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = detail::bilinear_sample(img, sx, sy, c);
        }
    }
    return out;
}

// Top-left crop to the largest whole-block region of the (block_w, block_h) grid.
inline RasterImage crop_to_block_multiple(const RasterImage& img, int block_w, int block_h) {
    if (block_w < 1 || block_h < 1)
        throw std::invalid_argument("crop_to_block_multiple: block dimensions must be >= 1");
    if (img.width < block_w || img.height < block_h)
        throw std::invalid_argument("crop_to_block_multiple: image smaller than one block");
    const int out_w = (img.width / block_w) * block_w;
    const int out_h = (img.height / block_h) * block_h;
    if (out_w == img.width && out_h == img.height)
        return img;
    RasterImage out(out_w, out_h);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x)
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = img.at(x, y, c);
    return out;
}

}  // namespace etcjpeg

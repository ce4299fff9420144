// jpeg_dsp.hpp - sample-domain pieces of the codec: color transforms,
// chroma resampling, plane padding and the 8x8 DCT pair.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "etcjpeg/image.hpp"

namespace etcjpeg {

enum class Subsampling { S444, S420 };

inline const char* subsampling_name(Subsampling s) {
    return s == Subsampling::S444 ? "4:4:4" : "4:2:0";
}

// Single-component sample plane.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> samples;

    Plane() = default;
    Plane(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const Plane&) const = default;
};

namespace detail {

inline std::uint8_t round_clamp_u8(double v) {
    const long r = std::lround(v);
    return static_cast<std::uint8_t>(r < 0 ? 0 : (r > 255 ? 255 : r));
}

}  // namespace detail

// BT.601 full-range RGB -> YCbCr, rounded to nearest and clamped.
inline std::array<Plane, 3> rgb_to_ycbcr(const RasterImage& img) {
    Plane y(img.width, img.height), cb(img.width, img.height), cr(img.width, img.height);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double R = img.at(c, r, 0);
            const double G = img.at(c, r, 1);
            const double B = img.at(c, r, 2);
            y.at(c, r) = detail::round_clamp_u8(0.299 * R + 0.587 * G + 0.114 * B);
            cb.at(c, r) = detail::round_clamp_u8(128.0 - 0.168736 * R - 0.331264 * G + 0.5 * B);
            cr.at(c, r) = detail::round_clamp_u8(128.0 + 0.5 * R - 0.418688 * G - 0.081312 * B);
        }
    }
    return {std::move(y), std::move(cb), std::move(cr)};
}

inline RasterImage ycbcr_to_rgb(const Plane& y, const Plane& cb, const Plane& cr) {
    if (y.width != cb.width || y.width != cr.width || y.height != cb.height ||
        y.height != cr.height)
        throw std::invalid_argument("ycbcr_to_rgb: plane sizes differ");
    RasterImage img(y.width, y.height);
    for (int r = 0; r < y.height; ++r) {
        for (int c = 0; c < y.width; ++c) {
            const double Y = y.at(c, r);
            const double Cb = cb.at(c, r) - 128.0;
            const double Cr = cr.at(c, r) - 128.0;
            img.at(c, r, 0) = detail::round_clamp_u8(Y + 1.402 * Cr);
            img.at(c, r, 1) = detail::round_clamp_u8(Y - 0.344136 * Cb - 0.714136 * Cr);
            img.at(c, r, 2) = detail::round_clamp_u8(Y + 1.772 * Cb);
        }
    }
    return img;
}

// Extends a plane by edge replication up to multiples of (mult_x, mult_y).
inline Plane pad_plane_to_multiple(const Plane& p, int mult_x, int mult_y) {
    const int w = ((p.width + mult_x - 1) / mult_x) * mult_x;
    const int h = ((p.height + mult_y - 1) / mult_y) * mult_y;
    if (w == p.width && h == p.height)
        return p;
    Plane out(w, h);
    for (int y = 0; y < h; ++y) {
        const int sy = y < p.height ? y : p.height - 1;
        for (int x = 0; x < w; ++x)
            out.at(x, y) = p.at(x < p.width ? x : p.width - 1, sy);
    }
    return out;
}

// 4:2:0 downsampling: 2x2 box average, round half up, edges replicated for
// odd dimensions. 4:4:4 is the identity.
inline Plane subsample_chroma(const Plane& p, Subsampling mode) {
    if (mode == Subsampling::S444)
        return p;
    const int w = (p.width + 1) / 2;
    const int h = (p.height + 1) / 2;
    Plane out(w, h);
    for (int y = 0; y < h; ++y) {
        const int y0 = 2 * y;
        const int y1 = std::min(2 * y + 1, p.height - 1);
        for (int x = 0; x < w; ++x) {
            const int x0 = 2 * x;
            const int x1 = std::min(2 * x + 1, p.width - 1);
            const int sum = p.at(x0, y0) + p.at(x1, y0) + p.at(x0, y1) + p.at(x1, y1);
            out.at(x, y) = static_cast<std::uint8_t>((sum + 2) >> 2);
        }
    }
    return out;
}

// 4:2:0 upsampling to (out_w, out_h): bilinear with half-pixel phase,
// i.e. triangle weights (3*near + far + 2)/4 per axis, edges clamped. The
// interpolation reads across 8x8 chroma block boundaries, which is the
// inter-block dependence that matters for scrambled images. 4:4:4 is the
// identity.
inline Plane upsample_chroma(const Plane& p, Subsampling mode, int out_w, int out_h) {
    if (mode == Subsampling::S444) {
        if (p.width != out_w || p.height != out_h)
            throw std::invalid_argument("upsample_chroma: 4:4:4 plane size mismatch");
        return p;
    }
    Plane out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        // nearest coarse row and its neighbor toward the sample position
        const int cy = y >> 1;
        const int ny = (y & 1) ? std::min(cy + 1, p.height - 1) : std::max(cy - 1, 0);
        for (int x = 0; x < out_w; ++x) {
            const int cx = x >> 1;
            const int nx = (x & 1) ? std::min(cx + 1, p.width - 1) : std::max(cx - 1, 0);
            const int v = 9 * p.at(cx, cy) + 3 * p.at(nx, cy) + 3 * p.at(cx, ny) + p.at(nx, ny);
            out.at(x, y) = static_cast<std::uint8_t>((v + 8) >> 4);
        }
    }
    return out;
}

namespace detail {

// cos((2n+1) u pi / 16) scaled by C(u)/2, the separable factor of the
// T.81 A.3.3 transform. Orthogonal: a constant block c maps to DC = 8c.
inline const std::array<double, 64>& dct_basis() {
    static const std::array<double, 64> basis = [] {
        std::array<double, 64> b{};
        for (int u = 0; u < 8; ++u) {
            const double cu = u == 0 ? 1.0 / std::numbers::sqrt2 : 1.0;
            for (int n = 0; n < 8; ++n)
                b[static_cast<std::size_t>(u) * 8 + n] =
                    0.5 * cu * std::cos((2 * n + 1) * u * std::numbers::pi / 16.0);
        }
        return b;
    }();
    return basis;
}

}  // namespace detail

// Forward 8x8 DCT-II of level-shifted samples, row-major in and out.
inline void fdct8x8(const std::array<double, 64>& in, std::array<double, 64>& out) {
    const auto& b = detail::dct_basis();
    std::array<double, 64> tmp{};
    for (int r = 0; r < 8; ++r)           // rows
        for (int u = 0; u < 8; ++u) {
            double s = 0.0;
            for (int n = 0; n < 8; ++n)
                s += b[static_cast<std::size_t>(u) * 8 + n] * in[static_cast<std::size_t>(r) * 8 + n];
            tmp[static_cast<std::size_t>(r) * 8 + u] = s;
        }
    for (int c = 0; c < 8; ++c)           // columns
        for (int v = 0; v < 8; ++v) {
            double s = 0.0;
            for (int n = 0; n < 8; ++n)
                s += b[static_cast<std::size_t>(v) * 8 + n] * tmp[static_cast<std::size_t>(n) * 8 + c];
            out[static_cast<std::size_t>(v) * 8 + c] = s;
        }
}

// Inverse 8x8 DCT-III; idct8x8(fdct8x8(x)) == x to ~1e-13.
inline void idct8x8(const std::array<double, 64>& in, std::array<double, 64>& out) {
    const auto& b = detail::dct_basis();
    std::array<double, 64> tmp{};
    for (int r = 0; r < 8; ++r)
        for (int n = 0; n < 8; ++n) {
            double s = 0.0;
            for (int u = 0; u < 8; ++u)
                s += b[static_cast<std::size_t>(u) * 8 + n] * in[static_cast<std::size_t>(r) * 8 + u];
            tmp[static_cast<std::size_t>(r) * 8 + n] = s;
        }
    for (int c = 0; c < 8; ++c)
        for (int n = 0; n < 8; ++n) {
            double s = 0.0;
            for (int v = 0; v < 8; ++v)
                s += b[static_cast<std::size_t>(v) * 8 + n] * tmp[static_cast<std::size_t>(v) * 8 + c];
            out[static_cast<std::size_t>(n) * 8 + c] = s;
        }
}

}  // namespace etcjpeg

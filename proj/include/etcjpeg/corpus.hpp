// corpus.hpp - the deterministic 256x144 desk corpus: ten procedural images,
// part synthetic, part photographic in character. Every image carries some
// chroma variation so 4:2:0 effects are measurable, at photo-like saturation.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "etcjpeg/image.hpp"
#include "etcjpeg/keystream.hpp"

namespace etcjpeg {

namespace corpusdetail {

constexpr int kW = 256;
constexpr int kH = 144;

inline double lattice_hash(std::uint64_t seed, int xi, int yi) {
    KeyStream ks(seed ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(xi)) * 0x9E3779B1ull) ^
                 (static_cast<std::uint64_t>(static_cast<std::uint32_t>(yi)) * 0x85EBCA77ull));
    return static_cast<double>(ks.next() >> 11) * (1.0 / 9007199254740992.0);
}

inline double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

// Bilinear value noise on an integer lattice of pitch `scale`.
inline double value_noise(std::uint64_t seed, double x, double y, double scale) {
    const double fx = x / scale, fy = y / scale;
    const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
    const double tx = smooth(fx - x0), ty = smooth(fy - y0);
    const double a = lattice_hash(seed, x0, y0), b = lattice_hash(seed, x0 + 1, y0);
    const double c = lattice_hash(seed, x0, y0 + 1), d = lattice_hash(seed, x0 + 1, y0 + 1);
    return (a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty;
}

inline double fractal_noise(std::uint64_t seed, double x, double y, double scale,
                            int octaves) {
    double sum = 0.0, amp = 1.0, norm = 0.0;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * value_noise(seed + static_cast<std::uint64_t>(o) * 1013, x, y, scale);
        norm += amp;
        amp *= 0.5;
        scale *= 0.5;
    }
    return sum / norm;
}

struct Rgb {
    double r, g, b;
};

inline Rgb lerp(const Rgb& a, const Rgb& b, double t) {
    return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

template <typename F>
RasterImage render(F&& shade) {
    RasterImage img(kW, kH);
    for (int y = 0; y < kH; ++y) {
        for (int x = 0; x < kW; ++x) {
            const Rgb c = shade(x, y);
            const auto clamp8 = [](double v) {
                const long r = std::lround(v);
                return static_cast<std::uint8_t>(r < 0 ? 0 : (r > 255 ? 255 : r));
            };
            img.at(x, y, 0) = clamp8(c.r);
            img.at(x, y, 1) = clamp8(c.g);
            img.at(x, y, 2) = clamp8(c.b);
        }
    }
    return img;
}

inline RasterImage dawn_gradient() {
    return render([](int x, int y) {
        const double t = static_cast<double>(y) / (kH - 1);
        const double s = static_cast<double>(x) / (kW - 1);
        Rgb c = lerp({66, 86, 124}, {220, 176, 142}, t);
        c.r += 10.0 * s;
        c.b -= 8.0 * s;
        const double n = fractal_noise(11, x, y, 48, 3) - 0.5;
        c.r += 6 * n; c.g += 6 * n; c.b += 6 * n;
        return c;
    });
}

inline RasterImage hills() {
    return render([](int x, int y) {
        const double sky_t = static_cast<double>(y) / kH;
        Rgb c = lerp({150, 172, 200}, {226, 222, 204}, sky_t);
        const double ridges[3] = {
            70 + 22 * value_noise(21, x, 0, 90),
            96 + 20 * value_noise(22, x, 0, 60),
            122 + 16 * value_noise(23, x, 0, 40),
        };
        const Rgb tones[3] = {{104, 120, 108}, {80, 98, 80}, {58, 74, 56}};
        for (int i = 0; i < 3; ++i) {
            if (y > ridges[i]) {
                c = tones[i];
                const double n = fractal_noise(31 + static_cast<std::uint64_t>(i), x, y, 22, 3) - 0.5;
                c.r += 16 * n; c.g += 16 * n; c.b += 14 * n;
            }
        }
        return c;
    });
}

inline RasterImage meadow_plasma() {
    return render([](int x, int y) {
        const double t = fractal_noise(41, x, y, 72, 4);
        return t < 0.5 ? lerp({72, 96, 62}, {150, 158, 92}, t * 2)
                       : lerp({150, 158, 92}, {212, 200, 150}, (t - 0.5) * 2);
    });
}

inline RasterImage bokeh_lights() {
    struct Blob {
        double x, y, radius;
        Rgb color;
    };
    static const std::vector<Blob> blobs = [] {
        std::vector<Blob> v;
        KeyStream ks(57);
        const Rgb palette[4] = {{224, 180, 120}, {150, 190, 200}, {210, 150, 140}, {190, 200, 150}};
        for (int i = 0; i < 14; ++i) {
            Blob b;
            b.x = static_cast<double>(ks.next_below(kW));
            b.y = static_cast<double>(ks.next_below(kH));
            b.radius = 12.0 + static_cast<double>(ks.next_below(22));
            b.color = palette[ks.next_below(4)];
            v.push_back(b);
        }
        return v;
    }();
    return render([](int x, int y) {
        Rgb c = {42, 38, 50};
        for (const auto& b : blobs) {
            const double dx = x - b.x, dy = y - b.y;
            const double w = std::exp(-(dx * dx + dy * dy) / (b.radius * b.radius));
            c.r += (b.color.r - 40) * w * 0.7;
            c.g += (b.color.g - 40) * w * 0.7;
            c.b += (b.color.b - 40) * w * 0.7;
        }
        return c;
    });
}

inline RasterImage soft_stripes() {
    return render([](int x, int y) {
        const double phase = (x + 0.6 * y) * 0.12;
        const double lum = 145 + 42 * std::sin(phase);
        const double tint = std::sin(x * 0.015);
        return Rgb{lum + 11 * tint, lum, lum - 11 * tint};
    });
}

inline RasterImage rings() {
    return render([](int x, int y) {
        const double dx = x - 104, dy = y - 66;
        const double r = std::sqrt(dx * dx + dy * dy);
        const double lum = 136 + 48 * std::sin(r / 6.5);
        const double w = std::min(1.0, r / 120.0);
        return Rgb{lum + 14 * (1 - w) - 6 * w, lum, lum + 14 * w - 6 * (1 - w)};
    });
}

inline RasterImage pastel_checker() {
    // per-cell pastel color, then two box blurs to soften the block edges
    RasterImage hard = render([](int x, int y) {
        const int cx = x / 32, cy = y / 32;
        const double h = lattice_hash(67, cx, cy);
        const Rgb palette[5] = {{196, 168, 160}, {164, 184, 170}, {168, 168, 196},
                                {198, 190, 160}, {176, 160, 180}};
        return palette[static_cast<int>(h * 5) % 5];
    });
    for (int pass = 0; pass < 2; ++pass) {
        RasterImage soft = hard;
        for (int y = 0; y < kH; ++y)
            for (int x = 0; x < kW; ++x)
                for (int c = 0; c < 3; ++c) {
                    int sum = 0, n = 0;
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int sx = x + dx, sy = y + dy;
                            if (sx >= 0 && sx < kW && sy >= 0 && sy < kH) {
                                sum += hard.at(sx, sy, c);
                                ++n;
                            }
                        }
                    soft.at(x, y, c) = static_cast<std::uint8_t>((sum + n / 2) / n);
                }
        hard = std::move(soft);
    }
    return hard;
}

inline RasterImage film_grain() {
    return render([](int x, int y) {
        const double lum = 92 + 78 * fractal_noise(71, x, y, 14, 3);
        const double warm = fractal_noise(72, x, y, 64, 2) - 0.5;
        return Rgb{lum + 18 * warm, lum + 4 * warm, lum - 14 * warm};
    });
}

inline RasterImage test_card() {
    return render([](int x, int y) {
        Rgb c = {122, 122, 122};
        if (y >= 112) {  // gradient bar
            const double t = static_cast<double>(x) / (kW - 1);
            c = lerp({60, 64, 72}, {210, 200, 188}, t);
        }
        if (x >= 28 && x < 96 && y >= 18 && y < 62) c = {172, 112, 102};
        if (x >= 120 && x < 204 && y >= 26 && y < 84) c = {102, 122, 170};
        const double dx = x - 66, dy = y - 88;
        if (dx * dx + dy * dy < 22 * 22) c = {112, 160, 114};
        return c;
    });
}

inline RasterImage portrait_warm() {
    return render([](int x, int y) {
        const double dx = (x - 128) / 150.0, dy = (y - 60) / 110.0;
        const double r = std::sqrt(dx * dx + dy * dy);
        Rgb c = lerp({206, 172, 150}, {88, 70, 64}, std::min(1.0, r));
        const double n = fractal_noise(91, x, y, 26, 3) - 0.5;
        c.r += 12 * n; c.g += 10 * n; c.b += 9 * n;
        return c;
    });
}

}  // namespace corpusdetail

// Ten deterministic 256x144 images; the same content every call.
inline std::vector<std::pair<std::string, RasterImage>> make_desk_corpus() {
    using namespace corpusdetail;
    std::vector<std::pair<std::string, RasterImage>> corpus;
    corpus.emplace_back("01_dawn_gradient", dawn_gradient());
    corpus.emplace_back("02_hills", hills());
    corpus.emplace_back("03_meadow_plasma", meadow_plasma());
    corpus.emplace_back("04_bokeh_lights", bokeh_lights());
    corpus.emplace_back("05_soft_stripes", soft_stripes());
    corpus.emplace_back("06_rings", rings());
    corpus.emplace_back("07_pastel_checker", pastel_checker());
    corpus.emplace_back("08_film_grain", film_grain());
    corpus.emplace_back("09_test_card", test_card());
    corpus.emplace_back("10_portrait_warm", portrait_warm());
    return corpus;
}

}  // namespace etcjpeg

// cipher.hpp - four-step block scrambling encryption and its exact inverse.
//
// Encrypt applies, block by block on a (block x block) grid:
//   1. block permutation            (keyed by K1)
//   2. rotation / inversion         (keyed by K2, one of 8 dihedral elements)
//   3. negative-positive transform  (keyed by K3, XOR every sample with 255)
//   4. color component shuffle      (keyed by K4, one of the 6 RGB orders)
// Decrypt regenerates the same key streams and applies the inverses in
// reverse order. Round trips are bit-exact.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "etcjpeg/image.hpp"
#include "etcjpeg/keystream.hpp"

namespace etcjpeg {

// Per-step switches. Tests flip individual steps off to isolate their
// effect; normal callers use the default (all four on).
struct CipherSteps {
    bool permute = true;
    bool geometry = true;
    bool negative_positive = true;
    bool color_shuffle = true;
};

// Keyed Fisher-Yates permutation of [0, n). The result maps destination
// block index -> source block index.
inline std::vector<std::uint32_t> permutation_from_key(std::uint64_t k1, std::size_t n) {
    if (n == 0)
        throw std::invalid_argument("permutation_from_key: n must be >= 1");
    std::vector<std::uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = static_cast<std::uint32_t>(i);
    KeyStream ks(k1);
    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t j = static_cast<std::size_t>(ks.next_below(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

namespace detail {

// Geometry codes enumerate the dihedral group of the square:
// 0 identity, 1 rot90, 2 rot180, 3 rot270 (counter-clockwise),
// 4 horizontal flip, 5 vertical flip, 6 transpose, 7 anti-transpose.
inline int inverse_geometry_code(int code) {
    if (code == 1) return 3;
    if (code == 3) return 1;
    return code;  // all other elements are involutions
}

// Source coordinates for output position (c, r) under a geometry code.
inline void geometry_source(int code, int c, int r, int n, int& sc, int& sr) {
    switch (code) {
        case 0: sc = c;         sr = r;         break;
        case 1: sc = n - 1 - r; sr = c;         break;  // rot90 ccw
        case 2: sc = n - 1 - c; sr = n - 1 - r; break;  // rot180
        case 3: sc = r;         sr = n - 1 - c; break;  // rot270 ccw
        case 4: sc = n - 1 - c; sr = r;         break;  // horizontal flip
        case 5: sc = c;         sr = n - 1 - r; break;  // vertical flip
        case 6: sc = r;         sr = c;         break;  // transpose
        case 7: sc = n - 1 - r; sr = n - 1 - c; break;  // anti-transpose
        default: throw std::invalid_argument("geometry code must be 0..7");
    }
}

// Color shuffle codes 0..5 list the output channel orders in lexicographic
// order: RGB, RBG, GRB, GBR, BRG, BGR. kShuffle[code][slot] is the source
// channel written to output channel `slot`.
inline constexpr std::array<std::array<int, 3>, 6> kShuffle = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

}  // namespace detail

// Applies dihedral element `code` (or its inverse) to an interleaved RGB
// block of block_w x block_h pixels. Codes 1, 3, 6, 7 require a square block.
inline void transform_block_geometry(std::vector<std::uint8_t>& block, int block_w,
                                     int block_h, int code, bool inverse = false) {
    if (code < 0 || code > 7)
        throw std::invalid_argument("transform_block_geometry: code must be 0..7");
    if (block.size() != static_cast<std::size_t>(block_w) * block_h * 3)
        throw std::invalid_argument("transform_block_geometry: buffer size mismatch");
    if (code == 0)
        return;
    if (block_w != block_h && code != 2 && code != 4 && code != 5)
        throw std::invalid_argument("transform_block_geometry: non-square block with a rotation code");
    const int eff = inverse ? detail::inverse_geometry_code(code) : code;
    std::vector<std::uint8_t> src = block;
    for (int r = 0; r < block_h; ++r) {
        for (int c = 0; c < block_w; ++c) {
            int sc, sr;
            if (block_w == block_h) {
                detail::geometry_source(eff, c, r, block_w, sc, sr);
            } else {
                // non-square: only 2 / 4 / 5 reach here
                sc = (eff == 2 || eff == 4) ? block_w - 1 - c : c;
                sr = (eff == 2 || eff == 5) ? block_h - 1 - r : r;
            }
            for (int ch = 0; ch < 3; ++ch)
                block[(static_cast<std::size_t>(r) * block_w + c) * 3 + ch] =
                    src[(static_cast<std::size_t>(sr) * block_w + sc) * 3 + ch];
        }
    }
}

namespace detail {

struct BlockLayout {
    int block = 0;
    int cols = 0;
    int rows = 0;
    std::size_t n = 0;
};

inline BlockLayout cipher_layout(const RasterImage& img, int block_w, int block_h) {
    if (block_w < 1 || block_h < 1)
        throw std::invalid_argument("cipher: block dimensions must be >= 1");
    if (block_w != block_h)
        throw std::invalid_argument("cipher: only square blocks are supported");
    if (img.width % block_w != 0 || img.height % block_h != 0)
        throw std::invalid_argument("cipher: image dimensions must be exact block multiples");
    BlockLayout l;
    l.block = block_w;
    l.cols = img.width / block_w;
    l.rows = img.height / block_h;
    l.n = static_cast<std::size_t>(l.cols) * l.rows;
    return l;
}

inline void read_block(const RasterImage& img, const BlockLayout& l, std::size_t index,
                       std::vector<std::uint8_t>& out) {
    const int bx = static_cast<int>(index % l.cols) * l.block;
    const int by = static_cast<int>(index / l.cols) * l.block;
    out.resize(static_cast<std::size_t>(l.block) * l.block * 3);
    for (int r = 0; r < l.block; ++r)
        for (int c = 0; c < l.block; ++c)
            for (int ch = 0; ch < 3; ++ch)
                out[(static_cast<std::size_t>(r) * l.block + c) * 3 + ch] =
                    img.at(bx + c, by + r, ch);
}

inline void write_block(RasterImage& img, const BlockLayout& l, std::size_t index,
                        const std::vector<std::uint8_t>& in) {
    const int bx = static_cast<int>(index % l.cols) * l.block;
    const int by = static_cast<int>(index / l.cols) * l.block;
    for (int r = 0; r < l.block; ++r)
        for (int c = 0; c < l.block; ++c)
            for (int ch = 0; ch < 3; ++ch)
                img.at(bx + c, by + r, ch) =
                    in[(static_cast<std::size_t>(r) * l.block + c) * 3 + ch];
}

// Per-block draws are consumed in block-index order for each subkey stream,
// independently of any processing schedule.
struct CipherDraws {
    std::vector<std::uint32_t> perm;
    std::vector<std::uint8_t> geometry;  // 0..7
    std::vector<std::uint8_t> negpos;    // 0..1
    std::vector<std::uint8_t> shuffle;   // 0..5
};

inline CipherDraws make_draws(const EtcKey& key, std::size_t n) {
    CipherDraws d;
    d.perm = permutation_from_key(key.k1, n);
    d.geometry.resize(n);
    d.negpos.resize(n);
    d.shuffle.resize(n);
    KeyStream ks2(key.k2), ks3(key.k3), ks4(key.k4);
    for (std::size_t i = 0; i < n; ++i) {
        d.geometry[i] = static_cast<std::uint8_t>(ks2.next_below(8));
        d.negpos[i] = static_cast<std::uint8_t>(ks3.next_below(2));
        d.shuffle[i] = static_cast<std::uint8_t>(ks4.next_below(6));
    }
    return d;
}

inline void negate_samples(std::vector<std::uint8_t>& block) {
    for (auto& p : block)
        p = static_cast<std::uint8_t>(p ^ 0xFF);
}

inline void shuffle_channels(std::vector<std::uint8_t>& block, int code, bool inverse) {
    const auto& map = kShuffle[static_cast<std::size_t>(code)];
    std::uint8_t tmp[3];
    for (std::size_t i = 0; i < block.size(); i += 3) {
        tmp[0] = block[i];
        tmp[1] = block[i + 1];
        tmp[2] = block[i + 2];
        for (int slot = 0; slot < 3; ++slot) {
            if (inverse)
                block[i + map[slot]] = tmp[slot];
            else
                block[i + slot] = tmp[map[slot]];
        }
    }
}

}  // namespace detail

inline RasterImage encrypt(const RasterImage& img, const EtcKey& key, int block_w = 16,
                           int block_h = 16, const CipherSteps& steps = {}) {
    const auto layout = detail::cipher_layout(img, block_w, block_h);
    const auto draws = detail::make_draws(key, layout.n);
    RasterImage out(img.width, img.height);
    std::vector<std::uint8_t> block;
    for (std::size_t dst = 0; dst < layout.n; ++dst) {
        const std::size_t src = steps.permute ? draws.perm[dst] : dst;
        detail::read_block(img, layout, src, block);
        if (steps.geometry)
            transform_block_geometry(block, layout.block, layout.block, draws.geometry[dst]);
        if (steps.negative_positive && draws.negpos[dst])
            detail::negate_samples(block);
        if (steps.color_shuffle)
            detail::shuffle_channels(block, draws.shuffle[dst], false);
        detail::write_block(out, layout, dst, block);
    }
    return out;
}

inline RasterImage decrypt(const RasterImage& img, const EtcKey& key, int block_w = 16,
                           int block_h = 16, const CipherSteps& steps = {}) {
    const auto layout = detail::cipher_layout(img, block_w, block_h);
    const auto draws = detail::make_draws(key, layout.n);
    RasterImage out(img.width, img.height);
    std::vector<std::uint8_t> block;
    for (std::size_t dst = 0; dst < layout.n; ++dst) {
        detail::read_block(img, layout, dst, block);
        if (steps.color_shuffle)
            detail::shuffle_channels(block, draws.shuffle[dst], true);
        if (steps.negative_positive && draws.negpos[dst])
            detail::negate_samples(block);  // involution
        if (steps.geometry)
            transform_block_geometry(block, layout.block, layout.block, draws.geometry[dst], true);
        const std::size_t src = steps.permute ? draws.perm[dst] : dst;
        detail::write_block(out, layout, src, block);
    }
    return out;
}

}  // namespace etcjpeg

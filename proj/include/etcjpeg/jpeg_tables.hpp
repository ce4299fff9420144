// jpeg_tables.hpp - zigzag order, Annex K quantization and Huffman tables,
// IJG quality scaling and quality factor estimation.
#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace etcjpeg {

// kZigzagToNatural[k] = natural (row-major) index of the k-th zigzag entry.
inline constexpr std::array<int, 64> kZigzagToNatural = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
};

// ITU-T T.81 Annex K base quantization tables, natural order.
inline constexpr std::array<std::uint16_t, 64> kBaseLumaQuant = {
    16, 11, 10, 16, 24,  40,  51,  61,
    12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,
    14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,
    24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
};

inline constexpr std::array<std::uint16_t, 64> kBaseChromaQuant = {
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
};

enum class TableClass { Luma, Chroma };

inline const std::array<std::uint16_t, 64>& base_quant_table(TableClass cls) {
    return cls == TableClass::Luma ? kBaseLumaQuant : kBaseChromaQuant;
}

// IJG scaling: scale = 5000/Qf below 50, else 200 - 2*Qf; each entry is
// floor((base*scale + 50)/100) clamped to [1, 255]. Integer arithmetic only.
inline std::array<std::uint16_t, 64> quality_to_table(
    const std::array<std::uint16_t, 64>& base, int quality) {
    if (quality < 1 || quality > 100)
        throw std::invalid_argument("quality_to_table: quality must be in [1, 100]");
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    std::array<std::uint16_t, 64> out{};
    for (int i = 0; i < 64; ++i) {
        int v = (base[i] * scale + 50) / 100;
        v = v < 1 ? 1 : (v > 255 ? 255 : v);
        out[i] = static_cast<std::uint16_t>(v);
    }
    return out;
}

// Quantization table as carried in a bitstream: zigzag entry order.
struct QuantTable {
    std::array<std::uint16_t, 64> zigzag{};
    TableClass cls = TableClass::Luma;

    bool operator==(const QuantTable&) const = default;

    std::uint16_t natural(int natural_index) const {
        for (int k = 0; k < 64; ++k)
            if (kZigzagToNatural[k] == natural_index)
                return zigzag[k];
        throw std::invalid_argument("natural index out of range");
    }
};

inline QuantTable make_quant_table(TableClass cls, int quality) {
    const auto scaled = quality_to_table(base_quant_table(cls), quality);
    QuantTable t;
    t.cls = cls;
    for (int k = 0; k < 64; ++k)
        t.zigzag[k] = scaled[kZigzagToNatural[k]];
    return t;
}

// Nearest quality factor under the IJG scaling of this table's Annex K base:
// argmin over Qf in [1, 100] of the L1 table distance, ties broken toward
// the larger Qf. Exact for tables our encoder produced at Qf >= 50; low-Qf
// tables can collide after clamping.
inline int estimate_quality(const QuantTable& table) {
    const auto& base = base_quant_table(table.cls);
    long best = -1;
    int best_q = 1;
    for (int q = 1; q <= 100; ++q) {
        const auto cand = quality_to_table(base, q);
        long dist = 0;
        for (int k = 0; k < 64; ++k)
            dist += std::abs(static_cast<long>(cand[kZigzagToNatural[k]]) - table.zigzag[k]);
        if (best < 0 || dist <= best) {
            best = dist;
            best_q = q;
        }
    }
    return best_q;
}

// Annex K "typical" Huffman tables: code counts per bit length (1..16)
// followed by the symbol values in code order.
struct HuffmanSpec {
    std::array<std::uint8_t, 16> counts;
    std::vector<std::uint8_t> symbols;
};

inline const HuffmanSpec& dc_luma_huffman() {
    static const HuffmanSpec spec{
        {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0},
        {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
    return spec;
}

inline const HuffmanSpec& dc_chroma_huffman() {
    static const HuffmanSpec spec{
        {0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0},
        {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
    return spec;
}

inline const HuffmanSpec& ac_luma_huffman() {
    static const HuffmanSpec spec{
        {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 125},
        {0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06,
         0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08,
         0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0, 0x24, 0x33, 0x62, 0x72,
         0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
         0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45,
         0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
         0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75,
         0x76, 0x77, 0x78, 0x79, 0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
         0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3,
         0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6,
         0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9,
         0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
         0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4,
         0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA}};
    return spec;
}

inline const HuffmanSpec& ac_chroma_huffman() {
    static const HuffmanSpec spec{
        {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 119},
        {0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41,
         0x51, 0x07, 0x61, 0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91,
         0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0, 0x15, 0x62, 0x72, 0xD1,
         0x0A, 0x16, 0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17, 0x18, 0x19, 0x1A, 0x26,
         0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44,
         0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
         0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74,
         0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
         0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A,
         0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4,
         0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7,
         0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA,
         0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF2, 0xF3, 0xF4,
         0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA}};
    return spec;
}

}  // namespace etcjpeg

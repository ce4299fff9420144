// jpeg.hpp - baseline sequential JFIF codec and DCT-domain transcoder.
//
// Layers:
//   encode(img)   = forward transform to quantized coefficients + serialize
//   decode(bytes) = parse + pixel reconstruction
//   parse(bytes)  -> CodedImage (coefficients + tables, no pixel work)
//   serialize / requantize / strip_metadata operate on CodedImage or raw bytes
//
// Supported: 8-bit baseline sequential Huffman, 3 components, 4:4:4 or 4:2:0,
// restart markers tolerated. Everything else is rejected explicitly.
#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "etcjpeg/errors.hpp"
#include "etcjpeg/image.hpp"
#include "etcjpeg/jpeg_dsp.hpp"
#include "etcjpeg/jpeg_tables.hpp"

namespace etcjpeg {

// Quantized DCT coefficients of one component. Blocks are stored row-major,
// 64 entries per block in zigzag order, DC held non-differentially
// (differencing happens only at entropy-coding time).
struct ComponentPlane {
    int width_blocks = 0;
    int height_blocks = 0;
    std::vector<std::int16_t> coef;  // 64 * width_blocks * height_blocks

    std::int16_t* block(int bx, int by) {
        return coef.data() + (static_cast<std::size_t>(by) * width_blocks + bx) * 64;
    }
    const std::int16_t* block(int bx, int by) const {
        return coef.data() + (static_cast<std::size_t>(by) * width_blocks + bx) * 64;
    }

    bool operator==(const ComponentPlane&) const = default;
};

// Parsed JPEG held in the DCT domain. serialize() re-encodes it with the
// Annex K Huffman tables; the quantization tables travel with the image.
struct CodedImage {
    int width = 0;
    int height = 0;
    Subsampling mode = Subsampling::S444;
    QuantTable luma_q;
    QuantTable chroma_q;
    std::array<ComponentPlane, 3> comp;  // Y, Cb, Cr
    int restart_interval = 0;

    bool operator==(const CodedImage&) const = default;
};

namespace jpegdetail {

// ---- marker constants ------------------------------------------------------

inline constexpr std::uint8_t kSOI = 0xD8;
inline constexpr std::uint8_t kEOI = 0xD9;
inline constexpr std::uint8_t kSOS = 0xDA;
inline constexpr std::uint8_t kDQT = 0xDB;
inline constexpr std::uint8_t kDHT = 0xC4;
inline constexpr std::uint8_t kDRI = 0xDD;
inline constexpr std::uint8_t kSOF0 = 0xC0;
inline constexpr std::uint8_t kAPP0 = 0xE0;
inline constexpr std::uint8_t kCOM = 0xFE;
inline constexpr std::uint8_t kRST0 = 0xD0;

inline bool is_app_marker(std::uint8_t m) { return m >= 0xE0 && m <= 0xEF; }
inline bool is_rst_marker(std::uint8_t m) { return m >= 0xD0 && m <= 0xD7; }
inline bool is_sof_marker(std::uint8_t m) {
    return (m >= 0xC0 && m <= 0xCF) && m != kDHT && m != 0xC8 && m != 0xCC;
}

// ---- byte-level reader / writer --------------------------------------------

class ByteReader {
public:
    explicit ByteReader(const std::vector<std::uint8_t>& data) : data_(data) {}

    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }
    std::size_t size() const { return data_.size(); }
    bool eof() const { return pos_ >= data_.size(); }

    std::uint8_t u8() {
        if (pos_ >= data_.size())
            throw FormatError("jpeg: unexpected end of file", pos_);
        return data_[pos_++];
    }

    std::uint16_t u16() {
        const std::uint16_t hi = u8();
        return static_cast<std::uint16_t>((hi << 8) | u8());
    }

    void skip(std::size_t n) {
        if (data_.size() - pos_ < n)
            throw FormatError("jpeg: segment extends past end of file", data_.size());
        pos_ += n;
    }

    // Next marker code, tolerating 0xFF fill bytes.
    std::uint8_t marker() {
        const std::size_t at = pos_;
        if (u8() != 0xFF)
            throw FormatError("jpeg: expected marker", at);
        std::uint8_t m = u8();
        while (m == 0xFF)
            m = u8();
        return m;
    }

    const std::vector<std::uint8_t>& bytes() const { return data_; }

private:
    const std::vector<std::uint8_t>& data_;
    std::size_t pos_ = 0;
};

class ByteWriter {
public:
    std::vector<std::uint8_t>& out() { return data_; }

    void u8(std::uint8_t v) { data_.push_back(v); }
    void u16(std::uint16_t v) {
        data_.push_back(static_cast<std::uint8_t>(v >> 8));
        data_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
    void marker(std::uint8_t m) {
        data_.push_back(0xFF);
        data_.push_back(m);
    }

private:
    std::vector<std::uint8_t> data_;
};

// ---- Huffman coding ---------------------------------------------------------

struct HuffEncTable {
    std::array<std::uint16_t, 256> code{};
    std::array<std::uint8_t, 256> size{};  // 0 = symbol absent
};

inline HuffEncTable build_enc_table(const HuffmanSpec& spec) {
    HuffEncTable t;
    std::uint16_t code = 0;
    std::size_t k = 0;
    for (int len = 1; len <= 16; ++len) {
        for (int i = 0; i < spec.counts[len - 1]; ++i) {
            const std::uint8_t sym = spec.symbols[k++];
            t.code[sym] = code++;
            t.size[sym] = static_cast<std::uint8_t>(len);
        }
        code = static_cast<std::uint16_t>(code << 1);
    }
    return t;
}

// Canonical decode tables per T.81 F.2.2.3.
struct HuffDecTable {
    std::array<std::int32_t, 17> mincode{};
    std::array<std::int32_t, 17> maxcode{};  // -1 when no codes of that length
    std::array<int, 17> valptr{};
    std::vector<std::uint8_t> symbols;
    bool present = false;
};

inline HuffDecTable build_dec_table(const std::array<std::uint8_t, 16>& counts,
                                    std::vector<std::uint8_t> symbols) {
    HuffDecTable t;
    t.symbols = std::move(symbols);
    t.present = true;
    std::int32_t code = 0;
    int k = 0;
    for (int len = 1; len <= 16; ++len) {
        if (counts[len - 1] == 0) {
            t.maxcode[len] = -1;
        } else {
            t.valptr[len] = k;
            t.mincode[len] = code;
            code += counts[len - 1];
            k += counts[len - 1];
            t.maxcode[len] = code - 1;
        }
        code <<= 1;
    }
    return t;
}

// ---- entropy-coded data I/O --------------------------------------------------

class BitWriter {
public:
    explicit BitWriter(ByteWriter& out) : out_(out) {}

    void put(std::uint32_t bits, int count) {
        acc_ = (acc_ << count) | (bits & ((1u << count) - 1));
        count_ += count;
        while (count_ >= 8) {
            const std::uint8_t byte = static_cast<std::uint8_t>((acc_ >> (count_ - 8)) & 0xFF);
            out_.u8(byte);
            if (byte == 0xFF)
                out_.u8(0x00);  // byte stuffing
            count_ -= 8;
        }
    }

    // Pads the final partial byte with 1-bits.
    void flush() {
        if (count_ > 0)
            put(0x7F, 8 - count_);
    }

private:
    ByteWriter& out_;
    std::uint64_t acc_ = 0;
    int count_ = 0;
};

class BitReader {
public:
    BitReader(ByteReader& in, const std::size_t& mcu) : in_(in), mcu_(mcu) {}

    int bit() {
        if (count_ == 0) {
            if (in_.eof())
                throw DecodeError("jpeg: entropy data ended early", mcu_);
            const std::uint8_t b = in_.u8();
            if (b == 0xFF) {
                const std::uint8_t next = in_.eof() ? 0xD9 : in_.u8();
                if (next != 0x00) {
                    // a real marker inside coefficient data
                    throw DecodeError("jpeg: marker interrupted entropy data", mcu_);
                }
            }
            acc_ = b;
            count_ = 8;
        }
        --count_;
        return (acc_ >> count_) & 1;
    }

    std::int32_t bits(int n) {
        std::int32_t v = 0;
        for (int i = 0; i < n; ++i)
            v = (v << 1) | bit();
        return v;
    }

    // Drops buffered bits and consumes the expected restart marker.
    void restart(int index) {
        count_ = 0;
        const std::size_t at = in_.pos();
        if (in_.u8() != 0xFF || in_.u8() != kRST0 + index)
            throw FormatError("jpeg: expected restart marker RST" + std::to_string(index), at);
    }

    int decode(const HuffDecTable& t) {
        std::int32_t code = bit();
        int len = 1;
        while (code > t.maxcode[len]) {
            code = (code << 1) | bit();
            if (++len > 16)
                throw DecodeError("jpeg: invalid huffman code", mcu_);
        }
        return t.symbols[static_cast<std::size_t>(t.valptr[len] + code - t.mincode[len])];
    }

private:
    ByteReader& in_;
    const std::size_t& mcu_;
    std::uint8_t acc_ = 0;
    int count_ = 0;
};

// Signed value reconstruction for an s-bit magnitude field (T.81 F.12).
inline int extend_value(std::int32_t v, int s) {
    return v < (1 << (s - 1)) ? v - (1 << s) + 1 : v;
}

inline int bit_size(int v) {
    int a = std::abs(v);
    int n = 0;
    while (a) {
        ++n;
        a >>= 1;
    }
    return n;
}

// ---- per-frame geometry -------------------------------------------------------

struct ScanComponent {
    int h = 1, v = 1;  // sampling factors
    const HuffEncTable* dc_enc = nullptr;
    const HuffEncTable* ac_enc = nullptr;
    const HuffDecTable* dc_dec = nullptr;
    const HuffDecTable* ac_dec = nullptr;
};

inline int mcu_span(Subsampling mode) { return mode == Subsampling::S420 ? 16 : 8; }

inline void component_geometry(const CodedImage& img, int ci, int& h, int& v) {
    const bool is420 = img.mode == Subsampling::S420;
    h = (ci == 0 && is420) ? 2 : 1;
    v = h;
}

inline int mcu_cols(const CodedImage& img) {
    return (img.width + mcu_span(img.mode) - 1) / mcu_span(img.mode);
}
inline int mcu_rows(const CodedImage& img) {
    return (img.height + mcu_span(img.mode) - 1) / mcu_span(img.mode);
}

inline void encode_block(BitWriter& bw, const std::int16_t* zz, int& pred,
                         const HuffEncTable& dc, const HuffEncTable& ac) {
    const auto put_code = [&](const HuffEncTable& t, int sym) {
        if (t.size[sym] == 0)
            throw std::runtime_error("jpeg: value outside entropy-codable range");
        bw.put(t.code[sym], t.size[sym]);
    };
    const int diff = zz[0] - pred;
    pred = zz[0];
    const int ds = bit_size(diff);
    put_code(dc, ds);
    if (ds > 0)
        bw.put(static_cast<std::uint32_t>(diff >= 0 ? diff : diff + (1 << ds) - 1), ds);
    int run = 0;
    for (int k = 1; k < 64; ++k) {
        if (zz[k] == 0) {
            ++run;
            continue;
        }
        while (run >= 16) {
            put_code(ac, 0xF0);  // ZRL
            run -= 16;
        }
        const int v = zz[k];
        const int s = bit_size(v);
        put_code(ac, (run << 4) | s);
        bw.put(static_cast<std::uint32_t>(v >= 0 ? v : v + (1 << s) - 1), s);
        run = 0;
    }
    if (run > 0)
        put_code(ac, 0x00);  // EOB
}

inline void decode_block(BitReader& br, std::int16_t* zz, int& pred,
                         const HuffDecTable& dc, const HuffDecTable& ac,
                         const std::size_t& mcu) {
    const int ds = br.decode(dc);
    if (ds > 11)
        throw DecodeError("jpeg: DC magnitude category out of range", mcu);
    const int diff = ds ? extend_value(br.bits(ds), ds) : 0;
    pred += diff;
    zz[0] = static_cast<std::int16_t>(pred);
    int k = 1;
    while (k < 64) {
        const int rs = br.decode(ac);
        const int run = rs >> 4;
        const int s = rs & 0x0F;
        if (s == 0) {
            if (run == 15) {
                k += 16;
                continue;
            }
            break;  // EOB
        }
        if (s > 10)
            throw DecodeError("jpeg: AC magnitude category out of range", mcu);
        k += run;
        if (k > 63)
            throw DecodeError("jpeg: zero run exceeds block", mcu);
        zz[k] = static_cast<std::int16_t>(extend_value(br.bits(s), s));
        ++k;
    }
}

}  // namespace jpegdetail

// ---- serialize -----------------------------------------------------------------

// Emits a baseline JFIF bitstream: SOI, APP0, two DQTs, SOF0, the four
// Annex K DHTs, optional DRI, SOS, entropy-coded MCUs, EOI.
inline std::vector<std::uint8_t> serialize(const CodedImage& img) {
    using namespace jpegdetail;
    ByteWriter w;
    w.marker(kSOI);

    w.marker(kAPP0);
    w.u16(16);
    const char jfif[5] = {'J', 'F', 'I', 'F', '\0'};
    for (char c : jfif) w.u8(static_cast<std::uint8_t>(c));
    w.u8(1); w.u8(1);      // version 1.01
    w.u8(0);               // aspect-ratio units
    w.u16(1); w.u16(1);    // density
    w.u8(0); w.u8(0);      // no thumbnail

    for (int t = 0; t < 2; ++t) {
        const QuantTable& q = t == 0 ? img.luma_q : img.chroma_q;
        w.marker(kDQT);
        w.u16(2 + 1 + 64);
        w.u8(static_cast<std::uint8_t>(t));  // 8-bit precision, table id t
        for (int k = 0; k < 64; ++k)
            w.u8(static_cast<std::uint8_t>(q.zigzag[k]));
    }

    w.marker(kSOF0);
    w.u16(8 + 3 * 3);
    w.u8(8);  // sample precision
    w.u16(static_cast<std::uint16_t>(img.height));
    w.u16(static_cast<std::uint16_t>(img.width));
    w.u8(3);
    const std::uint8_t luma_sampling = img.mode == Subsampling::S420 ? 0x22 : 0x11;
    w.u8(1); w.u8(luma_sampling); w.u8(0);
    w.u8(2); w.u8(0x11); w.u8(1);
    w.u8(3); w.u8(0x11); w.u8(1);

    const struct {
        std::uint8_t id;
        const HuffmanSpec& spec;
    } huffs[4] = {{0x00, dc_luma_huffman()},
                  {0x10, ac_luma_huffman()},
                  {0x01, dc_chroma_huffman()},
                  {0x11, ac_chroma_huffman()}};
    for (const auto& h : huffs) {
        w.marker(kDHT);
        w.u16(static_cast<std::uint16_t>(2 + 1 + 16 + h.spec.symbols.size()));
        w.u8(h.id);
        for (auto c : h.spec.counts) w.u8(c);
        for (auto s : h.spec.symbols) w.u8(s);
    }

    if (img.restart_interval > 0) {
        w.marker(kDRI);
        w.u16(4);
        w.u16(static_cast<std::uint16_t>(img.restart_interval));
    }

    w.marker(kSOS);
    w.u16(6 + 2 * 3);
    w.u8(3);
    w.u8(1); w.u8(0x00);
    w.u8(2); w.u8(0x11);
    w.u8(3); w.u8(0x11);
    w.u8(0); w.u8(63); w.u8(0);  // full spectral selection, no approximation

    const HuffEncTable dc_l = build_enc_table(dc_luma_huffman());
    const HuffEncTable ac_l = build_enc_table(ac_luma_huffman());
    const HuffEncTable dc_c = build_enc_table(dc_chroma_huffman());
    const HuffEncTable ac_c = build_enc_table(ac_chroma_huffman());

    BitWriter bw(w);
    int pred[3] = {0, 0, 0};
    const int cols = mcu_cols(img);
    const int rows = mcu_rows(img);
    int since_restart = 0;
    int restart_index = 0;
    for (int my = 0; my < rows; ++my) {
        for (int mx = 0; mx < cols; ++mx) {
            if (img.restart_interval > 0 && since_restart == img.restart_interval) {
                bw.flush();
                w.marker(static_cast<std::uint8_t>(kRST0 + restart_index));
                restart_index = (restart_index + 1) % 8;
                since_restart = 0;
                pred[0] = pred[1] = pred[2] = 0;
            }
            for (int ci = 0; ci < 3; ++ci) {
                int h, v;
                component_geometry(img, ci, h, v);
                const auto& dc = ci == 0 ? dc_l : dc_c;
                const auto& ac = ci == 0 ? ac_l : ac_c;
                for (int by = 0; by < v; ++by)
                    for (int bx = 0; bx < h; ++bx)
                        encode_block(bw, img.comp[ci].block(h * mx + bx, v * my + by),
                                     pred[ci], dc, ac);
            }
            ++since_restart;
        }
    }
    bw.flush();
    w.marker(kEOI);
    return std::move(w.out());
}

// ---- parse ----------------------------------------------------------------------

namespace jpegdetail {

struct FrameComponent {
    int id = 0;
    int h = 1, v = 1;
    int quant_id = 0;
    int dc_id = 0, ac_id = 0;
};

}  // namespace jpegdetail

// Entropy-decodes a baseline JPEG into coefficients and tables without any
// pixel-domain reconstruction.
inline CodedImage parse(const std::vector<std::uint8_t>& data) {
    using namespace jpegdetail;
    ByteReader r(data);
    if (r.u8() != 0xFF || r.u8() != kSOI)
        throw FormatError("jpeg: expected SOI", 0);

    std::array<std::array<std::uint8_t, 64>, 4> quant{};
    std::array<bool, 4> quant_seen{};
    std::array<std::array<HuffDecTable, 4>, 2> huff;  // [class][id]
    std::array<FrameComponent, 3> fc;
    bool have_frame = false;
    bool have_scan = false;
    CodedImage img;

    for (;;) {
        const std::size_t marker_at = r.pos();
        const std::uint8_t m = r.marker();

        if (m == kEOI) {
            if (!have_scan)
                throw FormatError("jpeg: EOI before any scan", marker_at);
            break;
        }

        if (is_app_marker(m) || m == kCOM) {
            const std::uint16_t len = r.u16();
            if (len < 2)
                throw FormatError("jpeg: bad segment length", marker_at);
            r.skip(static_cast<std::size_t>(len) - 2);
            continue;
        }

        if (m == kDQT) {
            const std::uint16_t len = r.u16();
            std::size_t remaining = len - 2;
            while (remaining > 0) {
                const std::uint8_t pqtq = r.u8();
                if ((pqtq >> 4) != 0)
                    throw UnsupportedFormat("jpeg: 16-bit quantization tables not supported",
                                            r.pos() - 1);
                const int id = pqtq & 0x0F;
                if (id > 3)
                    throw FormatError("jpeg: quantization table id out of range", r.pos() - 1);
                for (int k = 0; k < 64; ++k) {
                    const std::uint8_t qv = r.u8();
                    if (qv == 0)
                        throw FormatError("jpeg: zero quantization step", r.pos() - 1);
                    quant[id][k] = qv;
                }
                quant_seen[id] = true;
                remaining -= 65;
            }
            continue;
        }

        if (m == kDHT) {
            const std::uint16_t len = r.u16();
            std::size_t remaining = len - 2;
            while (remaining > 0) {
                const std::uint8_t tcth = r.u8();
                const int tc = tcth >> 4;
                const int th = tcth & 0x0F;
                if (tc > 1 || th > 3)
                    throw FormatError("jpeg: huffman table id out of range", r.pos() - 1);
                std::array<std::uint8_t, 16> counts{};
                std::size_t total = 0;
                for (auto& c : counts) {
                    c = r.u8();
                    total += c;
                }
                std::vector<std::uint8_t> symbols(total);
                for (auto& s : symbols)
                    s = r.u8();
                huff[tc][th] = build_dec_table(counts, std::move(symbols));
                remaining -= 1 + 16 + total;
            }
            continue;
        }

        if (m == kDRI) {
            if (r.u16() != 4)
                throw FormatError("jpeg: bad DRI length", marker_at);
            img.restart_interval = r.u16();
            continue;
        }

        if (is_sof_marker(m) && m != kSOF0)
            throw UnsupportedFormat("jpeg: only baseline sequential (SOF0) is supported",
                                    marker_at);

        if (m == kSOF0) {
            if (have_frame)
                throw FormatError("jpeg: multiple frames", marker_at);
            r.u16();  // length
            if (r.u8() != 8)
                throw UnsupportedFormat("jpeg: only 8-bit precision is supported", r.pos() - 1);
            img.height = r.u16();
            img.width = r.u16();
            if (img.width < 1 || img.height < 1)
                throw FormatError("jpeg: zero frame dimensions", marker_at);
            if (r.u8() != 3)
                throw UnsupportedFormat("jpeg: only 3-component images are supported",
                                        r.pos() - 1);
            for (auto& c : fc) {
                c.id = r.u8();
                const std::uint8_t hv = r.u8();
                c.h = hv >> 4;
                c.v = hv & 0x0F;
                c.quant_id = r.u8();
            }
            const bool s444 = fc[0].h == 1 && fc[0].v == 1;
            const bool s420 = fc[0].h == 2 && fc[0].v == 2;
            if (!((s444 || s420) && fc[1].h == 1 && fc[1].v == 1 && fc[2].h == 1 && fc[2].v == 1))
                throw UnsupportedFormat("jpeg: only 4:4:4 and 4:2:0 sub-sampling are supported",
                                        marker_at);
            img.mode = s420 ? Subsampling::S420 : Subsampling::S444;
            have_frame = true;
            continue;
        }

        if (m == kSOS) {
            if (!have_frame)
                throw FormatError("jpeg: SOS before SOF", marker_at);
            if (have_scan)
                throw UnsupportedFormat("jpeg: multiple scans are not supported", marker_at);
            r.u16();  // length
            if (r.u8() != 3)
                throw UnsupportedFormat("jpeg: scan must cover all 3 components", r.pos() - 1);
            for (int i = 0; i < 3; ++i) {
                const int id = r.u8();
                const std::uint8_t tdta = r.u8();
                bool found = false;
                for (auto& c : fc) {
                    if (c.id == id) {
                        c.dc_id = tdta >> 4;
                        c.ac_id = tdta & 0x0F;
                        found = true;
                    }
                }
                if (!found)
                    throw FormatError("jpeg: scan references unknown component", r.pos() - 2);
            }
            if (r.u8() != 0 || r.u8() != 63 || r.u8() != 0)
                throw UnsupportedFormat("jpeg: spectral selection is not baseline", r.pos() - 3);

            // quantization tables
            if (!quant_seen[fc[0].quant_id] || !quant_seen[fc[1].quant_id] ||
                !quant_seen[fc[2].quant_id])
                throw FormatError("jpeg: scan references missing quantization table", marker_at);
            if (fc[1].quant_id != fc[2].quant_id)
                throw UnsupportedFormat("jpeg: Cb and Cr must share a quantization table",
                                        marker_at);
            img.luma_q.cls = TableClass::Luma;
            img.chroma_q.cls = TableClass::Chroma;
            for (int k = 0; k < 64; ++k) {
                img.luma_q.zigzag[k] = quant[fc[0].quant_id][k];
                img.chroma_q.zigzag[k] = quant[fc[1].quant_id][k];
            }

            // coefficient planes
            const int span = mcu_span(img.mode);
            const int cols = (img.width + span - 1) / span;
            const int rows = (img.height + span - 1) / span;
            for (int ci = 0; ci < 3; ++ci) {
                img.comp[ci].width_blocks = cols * fc[ci].h;
                img.comp[ci].height_blocks = rows * fc[ci].v;
                img.comp[ci].coef.assign(
                    static_cast<std::size_t>(img.comp[ci].width_blocks) *
                        img.comp[ci].height_blocks * 64,
                    0);
            }

            std::size_t mcu = 0;
            BitReader br(r, mcu);
            int pred[3] = {0, 0, 0};
            int since_restart = 0;
            int restart_index = 0;
            const std::size_t mcu_total = static_cast<std::size_t>(cols) * rows;
            for (mcu = 0; mcu < mcu_total; ++mcu) {
                if (img.restart_interval > 0 && since_restart == img.restart_interval) {
                    br.restart(restart_index);
                    restart_index = (restart_index + 1) % 8;
                    since_restart = 0;
                    pred[0] = pred[1] = pred[2] = 0;
                }
                const int mx = static_cast<int>(mcu % cols);
                const int my = static_cast<int>(mcu / cols);
                for (int ci = 0; ci < 3; ++ci) {
                    const auto& dc = huff[0][fc[ci].dc_id];
                    const auto& ac = huff[1][fc[ci].ac_id];
                    if (!dc.present || !ac.present)
                        throw FormatError("jpeg: scan references missing huffman table",
                                          marker_at);
                    for (int by = 0; by < fc[ci].v; ++by)
                        for (int bx = 0; bx < fc[ci].h; ++bx)
                            decode_block(br,
                                         img.comp[ci].block(fc[ci].h * mx + bx,
                                                            fc[ci].v * my + by),
                                         pred[ci], dc, ac, mcu);
                }
                ++since_restart;
            }
            have_scan = true;
            continue;
        }

        {
            char name[8];
            std::snprintf(name, sizeof name, "0xFF%02X", m);
            throw FormatError(std::string("jpeg: unexpected marker ") + name, marker_at);
        }
    }

    return img;
}

// ---- pixel-domain encode / decode ------------------------------------------------

namespace jpegdetail {

inline std::int16_t quantize_coef(double coef, int step, int max_mag) {
    long v = std::lround(coef / step);
    if (v > max_mag) v = max_mag;
    if (v < -max_mag) v = -max_mag;
    return static_cast<std::int16_t>(v);
}

inline ComponentPlane forward_component(const Plane& plane, const QuantTable& q) {
    ComponentPlane out;
    out.width_blocks = plane.width / 8;
    out.height_blocks = plane.height / 8;
    out.coef.assign(static_cast<std::size_t>(out.width_blocks) * out.height_blocks * 64, 0);
    std::array<double, 64> samples{}, coefs{};
    for (int by = 0; by < out.height_blocks; ++by) {
        for (int bx = 0; bx < out.width_blocks; ++bx) {
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x)
                    samples[static_cast<std::size_t>(y) * 8 + x] =
                        plane.at(bx * 8 + x, by * 8 + y) - 128.0;
            fdct8x8(samples, coefs);
            std::int16_t* zz = out.block(bx, by);
            for (int k = 0; k < 64; ++k) {
                // DC magnitudes stay within category 11; clamping AC at 1023
                // keeps every block codable with the Annex K tables.
                const int max_mag = k == 0 ? 2047 : 1023;
                zz[k] = quantize_coef(coefs[static_cast<std::size_t>(kZigzagToNatural[k])],
                                      q.zigzag[k], max_mag);
            }
        }
    }
    return out;
}

inline Plane inverse_component(const ComponentPlane& cp, const QuantTable& q) {
    Plane plane(cp.width_blocks * 8, cp.height_blocks * 8);
    std::array<double, 64> coefs{}, samples{};
    for (int by = 0; by < cp.height_blocks; ++by) {
        for (int bx = 0; bx < cp.width_blocks; ++bx) {
            const std::int16_t* zz = cp.block(bx, by);
            coefs.fill(0.0);
            for (int k = 0; k < 64; ++k)
                coefs[static_cast<std::size_t>(kZigzagToNatural[k])] =
                    static_cast<double>(zz[k]) * q.zigzag[k];
            idct8x8(coefs, samples);
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x)
                    plane.at(bx * 8 + x, by * 8 + y) =
                        detail::round_clamp_u8(samples[static_cast<std::size_t>(y) * 8 + x] + 128.0);
        }
    }
    return plane;
}

inline Plane crop_plane(const Plane& p, int w, int h) {
    if (p.width == w && p.height == h)
        return p;
    Plane out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) = p.at(x, y);
    return out;
}

}  // namespace jpegdetail

// Forward path up to (but not including) entropy coding.
inline CodedImage encode_to_coefficients(const RasterImage& img, int quality,
                                         Subsampling mode) {
    CodedImage out;
    out.width = img.width;
    out.height = img.height;
    out.mode = mode;
    out.luma_q = make_quant_table(TableClass::Luma, quality);
    out.chroma_q = make_quant_table(TableClass::Chroma, quality);

    const int span = jpegdetail::mcu_span(mode);
    auto planes = rgb_to_ycbcr(img);
    const Plane y = pad_plane_to_multiple(planes[0], span, span);
    const Plane cb = subsample_chroma(pad_plane_to_multiple(planes[1], span, span), mode);
    const Plane cr = subsample_chroma(pad_plane_to_multiple(planes[2], span, span), mode);

    out.comp[0] = jpegdetail::forward_component(y, out.luma_q);
    out.comp[1] = jpegdetail::forward_component(cb, out.chroma_q);
    out.comp[2] = jpegdetail::forward_component(cr, out.chroma_q);
    return out;
}

inline std::vector<std::uint8_t> encode(const RasterImage& img, int quality,
                                        Subsampling mode) {
    return serialize(encode_to_coefficients(img, quality, mode));
}

// Full reconstruction from a CodedImage: dequantize, IDCT, chroma
// upsampling, color conversion, padding crop.
inline RasterImage reconstruct(const CodedImage& img) {
    const Plane y = jpegdetail::inverse_component(img.comp[0], img.luma_q);
    Plane cb = jpegdetail::inverse_component(img.comp[1], img.chroma_q);
    Plane cr = jpegdetail::inverse_component(img.comp[2], img.chroma_q);
    if (img.mode == Subsampling::S420) {
        cb = upsample_chroma(cb, img.mode, y.width, y.height);
        cr = upsample_chroma(cr, img.mode, y.width, y.height);
    }
    return ycbcr_to_rgb(jpegdetail::crop_plane(y, img.width, img.height),
                        jpegdetail::crop_plane(cb, img.width, img.height),
                        jpegdetail::crop_plane(cr, img.width, img.height));
}

inline RasterImage decode(const std::vector<std::uint8_t>& data) {
    return reconstruct(parse(data));
}

// ---- DCT-domain requantization ---------------------------------------------------

namespace jpegdetail {

inline long round_half_away(long num, long den) {
    const long a = std::labs(num);
    const long q = (2 * a + den) / (2 * den);
    return num < 0 ? -q : q;
}

}  // namespace jpegdetail

// Rescales every coefficient from its old quantization step to the step of
// the Qf_new table: c' = round_half_away_from_zero(c * q_old / q_new). No
// pixel-domain round trip; sub-sampling mode is preserved.
inline CodedImage requantize_coefficients(const CodedImage& img, int quality_new) {
    CodedImage out = img;
    out.luma_q = make_quant_table(TableClass::Luma, quality_new);
    out.chroma_q = make_quant_table(TableClass::Chroma, quality_new);
    for (int ci = 0; ci < 3; ++ci) {
        const QuantTable& qold = ci == 0 ? img.luma_q : img.chroma_q;
        const QuantTable& qnew = ci == 0 ? out.luma_q : out.chroma_q;
        auto& coef = out.comp[ci].coef;
        const std::size_t blocks = coef.size() / 64;
        for (std::size_t b = 0; b < blocks; ++b) {
            for (int k = 0; k < 64; ++k) {
                std::int16_t& c = coef[b * 64 + static_cast<std::size_t>(k)];
                if (c == 0 || qold.zigzag[k] == qnew.zigzag[k])
                    continue;
                long v = jpegdetail::round_half_away(static_cast<long>(c) * qold.zigzag[k],
                                                     qnew.zigzag[k]);
                const long max_mag = k == 0 ? 2047 : 1023;
                if (v > max_mag) v = max_mag;
                if (v < -max_mag) v = -max_mag;
                c = static_cast<std::int16_t>(v);
            }
        }
    }
    return out;
}

inline std::vector<std::uint8_t> requantize(const CodedImage& img, int quality_new) {
    return serialize(requantize_coefficients(img, quality_new));
}

// Joint quality estimate over both quantization tables: argmin of the summed
// L1 distance against the IJG-scaled Annex K bases, ties toward larger Qf.
inline int estimate_quality(const CodedImage& img) {
    long best = -1;
    int best_q = 1;
    for (int q = 1; q <= 100; ++q) {
        const auto luma = quality_to_table(kBaseLumaQuant, q);
        const auto chroma = quality_to_table(kBaseChromaQuant, q);
        long dist = 0;
        for (int k = 0; k < 64; ++k) {
            dist += std::abs(static_cast<long>(luma[kZigzagToNatural[k]]) - img.luma_q.zigzag[k]);
            dist += std::abs(static_cast<long>(chroma[kZigzagToNatural[k]]) -
                             img.chroma_q.zigzag[k]);
        }
        if (best < 0 || dist <= best) {
            best = dist;
            best_q = q;
        }
    }
    return best_q;
}

// ---- metadata stripping --------------------------------------------------------------

// Drops every APPn (n >= 1) and COM segment, inserting a minimal JFIF APP0
// right after SOI when none is present. Entropy-coded data is copied
// byte-for-byte.
inline std::vector<std::uint8_t> strip_metadata(const std::vector<std::uint8_t>& data) {
    using namespace jpegdetail;
    ByteReader r(data);
    if (r.u8() != 0xFF || r.u8() != kSOI)
        throw FormatError("jpeg: expected SOI", 0);

    // probe for an APP0 anywhere in the header
    bool has_app0 = false;
    {
        ByteReader probe(data);
        probe.seek(2);
        for (;;) {
            const std::uint8_t m = probe.marker();
            if (m == kSOS || m == kEOI)
                break;
            if (m == kAPP0) {
                has_app0 = true;
                break;
            }
            const std::uint16_t len = probe.u16();
            if (len < 2)
                throw FormatError("jpeg: bad segment length", probe.pos() - 2);
            probe.skip(static_cast<std::size_t>(len) - 2);
        }
    }

    ByteWriter w;
    w.marker(kSOI);
    if (!has_app0) {
        w.marker(kAPP0);
        w.u16(16);
        const char jfif[5] = {'J', 'F', 'I', 'F', '\0'};
        for (char c : jfif) w.u8(static_cast<std::uint8_t>(c));
        w.u8(1); w.u8(1);
        w.u8(0);
        w.u16(1); w.u16(1);
        w.u8(0); w.u8(0);
    }

    for (;;) {
        const std::size_t marker_at = r.pos();
        const std::uint8_t m = r.marker();

        if (m == kEOI) {
            w.marker(kEOI);
            return std::move(w.out());
        }

        if ((is_app_marker(m) && m != kAPP0) || m == kCOM) {
            const std::uint16_t len = r.u16();
            if (len < 2)
                throw FormatError("jpeg: bad segment length", marker_at);
            r.skip(static_cast<std::size_t>(len) - 2);
            continue;
        }

        if (m == kSOS) {
            // copy the SOS header, then raw entropy data through to the next
            // non-RST marker
            const std::size_t len_at = r.pos();
            const std::uint16_t len = r.u16();
            if (len < 2)
                throw FormatError("jpeg: bad segment length", len_at);
            w.marker(m);
            w.u16(len);
            for (std::size_t i = 0; i < static_cast<std::size_t>(len) - 2; ++i)
                w.u8(r.u8());
            for (;;) {
                const std::uint8_t b = r.u8();
                if (b != 0xFF) {
                    w.u8(b);
                    continue;
                }
                const std::uint8_t next = r.u8();
                if (next == 0x00 || is_rst_marker(next)) {
                    w.u8(b);
                    w.u8(next);
                    continue;
                }
                r.seek(r.pos() - 2);  // real marker: hand back to the segment loop
                break;
            }
            continue;
        }

        // any other segment is copied verbatim
        const std::size_t len_at = r.pos();
        const std::uint16_t len = r.u16();
        if (len < 2)
            throw FormatError("jpeg: bad segment length", len_at);
        w.marker(m);
        w.u16(len);
        for (std::size_t i = 0; i < static_cast<std::size_t>(len) - 2; ++i)
            w.u8(r.u8());
    }
}

}  // namespace etcjpeg

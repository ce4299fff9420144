// ppm.hpp - binary PPM (P6, maxval 255) reader and canonical writer.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "etcjpeg/errors.hpp"
#include "etcjpeg/image.hpp"

namespace etcjpeg {

namespace detail {

class PpmScanner {
public:
    explicit PpmScanner(std::span<const std::uint8_t> data) : data_(data) {}

    std::size_t pos() const { return pos_; }

    std::uint8_t byte() {
        if (pos_ >= data_.size())
            throw FormatError("ppm: unexpected end of header", pos_);
        return data_[pos_++];
    }

    // Skips whitespace and '#' comments between header tokens.
    void skip_separators() {
        while (pos_ < data_.size()) {
            const std::uint8_t c = data_[pos_];
            if (c == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    int number(const char* what) {
        skip_separators();
        const std::size_t start = pos_;
        long value = 0;
        while (pos_ < data_.size() && data_[pos_] >= '0' && data_[pos_] <= '9') {
            value = value * 10 + (data_[pos_] - '0');
            if (value > 1000000)
                throw FormatError(std::string("ppm: ") + what + " out of range", start);
            ++pos_;
        }
        if (pos_ == start)
            throw FormatError(std::string("ppm: expected ") + what, pos_);
        return static_cast<int>(value);
    }

    std::span<const std::uint8_t> payload(std::size_t n) {
        if (data_.size() - pos_ < n)
            throw FormatError("ppm: truncated pixel payload", data_.size());
        return data_.subspan(pos_, n);
    }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline RasterImage load_ppm(std::span<const std::uint8_t> data) {
    detail::PpmScanner s(data);
    if (s.byte() != 'P' || s.byte() != '6')
        throw FormatError("ppm: bad magic, expected P6", 0);
    const int w = s.number("width");
    const int h = s.number("height");
    const int maxval = s.number("maxval");
    if (w < 1 || h < 1)
        throw FormatError("ppm: dimensions must be >= 1", 2);
    if (maxval != 255)
        throw FormatError("ppm: only maxval 255 is supported", s.pos());
    s.byte();  // single whitespace before payload
    const std::size_t n = static_cast<std::size_t>(w) * h * 3;
    const auto px = s.payload(n);
    return RasterImage(w, h, std::vector<std::uint8_t>(px.begin(), px.end()));
}

inline RasterImage load_ppm(const std::vector<std::uint8_t>& data) {
    return load_ppm(std::span<const std::uint8_t>(data));
}

// Canonical encoding: "P6\n<w> <h>\n255\n" followed by the raw samples.
inline std::vector<std::uint8_t> save_ppm(const RasterImage& img) {
    const std::string header = "P6\n" + std::to_string(img.width) + " " +
                               std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out;
    out.reserve(header.size() + img.pixels.size());
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

}  // namespace etcjpeg

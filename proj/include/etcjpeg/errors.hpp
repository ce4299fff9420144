// errors.hpp - error types shared by the parsers and codecs.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etcjpeg {

// Malformed input bytes. `offset` is the byte position at which parsing gave up.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Well-formed file, but a mode outside this codec (progressive, 12-bit, 4:2:2, ...).
class UnsupportedFormat : public FormatError {
public:
    using FormatError::FormatError;
};

// Entropy-coded data went bad mid-scan.
class DecodeError : public std::runtime_error {
public:
    DecodeError(const std::string& what, std::size_t mcu_index)
        : std::runtime_error(what + " (MCU " + std::to_string(mcu_index) + ")"),
          mcu_(mcu_index) {}

    std::size_t mcu_index() const noexcept { return mcu_; }

private:
    std::size_t mcu_;
};

}  // namespace etcjpeg

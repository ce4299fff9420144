// keystream.hpp - deterministic key-stream generator and the four subkeys.
#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

namespace etcjpeg {

// SplitMix64 stream. Fixed here so that key streams (and therefore every
// encrypted image) are reproducible bit-for-bit across implementations.
// Not intended to be cryptographically strong.
class KeyStream {
public:
    explicit KeyStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform draw in [0, m). Uses the top ceil(log2 m) bits of each output
    // and retries on values >= m, so the result is unbiased.
    std::uint64_t next_below(std::uint64_t m) {
        if (m <= 1)
            return 0;
        const int bits = std::bit_width(m - 1);
        for (;;) {
            const std::uint64_t v = next() >> (64 - bits);
            if (v < m)
                return v;
        }
    }

private:
    std::uint64_t state_;
};

// The four independent subkeys of the block scrambling cipher. Each seeds its
// own KeyStream: K1 block permutation, K2 rotation/inversion, K3
// negative-positive, K4 color shuffle.
struct EtcKey {
    std::uint64_t k1 = 0;
    std::uint64_t k2 = 0;
    std::uint64_t k3 = 0;
    std::uint64_t k4 = 0;

    bool operator==(const EtcKey&) const = default;

    // Expands one master value into the four subkeys: one SplitMix64 draw per
    // subkey, domain-separated by tags 1..4.
    static EtcKey from_master(std::uint64_t master) {
        const auto draw = [master](std::uint64_t tag) {
            return KeyStream(master ^ tag).next();
        };
        return EtcKey{draw(1), draw(2), draw(3), draw(4)};
    }
};

namespace detail {

inline std::uint64_t parse_hex64(const std::string& text, const std::string& what) {
    if (text.empty() || text.size() > 16)
        throw std::invalid_argument("key: " + what + " must be 1..16 hex digits");
    std::uint64_t v = 0;
    for (char c : text) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else throw std::invalid_argument("key: " + what + " has a non-hex digit");
        v = (v << 4) | static_cast<std::uint64_t>(d);
    }
    return v;
}

inline std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace detail

// Key file format: four ASCII lines "K1=<16 hex digits>" .. "K4=<...>".
inline EtcKey parse_key_file(const std::string& text) {
    std::istringstream in(text);
    std::uint64_t k[4] = {};
    bool seen[4] = {};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.size() < 4 || line[0] != 'K' || line[2] != '=' ||
            line[1] < '1' || line[1] > '4')
            throw std::invalid_argument("key file: expected lines K1=<hex> .. K4=<hex>");
        const int idx = line[1] - '1';
        if (seen[idx])
            throw std::invalid_argument("key file: duplicate subkey K" + std::to_string(idx + 1));
        k[idx] = detail::parse_hex64(line.substr(3), "K" + std::to_string(idx + 1));
        seen[idx] = true;
    }
    for (int i = 0; i < 4; ++i)
        if (!seen[i])
            throw std::invalid_argument("key file: missing subkey K" + std::to_string(i + 1));
    return EtcKey{k[0], k[1], k[2], k[3]};
}

inline std::string format_key_file(const EtcKey& key) {
    return "K1=" + detail::hex16(key.k1) + "\nK2=" + detail::hex16(key.k2) +
           "\nK3=" + detail::hex16(key.k3) + "\nK4=" + detail::hex16(key.k4) + "\n";
}

}  // namespace etcjpeg

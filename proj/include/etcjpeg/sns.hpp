// sns.hpp - deterministic models of the five providers' image pipelines.
//
// Every pipeline is a pure function of (bytes, config): a resize stage when
// the upload exceeds the provider's limits, a recompression rule, and a
// final metadata strip. Three recompression families exist:
//   Twitter   - DCT-domain requantization (or spatial for high-quality 4:4:4)
//   Facebook  - unconditional spatial decode / re-encode at 4:2:0
//   the rest  - metadata-only (plus Tumblr's resize trigger)
#pragma once

#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "etcjpeg/image.hpp"
#include "etcjpeg/jpeg.hpp"

namespace etcjpeg {

enum class Provider { Twitter, FacebookHQ, FacebookLQ, Tumblr, GooglePlus, Flickr };

// Facebook's published behavior is a quality somewhere in [71, 85]; the
// model takes it as a fixed, configurable target.
struct FacebookPolicy {
    int target_qf = 77;
};

struct ProviderConfig {
    Provider id = Provider::Flickr;
    int max_w = 0;              // 0 = no resolution limit
    int max_h = 0;
    std::size_t max_bytes = 0;  // 0 = no byte-size limit
    int target_qf = 85;         // recompression quality where applicable
};

inline ProviderConfig provider_defaults(Provider p) {
    switch (p) {
        case Provider::Twitter:
            return {p, 4096, 4096, std::size_t{3} * 1024 * 1024, 85};
        case Provider::FacebookHQ:
            return {p, 2048, 2048, 0, 77};
        case Provider::FacebookLQ:
            return {p, 960, 960, 0, 77};
        case Provider::Tumblr:
            return {p, 1280, 1280, 0, 85};
        case Provider::GooglePlus:
        case Provider::Flickr:
            return {p, 0, 0, 0, 85};
    }
    throw std::invalid_argument("unknown provider");
}

inline const char* provider_name(Provider p) {
    switch (p) {
        case Provider::Twitter: return "twitter";
        case Provider::FacebookHQ: return "facebook-hq";
        case Provider::FacebookLQ: return "facebook-lq";
        case Provider::Tumblr: return "tumblr";
        case Provider::GooglePlus: return "googleplus";
        case Provider::Flickr: return "flickr";
    }
    return "?";
}

inline Provider provider_from_name(const std::string& name) {
    for (Provider p : {Provider::Twitter, Provider::FacebookHQ, Provider::FacebookLQ,
                       Provider::Tumblr, Provider::GooglePlus, Provider::Flickr})
        if (name == provider_name(p))
            return p;
    throw std::invalid_argument("unknown provider: " + name);
}

// Plain-text overrides, one "key=value" per line: max_w, max_h, max_bytes,
// target_qf. '#' starts a comment.
inline ProviderConfig apply_provider_config(ProviderConfig config, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("provider config: expected key=value, got: " + line);
        const std::string key = line.substr(0, eq);
        const long value = std::stol(line.substr(eq + 1));
        if (key == "max_w") config.max_w = static_cast<int>(value);
        else if (key == "max_h") config.max_h = static_cast<int>(value);
        else if (key == "max_bytes") config.max_bytes = static_cast<std::size_t>(value);
        else if (key == "target_qf") config.target_qf = static_cast<int>(value);
        else throw std::invalid_argument("provider config: unknown key: " + key);
    }
    return config;
}

// Table 2: of the recompressing providers, only Facebook's spatial 4:2:0
// round trip leaves block artifacts in the decrypted image.
inline bool block_artifact_expected(Provider p, Subsampling mode) {
    if (p != Provider::Twitter && p != Provider::FacebookHQ && p != Provider::FacebookLQ)
        throw std::invalid_argument("block_artifact_expected: provider does not recompress");
    return (p == Provider::FacebookHQ || p == Provider::FacebookLQ) &&
           mode == Subsampling::S420;
}

namespace snsdetail {

// 0 means no limit on that axis.
inline RasterImage fit_within(RasterImage img, int max_w, int max_h) {
    if (max_w <= 0 && max_h <= 0)
        return img;
    const int w = max_w > 0 ? max_w : img.width;
    const int h = max_h > 0 ? max_h : img.height;
    return resize_bilinear(img, w, h);
}

inline std::vector<std::uint8_t> facebook_recompress(const std::vector<std::uint8_t>& jpeg,
                                                     int max_w, int max_h, int target_qf) {
    if (target_qf < 71 || target_qf > 85)
        throw std::invalid_argument("facebook target_qf must be in [71, 85]");
    RasterImage img = decode(jpeg);
    img = fit_within(std::move(img), max_w, max_h);
    return strip_metadata(encode(img, target_qf, Subsampling::S420));
}

}  // namespace snsdetail

// Twitter rule: 4:2:0 at estimated Qf >= 85 is requantized to 85 in the DCT
// domain; 4:4:4 at high quality (>= 85) is decoded and re-encoded at
// 4:2:0/85; anything else passes through with only its metadata rewritten.
inline std::vector<std::uint8_t> twitter_pipeline(const std::vector<std::uint8_t>& jpeg) {
    const CodedImage coded = parse(jpeg);
    const int qf = estimate_quality(coded);
    if (coded.mode == Subsampling::S420 && qf >= 85)
        return strip_metadata(requantize(coded, 85));
    if (coded.mode == Subsampling::S444 && qf >= 85)
        return strip_metadata(encode(reconstruct(coded), 85, Subsampling::S420));
    return strip_metadata(jpeg);
}

// Facebook rule: always decode to pixels (resizing first when over the
// mode's limit) and re-encode at 4:2:0 with the policy quality.
inline std::vector<std::uint8_t> facebook_pipeline(const std::vector<std::uint8_t>& jpeg,
                                                   bool hq, FacebookPolicy policy = {}) {
    const int limit = hq ? 2048 : 960;
    return snsdetail::facebook_recompress(jpeg, limit, limit, policy.target_qf);
}

// Metadata-only providers; Tumblr passes limits and recompresses only after
// its resize trigger.
inline std::vector<std::uint8_t> passthrough_pipeline(const std::vector<std::uint8_t>& jpeg,
                                                      int max_w, int max_h,
                                                      int resize_qf = 85) {
    const CodedImage coded = parse(jpeg);  // validates the upload
    if ((max_w > 0 && coded.width > max_w) || (max_h > 0 && coded.height > max_h)) {
        RasterImage img = snsdetail::fit_within(reconstruct(coded), max_w, max_h);
        return strip_metadata(encode(img, resize_qf, Subsampling::S420));
    }
    return strip_metadata(jpeg);
}

inline std::vector<std::uint8_t> simulate_upload(const ProviderConfig& config,
                                                 const std::vector<std::uint8_t>& jpeg) {
    switch (config.id) {
        case Provider::Twitter: {
            const CodedImage coded = parse(jpeg);
            const bool over_dims = (config.max_w > 0 && coded.width > config.max_w) ||
                                   (config.max_h > 0 && coded.height > config.max_h);
            const bool over_bytes = config.max_bytes > 0 && jpeg.size() > config.max_bytes;
            if (over_dims || over_bytes) {
                RasterImage img = snsdetail::fit_within(reconstruct(coded), config.max_w,
                                                        config.max_h);
                return strip_metadata(encode(img, config.target_qf, Subsampling::S420));
            }
            return twitter_pipeline(jpeg);
        }
        case Provider::FacebookHQ:
        case Provider::FacebookLQ:
            return snsdetail::facebook_recompress(jpeg, config.max_w, config.max_h,
                                                  config.target_qf);
        case Provider::Tumblr:
        case Provider::GooglePlus:
        case Provider::Flickr:
            return passthrough_pipeline(jpeg, config.max_w, config.max_h, config.target_qf);
    }
    throw std::invalid_argument("unknown provider");
}

}  // namespace etcjpeg

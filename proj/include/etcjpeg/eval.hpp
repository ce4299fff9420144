// eval.hpp - end-to-end experiment runner: encrypt, compress, simulate the
// provider, decode, decrypt, score. Emits deterministic CSV aggregates.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "etcjpeg/cipher.hpp"
#include "etcjpeg/fileio.hpp"
#include "etcjpeg/image.hpp"
#include "etcjpeg/jpeg.hpp"
#include "etcjpeg/keystream.hpp"
#include "etcjpeg/ppm.hpp"
#include "etcjpeg/sns.hpp"

namespace etcjpeg {

enum class Arm { Encrypted, Plain };

inline const char* arm_name(Arm a) { return a == Arm::Encrypted ? "encrypted" : "plain"; }

// Ground truth for the PSNR in step 7: the original pixels, or the
// JPEG-encoded original (the "image taken by a smartphone" methodology).
enum class GroundTruth { Original, JpegEncoded };

struct ExperimentSpec {
    std::vector<std::string> image_paths;
    std::vector<int> qf_sweep = {80, 81, 82, 83, 84, 85, 86, 87, 88, 89, 90,
                                 91, 92, 93, 94, 95, 96, 97, 98, 99, 100};
    std::vector<Subsampling> modes = {Subsampling::S444, Subsampling::S420};
    std::vector<ProviderConfig> providers;
    std::vector<Arm> arms = {Arm::Encrypted, Arm::Plain};
    EtcKey key = EtcKey::from_master(1);
    GroundTruth ground_truth = GroundTruth::Original;
    int block = 16;
};

// One run of the upload protocol. Field names follow the pipeline stages:
// original -> encrypted -> uploaded (JPEG) -> downloaded -> decoded -> decrypted.
struct PipelineOutcome {
    RasterImage original;
    RasterImage encrypted;
    std::vector<std::uint8_t> uploaded;
    std::vector<std::uint8_t> downloaded;
    RasterImage decoded;
    RasterImage decrypted;
    double psnr_db = 0.0;
    double artifact_score = 0.0;
};

// Mean absolute sample difference across block-boundary-adjacent pixel pairs
// minus the same statistic away from boundaries, clamped at zero. Positive
// values mean discontinuities concentrate on the (period x period) grid.
inline double block_artifact_score(const RasterImage& img, int period = 8) {
    if (period < 1)
        throw std::invalid_argument("block_artifact_score: period must be >= 1");
    if (img.width <= period || img.height <= period)
        throw std::invalid_argument("block_artifact_score: image must exceed one period");
    double boundary_sum = 0.0, off_sum = 0.0;
    std::int64_t boundary_n = 0, off_n = 0;
    const auto tally = [&](int a, int b, bool crosses) {
        const double d = std::abs(a - b);
        if (crosses) {
            boundary_sum += d;
            ++boundary_n;
        } else {
            off_sum += d;
            ++off_n;
        }
    };
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x + 1 < img.width; ++x)
            for (int c = 0; c < 3; ++c)
                tally(img.at(x, y, c), img.at(x + 1, y, c), (x + 1) % period == 0);
    for (int y = 0; y + 1 < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c)
                tally(img.at(x, y, c), img.at(x, y + 1, c), (y + 1) % period == 0);
    if (boundary_n == 0 || off_n == 0)
        return 0.0;
    const double score = boundary_sum / boundary_n - off_sum / off_n;
    return score > 0.0 ? score : 0.0;
}

namespace evaldetail {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(name) + ": " + e.what());
    }
}

}  // namespace evaldetail

// Protocol steps 1..7 for one image / provider / arm / quality cell.
// `key == nullptr` selects the plain (non-encrypted) arm.
inline PipelineOutcome run_pipeline(const RasterImage& img, const EtcKey* key, int quality,
                                    Subsampling mode, const ProviderConfig& provider,
                                    GroundTruth ground_truth = GroundTruth::Original,
                                    int block = 16) {
    using evaldetail::stage;
    PipelineOutcome out;
    out.original = stage("crop", [&] { return crop_to_block_multiple(img, block, block); });
    out.encrypted = key ? stage("encrypt", [&] { return encrypt(out.original, *key, block, block); })
                        : out.original;
    out.uploaded = stage("encode", [&] { return encode(out.encrypted, quality, mode); });
    out.downloaded = stage("simulate", [&] { return simulate_upload(provider, out.uploaded); });
    out.decoded = stage("decode", [&] { return decode(out.downloaded); });
    if (out.decoded.width != out.original.width || out.decoded.height != out.original.height)
        throw std::runtime_error("decode: provider changed image dimensions; cannot decrypt");
    out.decrypted = key ? stage("decrypt", [&] { return decrypt(out.decoded, *key, block, block); })
                        : out.decoded;
    const RasterImage truth =
        ground_truth == GroundTruth::Original
            ? out.original
            : stage("ground-truth", [&] { return decode(encode(out.original, quality, mode)); });
    out.psnr_db = psnr(truth, out.decrypted);
    out.artifact_score = block_artifact_score(out.decrypted);
    return out;
}

// One aggregate CSV row: corpus means for a (provider, arm, mode, qf) cell.
struct ResultRow {
    std::string provider;
    std::string arm;
    std::string mode;
    int qf = 0;
    double mean_psnr = 0.0;
    double mean_artifact_score = 0.0;
    int n_images = 0;
    std::string error;  // first per-image failure, empty when clean
};

inline std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
    if (spec.image_paths.empty())
        throw std::invalid_argument("experiment: image set is empty");
    if (spec.qf_sweep.empty())
        throw std::invalid_argument("experiment: quality sweep is empty");

    struct LoadedImage {
        std::string path;
        std::optional<RasterImage> image;
        std::string error;
    };
    std::vector<LoadedImage> images;
    for (const auto& path : spec.image_paths) {
        LoadedImage li{path, std::nullopt, ""};
        try {
            li.image = load_ppm(read_binary_file(path));
        } catch (const std::exception& e) {
            li.error = path + ": " + e.what();
        }
        images.push_back(std::move(li));
    }

    std::vector<ResultRow> rows;
    for (const auto& provider : spec.providers) {
        for (Arm arm : spec.arms) {
            for (Subsampling mode : spec.modes) {
                for (int qf : spec.qf_sweep) {
                    ResultRow row{provider_name(provider.id), arm_name(arm),
                                  mode == Subsampling::S420 ? "420" : "444",
                                  qf, 0.0, 0.0, 0, ""};
                    double psnr_sum = 0.0, artifact_sum = 0.0;
                    for (const auto& li : images) {
                        if (!li.image) {
                            if (row.error.empty())
                                row.error = li.error;
                            continue;
                        }
                        try {
                            const EtcKey* key = arm == Arm::Encrypted ? &spec.key : nullptr;
                            const auto outcome =
                                run_pipeline(*li.image, key, qf, mode, provider,
                                             spec.ground_truth, spec.block);
                            psnr_sum += outcome.psnr_db;
                            artifact_sum += outcome.artifact_score;
                            ++row.n_images;
                        } catch (const std::exception& e) {
                            if (row.error.empty())
                                row.error = li.path + ": " + e.what();
                        }
                    }
                    if (row.n_images > 0) {
                        row.mean_psnr = psnr_sum / row.n_images;
                        row.mean_artifact_score = artifact_sum / row.n_images;
                    }
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.provider, a.arm, a.mode, a.qf) <
               std::tie(b.provider, b.arm, b.mode, b.qf);
    });
    return rows;
}

inline std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "provider,arm,mode,qf,mean_psnr,mean_artifact_score,n_images,error\n";
    char buf[64];
    for (const auto& r : rows) {
        out += r.provider + "," + r.arm + "," + r.mode + "," + std::to_string(r.qf) + ",";
        std::snprintf(buf, sizeof buf, "%.4f", r.mean_psnr);
        out += buf;
        std::snprintf(buf, sizeof buf, ",%.4f,", r.mean_artifact_score);
        out += buf;
        out += std::to_string(r.n_images) + ",";
        // keep the CSV single-line per row
        std::string err = r.error;
        for (auto& ch : err)
            if (ch == ',' || ch == '\n' || ch == '\r')
                ch = ';';
        out += err + "\n";
    }
    return out;
}

// ---- experiment spec files ---------------------------------------------------
//
// Plain-text key=value, '#' comments. Lists are comma-separated; qf accepts
// "a-b" ranges. images= takes a directory (all *.ppm, sorted) or a comma
// list of files.
//   images=data/corpus
//   qf=80-100
//   modes=444,420
//   providers=facebook-hq,twitter
//   arms=encrypted,plain
//   master=1            (or key_file=path/to/key.txt)
//   ground_truth=original|jpeg
//   facebook_qf=77
//   block=16

namespace evaldetail {

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

inline std::vector<int> parse_qf_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& item : split_list(text)) {
        const std::size_t dash = item.find('-');
        if (dash != std::string::npos && dash > 0) {
            const int lo = std::stoi(item.substr(0, dash));
            const int hi = std::stoi(item.substr(dash + 1));
            if (lo > hi)
                throw std::invalid_argument("experiment spec: bad qf range: " + item);
            for (int q = lo; q <= hi; ++q)
                out.push_back(q);
        } else {
            out.push_back(std::stoi(item));
        }
    }
    return out;
}

inline std::vector<std::string> expand_images(const std::string& value) {
    namespace fs = std::filesystem;
    std::vector<std::string> out;
    for (const auto& item : split_list(value)) {
        if (fs::is_directory(item)) {
            std::vector<std::string> found;
            for (const auto& entry : fs::directory_iterator(item))
                if (entry.is_regular_file() && entry.path().extension() == ".ppm")
                    found.push_back(entry.path().string());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(item);
        }
    }
    return out;
}

}  // namespace evaldetail

inline ExperimentSpec parse_experiment_spec(const std::string& text) {
    ExperimentSpec spec;
    bool have_providers = false;
    int facebook_qf = 77;
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
            throw std::invalid_argument("experiment spec: expected key=value, got: " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);

        if (key == "images") {
            spec.image_paths = evaldetail::expand_images(value);
        } else if (key == "qf") {
            spec.qf_sweep = evaldetail::parse_qf_list(value);
        } else if (key == "modes") {
            spec.modes.clear();
            for (const auto& m : evaldetail::split_list(value)) {
                if (m == "444") spec.modes.push_back(Subsampling::S444);
                else if (m == "420") spec.modes.push_back(Subsampling::S420);
                else throw std::invalid_argument("experiment spec: unknown mode: " + m);
            }
        } else if (key == "providers") {
            spec.providers.clear();
            for (const auto& p : evaldetail::split_list(value))
                spec.providers.push_back(provider_defaults(provider_from_name(p)));
            have_providers = true;
        } else if (key == "arms") {
            spec.arms.clear();
            for (const auto& a : evaldetail::split_list(value)) {
                if (a == "encrypted") spec.arms.push_back(Arm::Encrypted);
                else if (a == "plain") spec.arms.push_back(Arm::Plain);
                else throw std::invalid_argument("experiment spec: unknown arm: " + a);
            }
        } else if (key == "master") {
            spec.key = EtcKey::from_master(detail::parse_hex64(value, "master"));
        } else if (key == "key_file") {
            spec.key = parse_key_file(read_text_file(value));
        } else if (key == "ground_truth") {
            if (value == "original") spec.ground_truth = GroundTruth::Original;
            else if (value == "jpeg") spec.ground_truth = GroundTruth::JpegEncoded;
            else throw std::invalid_argument("experiment spec: unknown ground_truth: " + value);
        } else if (key == "facebook_qf") {
            facebook_qf = std::stoi(value);
        } else if (key == "block") {
            spec.block = std::stoi(value);
        } else {
            throw std::invalid_argument("experiment spec: unknown key: " + key);
        }
    }
    if (!have_providers) {
        spec.providers = {provider_defaults(Provider::FacebookHQ),
                          provider_defaults(Provider::Twitter)};
    }
    for (auto& p : spec.providers)
        if (p.id == Provider::FacebookHQ || p.id == Provider::FacebookLQ)
            p.target_qf = facebook_qf;
    return spec;
}

}  // namespace etcjpeg

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "depthpipe/errors.hpp"

namespace depthpipe {

/// One depth map. Values are metric depth in meters, row-major,
/// finite and non-negative.
struct DepthFrame {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<float> values;

    float at(std::uint32_t row, std::uint32_t col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    float& at(std::uint32_t row, std::uint32_t col) {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    std::size_t pixel_count() const { return values.size(); }

    /// Throws std::invalid_argument if size or value invariants are broken.
    void validate() const;
};

/// Ordered depth frames for one video. All frames share dimensions.
struct DepthSequence {
    std::string video_id;
    std::vector<DepthFrame> frames;

    std::uint32_t width() const { return frames.empty() ? 0 : frames.front().width; }
    std::uint32_t height() const { return frames.empty() ? 0 : frames.front().height; }
    std::size_t size() const { return frames.size(); }

    void validate() const;
};

enum class SplitAssignment { Train, Test };

struct ManifestEntry {
    std::string video_id;
    std::filesystem::path path;
    std::string label;
    // split name -> train/test, one assignment per split.
    std::map<std::string, SplitAssignment> splits;
};

/// Dataset manifest: one row per video plus per-split train/test assignment.
struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::vector<std::string> split_names;

    const ManifestEntry* find(const std::string& video_id) const;
};

enum class SynthKind { Static, Oscillate, Ramp };

/// Parameters for the synthetic depth-sequence generator.
struct SynthSpec {
    SynthKind kind = SynthKind::Static;
    float base_depth = 3.0f;    // meters
    float amplitude = 0.0f;     // meters, >= 0
    float noise_sigma = 0.0f;   // meters, >= 0
    std::uint32_t frames = 1;
    std::uint32_t width = 1;
    std::uint32_t height = 1;
    std::uint64_t rng_seed = 0;
};

/// Reads a `.dseq` container, or a directory of 16-bit binary PGM frames
/// (lexicographic order, `scale.txt` sidecar holding meters-per-unit).
/// Format problems raise DataError naming the offending frame.
DepthSequence read_sequence(const std::filesystem::path& path);

/// Writes the `.dseq` binary container. read_sequence inverts it bit-exactly.
void write_sequence(const DepthSequence& seq, const std::filesystem::path& path);

/// Serializes a sequence to `.dseq` bytes without touching the filesystem.
std::vector<std::uint8_t> serialize_sequence(const DepthSequence& seq);
DepthSequence deserialize_sequence(const std::vector<std::uint8_t>& bytes,
                                   const std::string& video_id);

/// Deterministic synthetic generator.
///   static:    base + noise
///   oscillate: base + amplitude*sin(2*pi*t/frames) + noise
///   ramp:      base + amplitude*(t/frames) + noise
/// All values clamped at 0. Pure function of the spec.
DepthSequence synth_sequence(const SynthSpec& spec);

/// Loads a manifest CSV (header video_id,path,label,<split...>). Relative
/// paths resolve against the manifest's directory. Checks video_id
/// uniqueness and, if check_paths, that every referenced path exists.
DatasetManifest load_manifest(const std::filesystem::path& path, bool check_paths = true);

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace depthpipe

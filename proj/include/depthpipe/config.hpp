#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "depthpipe/normalize.hpp"

namespace depthpipe {

/// Which encoding paths the pipeline runs.
enum class PathSelect { Spatial, Temporal, Both };

enum class FusionMode { Early, Late };

/// Full pipeline configuration. Field defaults are the reference
/// hyperparameters; everything is overridable from a config file or
/// dotted-key CLI flags.
struct PipelineConfig {
    // [normalize]
    std::string normalize_mode = "stdn";  // stdn | intra | none
    StdnConfig stdn;

    // [motion]
    std::uint32_t clip_len = 10;  // frames per MDMM clip

    // [features]
    std::string extractor = "toy";
    std::uint32_t flat_dim = 4096;
    std::uint32_t map_size = 7;
    std::uint32_t channels = 512;
    std::uint32_t pca_dim = 64;
    std::uint32_t vlad_k = 256;
    std::uint32_t vlad_dim = 16384;  // must equal pca_dim * vlad_k
    std::vector<std::uint32_t> spp_levels{1, 2};
    std::uint32_t stride = 1;
    bool whiten = false;
    std::uint32_t max_fit_descriptors = 20000;
    PathSelect paths = PathSelect::Both;

    // [classify]
    double svm_c = 1.0;
    double grid_step = 0.05;
    std::uint64_t seed = 7;

    // [fusion]
    FusionMode fusion_mode = FusionMode::Early;
    double tune_fraction = 0.2;

    // [io]
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path out_dir = "out";

    // [run]
    std::uint32_t jobs = 1;
    bool lenient = false;

    /// Applies one dotted key ("section.key"). Unknown keys and malformed
    /// values raise ConfigError.
    void apply(const std::string& key, const std::string& value);

    /// Cross-field checks (ConfigError on violation).
    void validate() const;

    /// Canonical key=value rendering of every field, sorted by key. Used
    /// for logging and content hashing.
    std::string canonical_text() const;
};

/// Defaults with the DEPTHPIPE_CACHE environment override applied.
PipelineConfig default_config();

/// Parses a key=value file with [section] headers and '#' comments,
/// starting from default_config().
PipelineConfig load_config(const std::filesystem::path& path);

/// Applies `key=value` override strings on top of an existing config.
void apply_overrides(PipelineConfig& cfg, const std::vector<std::string>& overrides);

}  // namespace depthpipe

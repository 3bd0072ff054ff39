#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "depthpipe/cache.hpp"
#include "depthpipe/classify.hpp"
#include "depthpipe/config.hpp"
#include "depthpipe/depth_io.hpp"

namespace depthpipe {

/// Outcome of a full pipeline run.
struct RunResult {
    SplitResults results;
    // Late fusion only: tuned stream weights per split, path order
    // spatial then temporal.
    std::map<std::string, std::vector<double>> fusion_weights;
    CacheStats cache;
    // Lenient mode: videos that failed a stage and were excluded.
    std::vector<std::string> failed_videos;
    std::filesystem::path results_csv;
    std::filesystem::path log_path;
};

/// Runs normalize -> motion maps -> encoding -> train/evaluate for every
/// split in the manifest. PCA, codebook, SVM, and fusion weights are fit
/// on training-split data only (the id set of every fit is logged).
/// Intermediates are cached under cfg.cache_dir keyed by content hash;
/// outputs (results.csv, probs_<split>.csv, run.log) land in cfg.out_dir.
/// run.log content is a pure function of config + data, so warm reruns
/// reproduce every output byte.
RunResult run_pipeline(const PipelineConfig& cfg, const DatasetManifest& manifest);

/// Writes the synthetic two-class benchmark: `static` scenes (fixed
/// foreground block over a fixed background plane) and `oscillate` scenes
/// (same geometry, foreground depth swinging sinusoidally). Base depths,
/// block geometry, phase, and noise draws are paired across classes, so
/// per-frame marginal statistics match and only temporal depth dynamics
/// separate the classes. Emits videos_per_class sequences per class under
/// out_dir/seqs plus manifest.csv with one 80/20 train/test split;
/// entries interleave the classes. Returns the manifest with resolved
/// paths. Deterministic given rng_seed.
DatasetManifest make_benchmark(const std::filesystem::path& out_dir,
                               std::uint32_t videos_per_class, std::uint64_t rng_seed);

}  // namespace depthpipe

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "depthpipe/depth_io.hpp"
#include "depthpipe/features.hpp"

namespace depthpipe {

/// One-vs-rest linear SVM. One weight vector and bias per class,
/// classes in sorted label order.
struct LinearSvmModel {
    std::vector<std::string> classes;
    std::vector<std::vector<float>> weights;  // per class, descriptor dim
    std::vector<float> biases;                // per class
    double c_param = 1.0;
    // Per-class dual objective value at the end of each epoch.
    std::vector<std::vector<double>> objective_traces;
};

/// Per-video per-class scores. Each row lies on the probability simplex.
struct ProbabilityMatrix {
    std::vector<std::string> video_ids;
    std::vector<std::string> classes;
    std::vector<std::vector<float>> rows;
};

/// Convex weights over fused streams.
struct FusionWeights {
    std::vector<double> weights;

    void validate() const;
};

/// Trains one-vs-rest L2-regularized hinge-loss SVMs by dual coordinate
/// descent with seeded epoch shuffling (1000 epochs max, duality gap
/// tolerance 1e-4). Bias handled via an augmented constant feature.
LinearSvmModel train_svm(const std::vector<std::pair<VideoDescriptor, std::string>>& samples,
                         double c_param, std::uint64_t rng_seed);

/// Margins mapped through a shifted softmax; the row argmax always equals
/// the margin argmax.
ProbabilityMatrix predict_proba(const LinearSvmModel& m,
                                const std::vector<VideoDescriptor>& features,
                                const std::vector<std::string>& video_ids);

/// Weighted average of aligned probability matrices.
ProbabilityMatrix fuse_scores(const std::vector<ProbabilityMatrix>& mats,
                              const FusionWeights& w);

/// Exhaustive simplex grid search maximizing top-1 accuracy on the given
/// labels; ties broken toward the lexicographically smallest weight tuple.
FusionWeights grid_search_weights(const std::vector<ProbabilityMatrix>& mats,
                                  const std::vector<std::string>& labels, double step = 0.05);

/// Fraction of videos whose argmax class (lowest index on ties) equals
/// the true label.
double top1_accuracy(const ProbabilityMatrix& mat, const std::vector<std::string>& labels);

struct SplitEvalConfig {
    double svm_c = 1.0;
    std::uint64_t seed = 7;
};

struct SplitResults {
    std::vector<std::pair<std::string, double>> per_split;
    double mean = 0.0;
};

/// Per split: train on the train set, report top-1 on the test set;
/// plus the mean across splits.
SplitResults split_evaluate(const DatasetManifest& manifest,
                            const std::map<std::string, VideoDescriptor>& features,
                            const std::vector<std::string>& splits,
                            const SplitEvalConfig& cfg = {});

// --- serialization -------------------------------------------------------

std::vector<std::uint8_t> serialize_svm(const LinearSvmModel& m);
LinearSvmModel deserialize_svm(const std::vector<std::uint8_t>& bytes, const std::string& ctx);
void write_svm(const LinearSvmModel& m, const std::filesystem::path& path);
LinearSvmModel read_svm(const std::filesystem::path& path);

/// CSV with header `video_id,<class0>,...`, 9 significant digits so f32
/// values round-trip exactly. Also the import format for external streams.
void write_probability_csv(const ProbabilityMatrix& mat, const std::filesystem::path& path);
ProbabilityMatrix read_probability_csv(const std::filesystem::path& path);

void write_results_csv(const SplitResults& results, const std::filesystem::path& path);

}  // namespace depthpipe

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "depthpipe/depth_io.hpp"

namespace depthpipe {

/// Dense H x W x C feature tensor, channel-last row-major layout.
struct FeatureMap {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t channels = 0;
    std::vector<float> data;

    float at(std::uint32_t i, std::uint32_t j, std::uint32_t c) const {
        return data[(static_cast<std::size_t>(i) * width + j) * channels + c];
    }
    std::span<const float> cell(std::uint32_t i, std::uint32_t j) const {
        return {data.data() + (static_cast<std::size_t>(i) * width + j) * channels, channels};
    }
};

/// Per-frame outputs of a frame extractor: a flat vector and a spatial map.
struct FrameFeatures {
    std::vector<float> flat;  // dimension F
    FeatureMap map;           // H x W x C
};

/// Pluggable per-frame feature extractor with fixed declared dimensions.
class FrameExtractor {
public:
    virtual ~FrameExtractor() = default;
    virtual std::uint32_t flat_dim() const = 0;
    virtual std::uint32_t map_height() const = 0;
    virtual std::uint32_t map_width() const = 0;
    virtual std::uint32_t map_channels() const = 0;
    virtual FrameFeatures extract(const DepthFrame& frame) const = 0;
    virtual std::string name() const = 0;
};

/// Deterministic hand-crafted extractor standing in for a trained network.
/// flat: per-cell means of raw depth and of horizontal/vertical absolute
/// finite differences over a spatial grid, tiled cyclically to F.
/// map: H x W grid pooling with channels cycling through four variants:
/// cell mean, mean |dx|, mean |dy|, cell 95th percentile.
class ToyExtractor : public FrameExtractor {
public:
    explicit ToyExtractor(std::uint32_t flat_dim = 4096, std::uint32_t map_size = 7,
                          std::uint32_t channels = 512, std::uint32_t flat_grid = 8);

    std::uint32_t flat_dim() const override { return flat_dim_; }
    std::uint32_t map_height() const override { return map_size_; }
    std::uint32_t map_width() const override { return map_size_; }
    std::uint32_t map_channels() const override { return channels_; }
    FrameFeatures extract(const DepthFrame& frame) const override;
    std::string name() const override { return "toy"; }

private:
    std::uint32_t flat_dim_;
    std::uint32_t map_size_;
    std::uint32_t channels_;
    std::uint32_t flat_grid_;
};

std::unique_ptr<FrameExtractor> make_extractor(const std::string& name,
                                               std::uint32_t flat_dim, std::uint32_t map_size,
                                               std::uint32_t channels);

/// Runs the extractor and validates output dimensions against its
/// declaration (mismatch -> ConfigError).
FrameFeatures extract_frame_features(const DepthFrame& frame, const FrameExtractor& extractor);

/// Latent concept descriptors: one C-vector per spatial cell.
using LcdSet = std::vector<std::vector<float>>;

LcdSet lcd(const FeatureMap& map);

/// Base LCD set plus, per pyramid level g, g*g channelwise max-pooled
/// descriptors over a balanced spatial partition.
LcdSet spp_augment(const FeatureMap& map, const std::vector<std::uint32_t>& levels);

/// PCA projection model. Rows of `projection` are orthonormal principal
/// directions (eigenvalue-descending) unless fitted with whitening.
struct PcaModel {
    std::uint32_t input_dim = 0;   // C
    std::uint32_t output_dim = 0;  // d
    std::vector<float> mean;        // C
    std::vector<float> projection;  // d x C row-major
};

/// Fits PCA on the descriptors. Sign convention: the largest-magnitude
/// coordinate of each projection row is positive.
PcaModel fit_pca(const LcdSet& descriptors, std::uint32_t d, bool whiten = false);

std::vector<float> pca_transform(const PcaModel& m, std::span<const float> v);
LcdSet pca_transform_all(const PcaModel& m, const LcdSet& descriptors);

/// VLAD codebook: k centers of dimension d.
struct Codebook {
    std::uint32_t k = 0;
    std::uint32_t dim = 0;
    std::vector<float> centers;  // k x d row-major

    std::span<const float> center(std::uint32_t i) const {
        return {centers.data() + static_cast<std::size_t>(i) * dim, dim};
    }
};

/// k-means with k-means++ initialization; at most 100 Lloyd iterations or
/// relative inertia change < 1e-4. An empty cluster is re-seeded at the
/// point farthest from its assigned center. Deterministic given the seed.
Codebook fit_codebook(const LcdSet& descriptors, std::uint32_t k, std::uint64_t rng_seed);

enum class DescriptorKind : std::uint8_t { Fc6Pooled = 0, Vlad = 1, EarlyFused = 2 };

/// Fixed-length per-video descriptor.
struct VideoDescriptor {
    DescriptorKind kind = DescriptorKind::Fc6Pooled;
    std::vector<float> vector;
};

/// VLAD: per-center residual sums, nearest-center ties broken toward the
/// lowest center index, intra-normalized per block then globally
/// L2-normalized. Exactly invariant under descriptor permutation.
VideoDescriptor vlad_encode(const LcdSet& descriptors, const Codebook& cb);

/// Intra-normalized blocks before global normalization (k*d doubles).
/// Each block has L2 norm 0 or 1.
std::vector<double> vlad_blocks(const LcdSet& descriptors, const Codebook& cb);

/// Elementwise mean of the per-frame flat vectors, L2-normalized
/// (all-zero mean stays zero).
VideoDescriptor fc6_pool(const std::vector<std::vector<float>>& per_frame_flats);

/// Concatenation [a | b], flat block first. No renormalization.
VideoDescriptor early_fuse(const VideoDescriptor& a, const VideoDescriptor& b);

// --- serialization -------------------------------------------------------

/// `.ftr` container: a homogeneous set of descriptors, one row per video
/// in manifest order.
struct FeatureFile {
    DescriptorKind kind = DescriptorKind::Fc6Pooled;
    std::uint32_t dim = 0;
    std::vector<std::vector<float>> rows;
};

std::vector<std::uint8_t> serialize_features(const FeatureFile& f);
FeatureFile deserialize_features(const std::vector<std::uint8_t>& bytes, const std::string& ctx);
void write_features(const FeatureFile& f, const std::filesystem::path& path);
FeatureFile read_features(const std::filesystem::path& path);

std::vector<std::uint8_t> serialize_pca(const PcaModel& m);
PcaModel deserialize_pca(const std::vector<std::uint8_t>& bytes, const std::string& ctx);
void write_pca(const PcaModel& m, const std::filesystem::path& path);
PcaModel read_pca(const std::filesystem::path& path);

std::vector<std::uint8_t> serialize_codebook(const Codebook& cb);
Codebook deserialize_codebook(const std::vector<std::uint8_t>& bytes, const std::string& ctx);
void write_codebook(const Codebook& cb, const std::filesystem::path& path);
Codebook read_codebook(const std::filesystem::path& path);

}  // namespace depthpipe

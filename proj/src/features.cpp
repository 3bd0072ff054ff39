#include "depthpipe/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "depthpipe/errors.hpp"
#include "depthpipe/normalize.hpp"

namespace depthpipe {

namespace {

// Per-cell statistics shared by the flat and map outputs.
struct CellStats {
    double mean_value = 0.0;
    double mean_dx = 0.0;
    double mean_dy = 0.0;
    float p95 = 0.0f;
};

CellStats cell_stats(const DepthFrame& frame, const std::vector<float>& dx,
                     const std::vector<float>& dy, std::uint32_t r0, std::uint32_t r1,
                     std::uint32_t c0, std::uint32_t c1) {
    CellStats s;
    const std::size_t count = static_cast<std::size_t>(r1 - r0) * (c1 - c0);
    if (count == 0) return s;
    double sv = 0.0, sx = 0.0, sy = 0.0;
    std::vector<float> vals;
    vals.reserve(count);
    for (std::uint32_t r = r0; r < r1; ++r) {
        const std::size_t row = static_cast<std::size_t>(r) * frame.width;
        for (std::uint32_t c = c0; c < c1; ++c) {
            sv += frame.values[row + c];
            sx += dx[row + c];
            sy += dy[row + c];
            vals.push_back(frame.values[row + c]);
        }
    }
    s.mean_value = sv / static_cast<double>(count);
    s.mean_dx = sx / static_cast<double>(count);
    s.mean_dy = sy / static_cast<double>(count);
    s.p95 = nearest_rank_percentile(vals, 95.0);
    return s;
}

// Forward differences, last column/row zero.
void finite_differences(const DepthFrame& frame, std::vector<float>& dx, std::vector<float>& dy) {
    const std::uint32_t w = frame.width, h = frame.height;
    dx.assign(frame.pixel_count(), 0.0f);
    dy.assign(frame.pixel_count(), 0.0f);
    for (std::uint32_t r = 0; r < h; ++r) {
        const std::size_t row = static_cast<std::size_t>(r) * w;
        for (std::uint32_t c = 0; c + 1 < w; ++c)
            dx[row + c] = std::fabs(frame.values[row + c + 1] - frame.values[row + c]);
        if (r + 1 < h)
            for (std::uint32_t c = 0; c < w; ++c)
                dy[row + c] = std::fabs(frame.values[row + w + c] - frame.values[row + c]);
    }
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}
std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
void put_f32(std::vector<std::uint8_t>& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}
float get_f32(const std::uint8_t* p) {
    const std::uint32_t bits = get_u32(p);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for write: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed: " + path.string());
}

double sq_dist(std::span<const float> a, std::span<const float> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += d * d;
    }
    return acc;
}

}  // namespace

ToyExtractor::ToyExtractor(std::uint32_t flat_dim, std::uint32_t map_size,
                           std::uint32_t channels, std::uint32_t flat_grid)
    : flat_dim_(flat_dim), map_size_(map_size), channels_(channels), flat_grid_(flat_grid) {
    if (flat_dim_ == 0 || map_size_ == 0 || channels_ == 0 || flat_grid_ == 0)
        throw ConfigError("ToyExtractor: dimensions must be positive");
}

FrameFeatures ToyExtractor::extract(const DepthFrame& frame) const {
    frame.validate();
    std::vector<float> dx, dy;
    finite_differences(frame, dx, dy);

    FrameFeatures out;

    // Flat vector: grid-pooled means tiled cyclically to F.
    const std::uint32_t gr = std::min(flat_grid_, frame.height);
    const std::uint32_t gc = std::min(flat_grid_, frame.width);
    const BandPartition rows = make_band_partition(frame.height, gr);
    const BandPartition cols = make_band_partition(frame.width, gc);
    std::vector<float> base;
    base.reserve(static_cast<std::size_t>(gr) * gc * 3);
    for (const auto& [r0, r1] : rows.band_row_ranges)
        for (const auto& [c0, c1] : cols.band_row_ranges) {
            const CellStats s = cell_stats(frame, dx, dy, r0, r1, c0, c1);
            base.push_back(static_cast<float>(s.mean_value));
            base.push_back(static_cast<float>(s.mean_dx));
            base.push_back(static_cast<float>(s.mean_dy));
        }
    out.flat.resize(flat_dim_);
    for (std::uint32_t i = 0; i < flat_dim_; ++i) out.flat[i] = base[i % base.size()];

    // Spatial map: fixed H x W grid, channels cycling through variants.
    const BandPartition mrows = make_band_partition(frame.height, map_size_, true);
    const BandPartition mcols = make_band_partition(frame.width, map_size_, true);
    out.map.height = map_size_;
    out.map.width = map_size_;
    out.map.channels = channels_;
    out.map.data.resize(static_cast<std::size_t>(map_size_) * map_size_ * channels_);
    for (std::uint32_t i = 0; i < map_size_; ++i)
        for (std::uint32_t j = 0; j < map_size_; ++j) {
            const auto [r0, r1] = mrows.band_row_ranges[i];
            const auto [c0, c1] = mcols.band_row_ranges[j];
            const CellStats s = cell_stats(frame, dx, dy, r0, r1, c0, c1);
            const float variants[4] = {static_cast<float>(s.mean_value),
                                       static_cast<float>(s.mean_dx),
                                       static_cast<float>(s.mean_dy), s.p95};
            float* cell = &out.map.data[(static_cast<std::size_t>(i) * map_size_ + j) * channels_];
            for (std::uint32_t c = 0; c < channels_; ++c) cell[c] = variants[c % 4];
        }
    return out;
}

std::unique_ptr<FrameExtractor> make_extractor(const std::string& name, std::uint32_t flat_dim,
                                               std::uint32_t map_size, std::uint32_t channels) {
    if (name == "toy") return std::make_unique<ToyExtractor>(flat_dim, map_size, channels);
    throw ConfigError("unknown extractor: " + name);
}

FrameFeatures extract_frame_features(const DepthFrame& frame, const FrameExtractor& extractor) {
    FrameFeatures f = extractor.extract(frame);
    if (f.flat.size() != extractor.flat_dim() || f.map.height != extractor.map_height() ||
        f.map.width != extractor.map_width() || f.map.channels != extractor.map_channels())
        throw ConfigError("extractor '" + extractor.name() +
                          "' produced dimensions that do not match its declaration");
    return f;
}

LcdSet lcd(const FeatureMap& map) {
    LcdSet set;
    set.reserve(static_cast<std::size_t>(map.height) * map.width);
    for (std::uint32_t i = 0; i < map.height; ++i)
        for (std::uint32_t j = 0; j < map.width; ++j) {
            const auto cell = map.cell(i, j);
            set.emplace_back(cell.begin(), cell.end());
        }
    return set;
}

LcdSet spp_augment(const FeatureMap& map, const std::vector<std::uint32_t>& levels) {
    const std::uint32_t min_extent = std::min(map.height, map.width);
    for (std::uint32_t g : levels)
        if (g == 0 || g > min_extent)
            throw std::invalid_argument("spp_augment: pyramid level " + std::to_string(g) +
                                        " exceeds spatial extent");
    LcdSet set = lcd(map);
    for (std::uint32_t g : levels) {
        const BandPartition rows = make_band_partition(map.height, g);
        const BandPartition cols = make_band_partition(map.width, g);
        for (const auto& [r0, r1] : rows.band_row_ranges)
            for (const auto& [c0, c1] : cols.band_row_ranges) {
                std::vector<float> pooled(map.channels, -std::numeric_limits<float>::infinity());
                for (std::uint32_t i = r0; i < r1; ++i)
                    for (std::uint32_t j = c0; j < c1; ++j) {
                        const auto cell = map.cell(i, j);
                        for (std::uint32_t c = 0; c < map.channels; ++c)
                            pooled[c] = std::max(pooled[c], cell[c]);
                    }
                set.push_back(std::move(pooled));
            }
    }
    return set;
}

PcaModel fit_pca(const LcdSet& descriptors, std::uint32_t d, bool whiten) {
    if (descriptors.empty()) throw std::invalid_argument("fit_pca: empty descriptor set");
    const std::size_t n = descriptors.size();
    const std::size_t c = descriptors.front().size();
    if (d == 0 || d > c) throw std::invalid_argument("fit_pca: target dim must be in [1, C]");
    if (n < d) throw std::invalid_argument("fit_pca: fewer samples than target dimension");
    for (const auto& v : descriptors)
        if (v.size() != c) throw std::invalid_argument("fit_pca: inconsistent descriptor dims");

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c));
    for (const auto& v : descriptors)
        for (std::size_t j = 0; j < c; ++j) mean[static_cast<Eigen::Index>(j)] += v[j];
    mean /= static_cast<double>(n);

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c),
                                                static_cast<Eigen::Index>(c));
    Eigen::VectorXd centered(static_cast<Eigen::Index>(c));
    for (const auto& v : descriptors) {
        for (std::size_t j = 0; j < c; ++j)
            centered[static_cast<Eigen::Index>(j)] = v[j] - mean[static_cast<Eigen::Index>(j)];
        cov.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0);
    }
    cov = cov.selfadjointView<Eigen::Lower>();
    cov /= static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw DataError("fit_pca: eigendecomposition failed");
    // Eigen sorts eigenvalues ascending; take the top d in descending order.
    const Eigen::VectorXd& evals = solver.eigenvalues();
    const Eigen::MatrixXd& evecs = solver.eigenvectors();

    PcaModel model;
    model.input_dim = static_cast<std::uint32_t>(c);
    model.output_dim = d;
    model.mean.resize(c);
    for (std::size_t j = 0; j < c; ++j)
        model.mean[j] = static_cast<float>(mean[static_cast<Eigen::Index>(j)]);
    model.projection.resize(static_cast<std::size_t>(d) * c);
    for (std::uint32_t r = 0; r < d; ++r) {
        const Eigen::Index src = static_cast<Eigen::Index>(c) - 1 - r;
        Eigen::VectorXd row = evecs.col(src);
        // Sign convention: largest-magnitude coordinate positive.
        Eigen::Index imax = 0;
        row.cwiseAbs().maxCoeff(&imax);
        if (row[imax] < 0.0) row = -row;
        if (whiten) {
            const double lambda = std::max(evals[src], 1e-12);
            row /= std::sqrt(lambda);
        }
        for (std::size_t j = 0; j < c; ++j)
            model.projection[static_cast<std::size_t>(r) * c + j] =
                static_cast<float>(row[static_cast<Eigen::Index>(j)]);
    }
    return model;
}

std::vector<float> pca_transform(const PcaModel& m, std::span<const float> v) {
    if (v.size() != m.input_dim)
        throw std::invalid_argument("pca_transform: dimension mismatch");
    std::vector<float> out(m.output_dim);
    for (std::uint32_t r = 0; r < m.output_dim; ++r) {
        const float* row = &m.projection[static_cast<std::size_t>(r) * m.input_dim];
        double acc = 0.0;
        for (std::uint32_t j = 0; j < m.input_dim; ++j)
            acc += static_cast<double>(row[j]) *
                   (static_cast<double>(v[j]) - static_cast<double>(m.mean[j]));
        out[r] = static_cast<float>(acc);
    }
    return out;
}

LcdSet pca_transform_all(const PcaModel& m, const LcdSet& descriptors) {
    LcdSet out;
    out.reserve(descriptors.size());
    for (const auto& v : descriptors) out.push_back(pca_transform(m, v));
    return out;
}

Codebook fit_codebook(const LcdSet& descriptors, std::uint32_t k, std::uint64_t rng_seed) {
    if (k == 0) throw std::invalid_argument("fit_codebook: k must be >= 1");
    if (descriptors.size() < k)
        throw std::invalid_argument("fit_codebook: fewer descriptors than clusters");
    const std::size_t n = descriptors.size();
    const std::size_t dim = descriptors.front().size();
    for (const auto& v : descriptors)
        if (v.size() != dim) throw std::invalid_argument("fit_codebook: inconsistent dims");

    std::mt19937_64 rng(rng_seed);
    std::vector<std::vector<double>> centers(k, std::vector<double>(dim));
    std::vector<char> used(n, 0);

    // k-means++ seeding.
    {
        const std::size_t first = static_cast<std::size_t>(rng() % n);
        for (std::size_t j = 0; j < dim; ++j) centers[0][j] = descriptors[first][j];
        used[first] = 1;
        std::vector<double> d2(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double d = descriptors[i][j] - centers[0][j];
                acc += d * d;
            }
            d2[i] = acc;
        }
        for (std::uint32_t c = 1; c < k; ++c) {
            double total = 0.0;
            for (double v : d2) total += v;
            std::size_t pick = n;
            if (total > 0.0) {
                const double u =
                    std::uniform_real_distribution<double>(0.0, total)(rng);
                double run = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    run += d2[i];
                    if (u < run) {
                        pick = i;
                        break;
                    }
                }
                if (pick == n) pick = n - 1;
            } else {
                // All points coincide with existing centers; take the first
                // unused index so n == k still yields a full codebook.
                for (std::size_t i = 0; i < n; ++i)
                    if (!used[i]) {
                        pick = i;
                        break;
                    }
                if (pick == n) pick = 0;
            }
            used[pick] = 1;
            for (std::size_t j = 0; j < dim; ++j) centers[c][j] = descriptors[pick][j];
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < dim; ++j) {
                    const double d = descriptors[i][j] - centers[c][j];
                    acc += d * d;
                }
                d2[i] = std::min(d2[i], acc);
            }
        }
    }

    std::vector<std::uint32_t> assign(n, 0);
    std::vector<double> min_d2(n, 0.0);
    double prev_inertia = -1.0;
    constexpr int kMaxIter = 100;
    constexpr double kRelTol = 1e-4;

    for (int iter = 0; iter < kMaxIter; ++iter) {
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t best_c = 0;
            for (std::uint32_t c = 0; c < k; ++c) {
                double acc = 0.0;
                for (std::size_t j = 0; j < dim; ++j) {
                    const double d = descriptors[i][j] - centers[c][j];
                    acc += d * d;
                }
                if (acc < best) {
                    best = acc;
                    best_c = c;
                }
            }
            assign[i] = best_c;
            min_d2[i] = best;
            inertia += best;
        }

        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) sums[assign[i]][j] += descriptors[i][j];
            ++counts[assign[i]];
        }
        for (std::uint32_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                for (std::size_t j = 0; j < dim; ++j)
                    centers[c][j] = sums[c][j] / static_cast<double>(counts[c]);
            } else {
                // Re-seed at the point farthest from its center.
                std::size_t far_i = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i)
                    if (min_d2[i] > far_d) {
                        far_d = min_d2[i];
                        far_i = i;
                    }
                for (std::size_t j = 0; j < dim; ++j) centers[c][j] = descriptors[far_i][j];
                min_d2[far_i] = 0.0;  // do not pick the same point for another empty cluster
            }
        }

        if (prev_inertia >= 0.0) {
            const double change = std::fabs(prev_inertia - inertia);
            if (inertia == 0.0 || change < kRelTol * prev_inertia) {
                prev_inertia = inertia;
                break;
            }
        }
        prev_inertia = inertia;
    }

    Codebook cb;
    cb.k = k;
    cb.dim = static_cast<std::uint32_t>(dim);
    cb.centers.resize(static_cast<std::size_t>(k) * dim);
    for (std::uint32_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < dim; ++j)
            cb.centers[static_cast<std::size_t>(c) * dim + j] = static_cast<float>(centers[c][j]);
    return cb;
}

std::vector<double> vlad_blocks(const LcdSet& descriptors, const Codebook& cb) {
    if (descriptors.empty()) throw std::invalid_argument("vlad_encode: empty descriptor set");
    const std::size_t dim = cb.dim;
    for (const auto& v : descriptors)
        if (v.size() != dim)
            throw std::invalid_argument("vlad_encode: descriptor dim does not match codebook");

    // Nearest-center assignment, ties toward the lowest center index.
    std::vector<std::vector<std::size_t>> members(cb.k);
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_c = 0;
        for (std::uint32_t c = 0; c < cb.k; ++c) {
            const double d = sq_dist(descriptors[i], cb.center(c));
            if (d < best) {
                best = d;
                best_c = c;
            }
        }
        members[best_c].push_back(i);
    }

    // Residual sums accumulated in sorted order per coordinate so the
    // encoding is exactly permutation invariant.
    std::vector<double> blocks(static_cast<std::size_t>(cb.k) * dim, 0.0);
    std::vector<double> terms;
    for (std::uint32_t c = 0; c < cb.k; ++c) {
        if (members[c].empty()) continue;
        const auto center = cb.center(c);
        for (std::size_t j = 0; j < dim; ++j) {
            terms.clear();
            for (std::size_t i : members[c])
                terms.push_back(static_cast<double>(descriptors[i][j]) -
                                static_cast<double>(center[j]));
            std::sort(terms.begin(), terms.end());
            double acc = 0.0;
            for (double t : terms) acc += t;
            blocks[static_cast<std::size_t>(c) * dim + j] = acc;
        }
    }

    // Intra-normalization: each block to unit norm, zero blocks stay zero.
    for (std::uint32_t c = 0; c < cb.k; ++c) {
        double norm2 = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double v = blocks[static_cast<std::size_t>(c) * dim + j];
            norm2 += v * v;
        }
        if (norm2 > 0.0) {
            const double inv = 1.0 / std::sqrt(norm2);
            for (std::size_t j = 0; j < dim; ++j)
                blocks[static_cast<std::size_t>(c) * dim + j] *= inv;
        }
    }
    return blocks;
}

VideoDescriptor vlad_encode(const LcdSet& descriptors, const Codebook& cb) {
    std::vector<double> blocks = vlad_blocks(descriptors, cb);
    double norm2 = 0.0;
    for (double v : blocks) norm2 += v * v;
    const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;

    VideoDescriptor out;
    out.kind = DescriptorKind::Vlad;
    out.vector.resize(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i)
        out.vector[i] = static_cast<float>(norm2 > 0.0 ? blocks[i] * inv : 0.0);
    return out;
}

VideoDescriptor fc6_pool(const std::vector<std::vector<float>>& per_frame_flats) {
    if (per_frame_flats.empty()) throw std::invalid_argument("fc6_pool: empty input");
    const std::size_t dim = per_frame_flats.front().size();
    for (const auto& v : per_frame_flats)
        if (v.size() != dim) throw std::invalid_argument("fc6_pool: inconsistent dims");

    std::vector<double> mean(dim, 0.0);
    for (const auto& v : per_frame_flats)
        for (std::size_t j = 0; j < dim; ++j) mean[j] += v[j];
    for (double& m : mean) m /= static_cast<double>(per_frame_flats.size());

    double norm2 = 0.0;
    for (double m : mean) norm2 += m * m;
    const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;

    VideoDescriptor out;
    out.kind = DescriptorKind::Fc6Pooled;
    out.vector.resize(dim);
    for (std::size_t j = 0; j < dim; ++j)
        out.vector[j] = static_cast<float>(norm2 > 0.0 ? mean[j] * inv : 0.0);
    return out;
}

VideoDescriptor early_fuse(const VideoDescriptor& a, const VideoDescriptor& b) {
    VideoDescriptor out;
    out.kind = DescriptorKind::EarlyFused;
    out.vector.reserve(a.vector.size() + b.vector.size());
    out.vector.insert(out.vector.end(), a.vector.begin(), a.vector.end());
    out.vector.insert(out.vector.end(), b.vector.begin(), b.vector.end());
    return out;
}

// --- serialization -------------------------------------------------------

namespace {
constexpr std::uint32_t kFormatVersion = 1;
}

std::vector<std::uint8_t> serialize_features(const FeatureFile& f) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'F', 'T', 'R', 'V'});
    put_u32(out, kFormatVersion);
    put_u32(out, f.dim);
    out.push_back(static_cast<std::uint8_t>(f.kind));
    put_u32(out, static_cast<std::uint32_t>(f.rows.size()));
    for (const auto& row : f.rows) {
        if (row.size() != f.dim) throw std::invalid_argument("serialize_features: row dim mismatch");
        for (float v : row) put_f32(out, v);
    }
    return out;
}

FeatureFile deserialize_features(const std::vector<std::uint8_t>& bytes, const std::string& ctx) {
    if (bytes.size() < 17 || std::memcmp(bytes.data(), "FTRV", 4) != 0)
        throw DataError(ctx + ": not a .ftr file (bad magic)");
    if (get_u32(bytes.data() + 4) != kFormatVersion)
        throw DataError(ctx + ": unsupported .ftr version");
    FeatureFile f;
    f.dim = get_u32(bytes.data() + 8);
    const std::uint8_t kind = bytes[12];
    if (kind > 2) throw DataError(ctx + ": unknown descriptor kind tag");
    f.kind = static_cast<DescriptorKind>(kind);
    const std::uint32_t count = get_u32(bytes.data() + 13);
    if (bytes.size() != 17 + static_cast<std::size_t>(count) * f.dim * 4)
        throw DataError(ctx + ": truncated .ftr payload");
    const std::uint8_t* p = bytes.data() + 17;
    f.rows.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        f.rows[i].resize(f.dim);
        for (std::uint32_t j = 0; j < f.dim; ++j, p += 4) f.rows[i][j] = get_f32(p);
    }
    return f;
}

void write_features(const FeatureFile& f, const std::filesystem::path& path) {
    write_bytes(serialize_features(f), path);
}
FeatureFile read_features(const std::filesystem::path& path) {
    return deserialize_features(read_bytes(path), path.string());
}

std::vector<std::uint8_t> serialize_pca(const PcaModel& m) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'P', 'C', 'A', 'M'});
    put_u32(out, kFormatVersion);
    put_u32(out, m.output_dim);
    put_u32(out, m.input_dim);
    for (float v : m.mean) put_f32(out, v);
    for (float v : m.projection) put_f32(out, v);
    return out;
}

PcaModel deserialize_pca(const std::vector<std::uint8_t>& bytes, const std::string& ctx) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), "PCAM", 4) != 0)
        throw DataError(ctx + ": not a PCA model file (bad magic)");
    if (get_u32(bytes.data() + 4) != kFormatVersion)
        throw DataError(ctx + ": unsupported PCA model version");
    PcaModel m;
    m.output_dim = get_u32(bytes.data() + 8);
    m.input_dim = get_u32(bytes.data() + 12);
    const std::size_t need = 16 + (static_cast<std::size_t>(m.input_dim) +
                                   static_cast<std::size_t>(m.output_dim) * m.input_dim) * 4;
    if (bytes.size() != need) throw DataError(ctx + ": truncated PCA model");
    const std::uint8_t* p = bytes.data() + 16;
    m.mean.resize(m.input_dim);
    for (std::uint32_t j = 0; j < m.input_dim; ++j, p += 4) m.mean[j] = get_f32(p);
    m.projection.resize(static_cast<std::size_t>(m.output_dim) * m.input_dim);
    for (std::size_t j = 0; j < m.projection.size(); ++j, p += 4) m.projection[j] = get_f32(p);
    return m;
}

void write_pca(const PcaModel& m, const std::filesystem::path& path) {
    write_bytes(serialize_pca(m), path);
}
PcaModel read_pca(const std::filesystem::path& path) {
    return deserialize_pca(read_bytes(path), path.string());
}

std::vector<std::uint8_t> serialize_codebook(const Codebook& cb) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'C', 'D', 'B', 'K'});
    put_u32(out, kFormatVersion);
    put_u32(out, cb.k);
    put_u32(out, cb.dim);
    for (float v : cb.centers) put_f32(out, v);
    return out;
}

Codebook deserialize_codebook(const std::vector<std::uint8_t>& bytes, const std::string& ctx) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), "CDBK", 4) != 0)
        throw DataError(ctx + ": not a codebook file (bad magic)");
    if (get_u32(bytes.data() + 4) != kFormatVersion)
        throw DataError(ctx + ": unsupported codebook version");
    Codebook cb;
    cb.k = get_u32(bytes.data() + 8);
    cb.dim = get_u32(bytes.data() + 12);
    if (bytes.size() != 16 + static_cast<std::size_t>(cb.k) * cb.dim * 4)
        throw DataError(ctx + ": truncated codebook");
    const std::uint8_t* p = bytes.data() + 16;
    cb.centers.resize(static_cast<std::size_t>(cb.k) * cb.dim);
    for (std::size_t j = 0; j < cb.centers.size(); ++j, p += 4) cb.centers[j] = get_f32(p);
    return cb;
}

void write_codebook(const Codebook& cb, const std::filesystem::path& path) {
    write_bytes(serialize_codebook(cb), path);
}
Codebook read_codebook(const std::filesystem::path& path) {
    return deserialize_codebook(read_bytes(path), path.string());
}

}  // namespace depthpipe

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"

#include "depthpipe/errors.hpp"
#include "depthpipe/features.hpp"
#include "test_util.hpp"

using namespace depthpipe;
using testutil::TempDir;
using testutil::make_frame;
using testutil::random_vector;

namespace {

DepthFrame random_frame(std::mt19937_64& rng, std::uint32_t width, std::uint32_t height) {
    std::uniform_real_distribution<float> dist(0.1f, 5.0f);
    DepthFrame f;
    f.width = width;
    f.height = height;
    f.values.resize(static_cast<std::size_t>(width) * height);
    for (float& v : f.values) v = dist(rng);
    return f;
}

LcdSet random_descriptors(std::mt19937_64& rng, std::size_t count, std::size_t dim) {
    LcdSet set;
    set.reserve(count);
    for (std::size_t i = 0; i < count; ++i) set.push_back(random_vector(rng, dim, -2.0f, 2.0f));
    return set;
}

double l2(const std::vector<float>& v) {
    double acc = 0.0;
    for (float x : v) acc += static_cast<double>(x) * x;
    return std::sqrt(acc);
}

/// Straight-line VLAD used as an oracle: explicit nearest-center search and
/// block arithmetic with no shared code with the library implementation.
std::vector<double> vlad_oracle(const LcdSet& descriptors, const Codebook& cb) {
    const std::size_t d = cb.dim;
    std::vector<double> blocks(static_cast<std::size_t>(cb.k) * d, 0.0);
    for (const auto& x : descriptors) {
        std::uint32_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::uint32_t c = 0; c < cb.k; ++c) {
            double dist = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = static_cast<double>(x[j]) - cb.centers[c * d + j];
                dist += diff * diff;
            }
            if (dist < best) {
                best = dist;
                nearest = c;
            }
        }
        for (std::size_t j = 0; j < d; ++j)
            blocks[nearest * d + j] += static_cast<double>(x[j]) - cb.centers[nearest * d + j];
    }
    for (std::uint32_t c = 0; c < cb.k; ++c) {
        double n2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) n2 += blocks[c * d + j] * blocks[c * d + j];
        if (n2 > 0.0)
            for (std::size_t j = 0; j < d; ++j) blocks[c * d + j] /= std::sqrt(n2);
    }
    double n2 = 0.0;
    for (double v : blocks) n2 += v * v;
    if (n2 > 0.0)
        for (double& v : blocks) v /= std::sqrt(n2);
    return blocks;
}

}  // namespace

TEST_CASE("ToyExtractor dimensions match its declaration") {
    std::mt19937_64 rng(1);
    const ToyExtractor ex(96, 4, 8);
    const DepthFrame frame = random_frame(rng, 13, 11);
    const FrameFeatures f = extract_frame_features(frame, ex);
    CHECK(f.flat.size() == 96);
    CHECK(f.map.height == 4);
    CHECK(f.map.width == 4);
    CHECK(f.map.channels == 8);
    CHECK(f.map.data.size() == 4 * 4 * 8);

    const FrameFeatures again = extract_frame_features(frame, ex);
    CHECK(f.flat == again.flat);
    CHECK(f.map.data == again.map.data);

    CHECK_THROWS_AS(ToyExtractor(0, 4, 8), ConfigError);
    CHECK(make_extractor("toy", 64, 4, 8)->name() == "toy");
    CHECK_THROWS_AS(make_extractor("vgg", 64, 4, 8), ConfigError);
}

TEST_CASE("ToyExtractor zero and constant frames") {
    const ToyExtractor ex(32, 3, 8);
    const DepthFrame zero = make_frame(6, 6, std::vector<float>(36, 0.0f));
    const FrameFeatures fz = ex.extract(zero);
    for (float v : fz.flat) CHECK(v == 0.0f);
    for (float v : fz.map.data) CHECK(v == 0.0f);

    // Constant input: derivative channels vanish, value and percentile
    // channels equal the constant. Channels cycle value,|dx|,|dy|,p95.
    const DepthFrame constant = make_frame(6, 6, std::vector<float>(36, 2.5f));
    const FrameFeatures fc = ex.extract(constant);
    for (std::size_t i = 0; i < fc.flat.size(); ++i)
        CHECK(fc.flat[i] == (i % 3 == 0 ? 2.5f : 0.0f));
    for (std::uint32_t i = 0; i < 3; ++i)
        for (std::uint32_t j = 0; j < 3; ++j)
            for (std::uint32_t c = 0; c < 8; ++c)
                CHECK(fc.map.at(i, j, c) == (c % 4 == 0 || c % 4 == 3 ? 2.5f : 0.0f));
}

TEST_CASE("extract_frame_features rejects extractors that break their declaration") {
    struct Lying : FrameExtractor {
        std::uint32_t flat_dim() const override { return 5; }
        std::uint32_t map_height() const override { return 1; }
        std::uint32_t map_width() const override { return 1; }
        std::uint32_t map_channels() const override { return 1; }
        std::string name() const override { return "lying"; }
        FrameFeatures extract(const DepthFrame&) const override {
            FrameFeatures f;
            f.flat.assign(4, 0.0f);  // declared 5
            f.map.height = f.map.width = f.map.channels = 1;
            f.map.data.assign(1, 0.0f);
            return f;
        }
    };
    const DepthFrame frame = make_frame(2, 2, {1.0f, 2.0f, 3.0f, 4.0f});
    CHECK_THROWS_AS(extract_frame_features(frame, Lying{}), ConfigError);
}

TEST_CASE("lcd unrolls spatial cells into channel vectors") {
    FeatureMap map;
    map.height = 2;
    map.width = 3;
    map.channels = 2;
    map.data.resize(12);
    std::iota(map.data.begin(), map.data.end(), 0.0f);
    const LcdSet set = lcd(map);
    REQUIRE(set.size() == 6);
    // Descriptor i*W+j is the channel vector at cell (i, j).
    CHECK(set[0] == std::vector<float>{0.0f, 1.0f});
    CHECK(set[2] == std::vector<float>{4.0f, 5.0f});
    CHECK(set[5] == std::vector<float>{10.0f, 11.0f});

    FeatureMap tiny;
    tiny.height = 1;
    tiny.width = 1;
    tiny.channels = 3;
    tiny.data = {7.0f, 8.0f, 9.0f};
    const LcdSet one = lcd(tiny);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == tiny.data);
}

TEST_CASE("spp_augment appends max-pooled pyramid descriptors") {
    std::mt19937_64 rng(2);
    FeatureMap map;
    map.height = 7;
    map.width = 7;
    map.channels = 5;
    map.data = random_vector(rng, 7 * 7 * 5);

    CHECK(spp_augment(map, {}).size() == 49);
    CHECK(spp_augment(map, {1}).size() == 50);
    const LcdSet set = spp_augment(map, {1, 2});
    REQUIRE(set.size() == 54);

    // The level-1 descriptor is the channelwise maximum over the whole map.
    const std::vector<float>& global = set[49];
    for (std::uint32_t c = 0; c < 5; ++c) {
        float mx = -1e30f;
        for (std::uint32_t i = 0; i < 7; ++i)
            for (std::uint32_t j = 0; j < 7; ++j) mx = std::max(mx, map.at(i, j, c));
        CHECK(global[c] == mx);
    }

    // Level-2 cell (0,0) pools the earliest-heavy 4x4 corner.
    const std::vector<float>& corner = set[50];
    for (std::uint32_t c = 0; c < 5; ++c) {
        float mx = -1e30f;
        for (std::uint32_t i = 0; i < 4; ++i)
            for (std::uint32_t j = 0; j < 4; ++j) mx = std::max(mx, map.at(i, j, c));
        CHECK(corner[c] == mx);
    }

    CHECK_THROWS_AS(spp_augment(map, {8}), std::invalid_argument);
    CHECK_THROWS_AS(spp_augment(map, {0}), std::invalid_argument);
}

TEST_CASE("fit_pca rows are orthonormal with deterministic sign") {
    std::mt19937_64 rng(3);
    const LcdSet data = random_descriptors(rng, 60, 6);
    const PcaModel m = fit_pca(data, 4);
    REQUIRE(m.output_dim == 4);
    REQUIRE(m.input_dim == 6);
    for (std::uint32_t a = 0; a < 4; ++a)
        for (std::uint32_t b = 0; b < 4; ++b) {
            double dot = 0.0;
            for (std::uint32_t j = 0; j < 6; ++j)
                dot += static_cast<double>(m.projection[a * 6 + j]) * m.projection[b * 6 + j];
            CHECK(std::fabs(dot - (a == b ? 1.0 : 0.0)) < 1e-6);
        }
    for (std::uint32_t r = 0; r < 4; ++r) {
        std::size_t imax = 0;
        for (std::uint32_t j = 1; j < 6; ++j)
            if (std::fabs(m.projection[r * 6 + j]) > std::fabs(m.projection[r * 6 + imax]))
                imax = j;
        CHECK(m.projection[r * 6 + imax] > 0.0f);
    }

    const PcaModel again = fit_pca(data, 4);
    CHECK(m.projection == again.projection);
    CHECK(m.mean == again.mean);
}

TEST_CASE("fit_pca recovers an exact low-dimensional subspace") {
    std::mt19937_64 rng(4);
    // Points live exactly in span{u, v} around a fixed mean.
    const std::size_t c = 8;
    std::vector<double> u(c), v(c), mu(c);
    for (std::size_t j = 0; j < c; ++j) {
        u[j] = std::sin(0.7 * j + 0.3);
        v[j] = std::cos(1.3 * j);
        mu[j] = 0.1 * j;
    }
    LcdSet data;
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int i = 0; i < 80; ++i) {
        const double a = coef(rng), b = coef(rng);
        std::vector<float> x(c);
        for (std::size_t j = 0; j < c; ++j)
            x[j] = static_cast<float>(mu[j] + a * u[j] + b * v[j]);
        data.push_back(std::move(x));
    }
    const PcaModel m = fit_pca(data, 2);
    double worst = 0.0;
    for (const auto& x : data) {
        const std::vector<float> z = pca_transform(m, x);
        for (std::size_t j = 0; j < c; ++j) {
            double rec = m.mean[j];
            for (std::uint32_t r = 0; r < 2; ++r)
                rec += static_cast<double>(z[r]) * m.projection[r * c + j];
            worst = std::max(worst, std::fabs(rec - x[j]));
        }
    }
    CHECK(worst < 1e-5);  // f32 model storage bounds the recovery error
}

TEST_CASE("fit_pca orders components by decreasing variance") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        // Anisotropic data: coordinate j has standard deviation ~ 1/(j+1).
        LcdSet data;
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < 120; ++i) {
            std::vector<float> x(5);
            for (std::size_t j = 0; j < 5; ++j)
                x[j] = static_cast<float>(gauss(rng) / static_cast<double>(j + 1));
            data.push_back(std::move(x));
        }
        const PcaModel m = fit_pca(data, 5);
        const LcdSet z = pca_transform_all(m, data);
        std::vector<double> var(5, 0.0);
        for (const auto& row : z)
            for (std::size_t j = 0; j < 5; ++j)
                var[j] += static_cast<double>(row[j]) * row[j];
        for (std::size_t j = 0; j + 1 < 5; ++j) CHECK(var[j] >= var[j + 1] - 1e-9);
    }
}

TEST_CASE("fit_pca with d = C preserves pairwise distances") {
    std::mt19937_64 rng(6);
    const LcdSet data = random_descriptors(rng, 40, 5);
    const PcaModel m = fit_pca(data, 5);
    const LcdSet z = pca_transform_all(m, data);
    for (std::size_t a = 0; a < data.size(); a += 7)
        for (std::size_t b = a + 1; b < data.size(); b += 5) {
            double din = 0.0, dout = 0.0;
            for (std::size_t j = 0; j < 5; ++j) {
                din += std::pow(static_cast<double>(data[a][j]) - data[b][j], 2);
                dout += std::pow(static_cast<double>(z[a][j]) - z[b][j], 2);
            }
            CHECK(std::sqrt(dout) == doctest::Approx(std::sqrt(din)).epsilon(1e-6));
        }
}

TEST_CASE("pca_transform agrees with the explicit affine map") {
    std::mt19937_64 rng(7);
    const LcdSet data = random_descriptors(rng, 50, 6);
    const PcaModel m = fit_pca(data, 3);

    // The mean maps to the origin; mean + row r maps to e_r.
    const std::vector<float> at_mean = pca_transform(m, m.mean);
    for (float v : at_mean) CHECK(std::fabs(v) < 1e-6f);
    std::vector<float> shifted(m.mean);
    for (std::size_t j = 0; j < 6; ++j) shifted[j] += m.projection[1 * 6 + j];
    const std::vector<float> e1 = pca_transform(m, shifted);
    for (std::size_t r = 0; r < 3; ++r)
        CHECK(std::fabs(e1[r] - (r == 1 ? 1.0f : 0.0f)) < 1e-5f);

    const std::vector<float> x = random_vector(rng, 6);
    const std::vector<float> z = pca_transform(m, x);
    for (std::uint32_t r = 0; r < 3; ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < 6; ++j)
            acc += static_cast<double>(m.projection[r * 6 + j]) *
                   (static_cast<double>(x[j]) - static_cast<double>(m.mean[j]));
        CHECK(std::fabs(z[r] - acc) < 1e-6);
    }

    CHECK_THROWS_AS(pca_transform(m, random_vector(rng, 5)), std::invalid_argument);
}

TEST_CASE("fit_pca input validation") {
    std::mt19937_64 rng(8);
    CHECK_THROWS_AS(fit_pca({}, 2), std::invalid_argument);
    CHECK_THROWS_AS(fit_pca(random_descriptors(rng, 3, 4), 5), std::invalid_argument);
    CHECK_THROWS_AS(fit_pca(random_descriptors(rng, 2, 4), 3), std::invalid_argument);
    LcdSet ragged = random_descriptors(rng, 4, 4);
    ragged[2].pop_back();
    CHECK_THROWS_AS(fit_pca(ragged, 2), std::invalid_argument);
}

TEST_CASE("fit_codebook recovers well-separated cluster means") {
    std::mt19937_64 rng(9);
    const std::vector<std::vector<double>> true_means{{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};
    LcdSet data;
    std::normal_distribution<double> jitter(0.0, 0.01);
    for (int i = 0; i < 60; ++i) {
        const auto& mu = true_means[i % 3];
        data.push_back({static_cast<float>(mu[0] + jitter(rng)),
                        static_cast<float>(mu[1] + jitter(rng))});
    }
    const Codebook cb = fit_codebook(data, 3, 7);
    REQUIRE(cb.k == 3);
    std::set<std::size_t> matched;
    for (std::uint32_t c = 0; c < 3; ++c) {
        double best = 1e30;
        std::size_t best_m = 0;
        for (std::size_t m = 0; m < 3; ++m) {
            const double d = std::hypot(cb.centers[c * 2] - true_means[m][0],
                                        cb.centers[c * 2 + 1] - true_means[m][1]);
            if (d < best) {
                best = d;
                best_m = m;
            }
        }
        CHECK(best < 1e-2);
        matched.insert(best_m);
    }
    CHECK(matched.size() == 3);  // one center per true cluster
}

TEST_CASE("fit_codebook with k equal to the point count returns the points") {
    LcdSet data{{0.0f, 0.0f}, {1.0f, 1.0f}, {2.0f, 0.0f}, {3.0f, 2.0f}};
    const Codebook cb = fit_codebook(data, 4, 5);
    std::set<std::pair<float, float>> got, want;
    for (std::uint32_t c = 0; c < 4; ++c) got.insert({cb.centers[c * 2], cb.centers[c * 2 + 1]});
    for (const auto& p : data) want.insert({p[0], p[1]});
    CHECK(got == want);
}

TEST_CASE("fit_codebook is deterministic and keeps centers distinct") {
    std::mt19937_64 rng(10);
    const LcdSet data = random_descriptors(rng, 70, 3);
    const Codebook a = fit_codebook(data, 6, 42);
    const Codebook b = fit_codebook(data, 6, 42);
    CHECK(a.centers == b.centers);

    // Duplicate-heavy data still yields k distinct centers when the input has
    // at least k distinct points (empty clusters are re-seeded).
    LcdSet dup;
    for (int i = 0; i < 12; ++i) dup.push_back({0.0f});
    dup.push_back({1.0f});
    dup.push_back({2.0f});
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 9ull}) {
        const Codebook cb = fit_codebook(dup, 3, seed);
        std::set<float> centers(cb.centers.begin(), cb.centers.end());
        CHECK(centers.size() == 3);
    }

    CHECK_THROWS_AS(fit_codebook(data, 71, 1), std::invalid_argument);
    CHECK_THROWS_AS(fit_codebook(data, 0, 1), std::invalid_argument);
}

TEST_CASE("vlad_encode matches the brute-force oracle") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t d = 2 + rng() % 6;
        const std::uint32_t k = 2 + static_cast<std::uint32_t>(rng() % 5);
        const LcdSet descriptors = random_descriptors(rng, 20 + rng() % 60, d);
        Codebook cb;
        cb.k = k;
        cb.dim = static_cast<std::uint32_t>(d);
        cb.centers = random_vector(rng, static_cast<std::size_t>(k) * d, -2.0f, 2.0f);

        const VideoDescriptor got = vlad_encode(descriptors, cb);
        const std::vector<double> want = vlad_oracle(descriptors, cb);
        REQUIRE(got.vector.size() == want.size());
        CHECK(got.kind == DescriptorKind::Vlad);
        double max_dev = 0.0;
        for (std::size_t i = 0; i < want.size(); ++i)
            max_dev = std::max(max_dev, std::fabs(static_cast<double>(got.vector[i]) - want[i]));
        CHECK(max_dev < 1e-6);
        const double norm = l2(got.vector);
        CHECK((std::fabs(norm - 1.0) < 1e-6 || norm == 0.0));
    }
}

TEST_CASE("vlad_encode is exactly permutation invariant") {
    std::mt19937_64 rng(12);
    LcdSet descriptors = random_descriptors(rng, 40, 4);
    Codebook cb;
    cb.k = 5;
    cb.dim = 4;
    cb.centers = random_vector(rng, 20, -2.0f, 2.0f);
    const VideoDescriptor base = vlad_encode(descriptors, cb);
    for (int rep = 0; rep < 5; ++rep) {
        std::shuffle(descriptors.begin(), descriptors.end(), rng);
        const VideoDescriptor shuffled = vlad_encode(descriptors, cb);
        CHECK(base.vector == shuffled.vector);
    }
}

TEST_CASE("vlad_encode assignment ties break toward the lowest center index") {
    // A descriptor equidistant from centers -1 and +1 joins center 0.
    Codebook cb;
    cb.k = 2;
    cb.dim = 1;
    cb.centers = {-1.0f, 1.0f};
    const VideoDescriptor out = vlad_encode(LcdSet{{0.0f}}, cb);
    REQUIRE(out.vector.size() == 2);
    CHECK(out.vector[0] == 1.0f);
    CHECK(out.vector[1] == 0.0f);
}

TEST_CASE("vlad_encode degenerate cases") {
    Codebook cb;
    cb.k = 2;
    cb.dim = 2;
    cb.centers = {0.0f, 0.0f, 3.0f, 4.0f};

    // Descriptors sitting exactly on centers leave zero residuals.
    const VideoDescriptor zero = vlad_encode(LcdSet{{0.0f, 0.0f}, {3.0f, 4.0f}}, cb);
    for (float v : zero.vector) CHECK(v == 0.0f);

    CHECK_THROWS_AS(vlad_encode(LcdSet{}, cb), std::invalid_argument);
    CHECK_THROWS_AS(vlad_encode(LcdSet{{1.0f}}, cb), std::invalid_argument);

    // Intra-normalized blocks have norm zero or one.
    std::mt19937_64 rng(13);
    const LcdSet descriptors = random_descriptors(rng, 25, 2);
    const std::vector<double> blocks = vlad_blocks(descriptors, cb);
    for (std::uint32_t c = 0; c < cb.k; ++c) {
        double n2 = 0.0;
        for (std::uint32_t j = 0; j < cb.dim; ++j)
            n2 += blocks[c * cb.dim + j] * blocks[c * cb.dim + j];
        CHECK((std::fabs(n2 - 1.0) < 1e-9 || n2 == 0.0));
    }
}

TEST_CASE("fc6_pool averages then normalizes") {
    // A single already-normalized vector passes through.
    const std::vector<float> unit{0.6f, 0.8f};
    const VideoDescriptor single = fc6_pool({unit});
    CHECK(single.kind == DescriptorKind::Fc6Pooled);
    CHECK(single.vector[0] == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(single.vector[1] == doctest::Approx(0.8).epsilon(1e-6));

    // Opposite vectors cancel to the zero descriptor.
    const VideoDescriptor zero = fc6_pool({{1.0f, -2.0f}, {-1.0f, 2.0f}});
    CHECK(zero.vector == std::vector<float>{0.0f, 0.0f});

    std::mt19937_64 rng(14);
    std::vector<std::vector<float>> flats;
    for (int i = 0; i < 9; ++i) flats.push_back(random_vector(rng, 12));
    const VideoDescriptor pooled = fc6_pool(flats);
    std::vector<double> mean(12, 0.0);
    for (const auto& v : flats)
        for (std::size_t j = 0; j < 12; ++j) mean[j] += v[j];
    double n2 = 0.0;
    for (double& m : mean) {
        m /= flats.size();
        n2 += m * m;
    }
    for (std::size_t j = 0; j < 12; ++j)
        CHECK(std::fabs(pooled.vector[j] - mean[j] / std::sqrt(n2)) < 1e-6);
    CHECK(l2(pooled.vector) == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(fc6_pool({}), std::invalid_argument);
    CHECK_THROWS_AS(fc6_pool({{1.0f, 2.0f}, {1.0f}}), std::invalid_argument);
}

TEST_CASE("early_fuse concatenates flat block first") {
    VideoDescriptor a;
    a.kind = DescriptorKind::Fc6Pooled;
    a.vector = {1.0f, 2.0f};
    VideoDescriptor b;
    b.kind = DescriptorKind::Vlad;
    b.vector = {3.0f, 4.0f, 5.0f};
    const VideoDescriptor f = early_fuse(a, b);
    CHECK(f.kind == DescriptorKind::EarlyFused);
    CHECK(f.vector == std::vector<float>{1.0f, 2.0f, 3.0f, 4.0f, 5.0f});

    // A zero block beside a unit block keeps norm 1.
    a.vector = {0.0f, 0.0f};
    b.vector = {0.6f, 0.8f, 0.0f};
    CHECK(l2(early_fuse(a, b).vector) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("feature file round trip is bit exact") {
    TempDir dir("ftr");
    std::mt19937_64 rng(15);
    FeatureFile f;
    f.kind = DescriptorKind::Vlad;
    f.dim = 6;
    for (int i = 0; i < 5; ++i) f.rows.push_back(random_vector(rng, 6));
    write_features(f, dir / "x.ftr");
    const FeatureFile back = read_features(dir / "x.ftr");
    CHECK(back.kind == f.kind);
    CHECK(back.dim == f.dim);
    CHECK(back.rows == f.rows);

    FeatureFile ragged = f;
    ragged.rows[2].pop_back();
    CHECK_THROWS_AS(serialize_features(ragged), std::invalid_argument);

    std::vector<std::uint8_t> bytes = serialize_features(f);
    bytes[0] = 'X';
    CHECK_THROWS_AS(deserialize_features(bytes, "ctx"), DataError);
    bytes[0] = 'F';
    bytes.pop_back();
    CHECK_THROWS_WITH_AS(deserialize_features(bytes, "ctx"), doctest::Contains("truncated"),
                         DataError);
}

TEST_CASE("pca and codebook model round trips are bit exact") {
    TempDir dir("models");
    std::mt19937_64 rng(16);

    const PcaModel m = fit_pca(random_descriptors(rng, 30, 5), 3);
    write_pca(m, dir / "p.bin");
    const PcaModel mb = read_pca(dir / "p.bin");
    CHECK(mb.input_dim == m.input_dim);
    CHECK(mb.output_dim == m.output_dim);
    CHECK(mb.mean == m.mean);
    CHECK(mb.projection == m.projection);

    const Codebook cb = fit_codebook(random_descriptors(rng, 40, 3), 4, 7);
    write_codebook(cb, dir / "c.bin");
    const Codebook cbb = read_codebook(dir / "c.bin");
    CHECK(cbb.k == cb.k);
    CHECK(cbb.dim == cb.dim);
    CHECK(cbb.centers == cb.centers);

    std::vector<std::uint8_t> bad = serialize_pca(m);
    bad[2] = 'X';
    CHECK_THROWS_AS(deserialize_pca(bad, "ctx"), DataError);
    std::vector<std::uint8_t> short_cb = serialize_codebook(cb);
    short_cb.resize(short_cb.size() - 2);
    CHECK_THROWS_AS(deserialize_codebook(short_cb, "ctx"), DataError);
}

TEST_CASE("whitened pca scales components to unit variance") {
    std::mt19937_64 rng(17);
    LcdSet data;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        std::vector<float> x(4);
        for (std::size_t j = 0; j < 4; ++j)
            x[j] = static_cast<float>(gauss(rng) * (4.0 - j));
        data.push_back(std::move(x));
    }
    const PcaModel m = fit_pca(data, 3, true);
    const LcdSet z = pca_transform_all(m, data);
    for (std::size_t j = 0; j < 3; ++j) {
        double var = 0.0;
        for (const auto& row : z) var += static_cast<double>(row[j]) * row[j];
        var /= static_cast<double>(z.size());
        CHECK(var == doctest::Approx(1.0).epsilon(0.05));
    }
}

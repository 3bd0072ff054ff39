#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "depthpipe/classify.hpp"
#include "depthpipe/errors.hpp"
#include "test_util.hpp"

using namespace depthpipe;
using testutil::TempDir;

namespace {

VideoDescriptor desc(std::vector<float> v) {
    VideoDescriptor d;
    d.vector = std::move(v);
    return d;
}

/// Labeled samples drawn from tight Gaussian clusters, one per class.
std::vector<std::pair<VideoDescriptor, std::string>> cluster_samples(
    std::mt19937_64& rng, const std::vector<std::pair<std::vector<float>, std::string>>& clusters,
    std::size_t per_class, double sigma = 0.1) {
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<std::pair<VideoDescriptor, std::string>> samples;
    for (std::size_t i = 0; i < per_class; ++i)
        for (const auto& [center, label] : clusters) {
            std::vector<float> x(center);
            for (float& v : x) v += static_cast<float>(noise(rng));
            samples.push_back({desc(std::move(x)), label});
        }
    return samples;
}

double train_accuracy(const LinearSvmModel& m,
                      const std::vector<std::pair<VideoDescriptor, std::string>>& samples) {
    std::vector<VideoDescriptor> feats;
    std::vector<std::string> ids, labels;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        feats.push_back(samples[i].first);
        ids.push_back("v" + std::to_string(i));
        labels.push_back(samples[i].second);
    }
    return top1_accuracy(predict_proba(m, feats, ids), labels);
}

ProbabilityMatrix make_mat(std::vector<std::string> ids, std::vector<std::string> classes,
                           std::vector<std::vector<float>> rows) {
    ProbabilityMatrix m;
    m.video_ids = std::move(ids);
    m.classes = std::move(classes);
    m.rows = std::move(rows);
    return m;
}

}  // namespace

TEST_CASE("train_svm separates labeled clusters") {
    std::mt19937_64 rng(21);
    const auto two = cluster_samples(rng, {{{2.0f, 0.0f}, "pos"}, {{-2.0f, 0.0f}, "neg"}}, 15);
    const LinearSvmModel m2 = train_svm(two, 1.0, 5);
    CHECK(m2.classes == std::vector<std::string>{"neg", "pos"});
    CHECK(train_accuracy(m2, two) == 1.0);

    const auto three = cluster_samples(
        rng, {{{2.0f, 0.0f}, "walk"}, {{-2.0f, 0.0f}, "sit"}, {{0.0f, 2.0f}, "wave"}}, 15);
    const LinearSvmModel m3 = train_svm(three, 1.0, 5);
    CHECK(m3.classes == std::vector<std::string>{"sit", "walk", "wave"});
    CHECK(m3.weights.size() == 3);
    CHECK(m3.biases.size() == 3);
    CHECK(train_accuracy(m3, three) == 1.0);
}

TEST_CASE("train_svm objective traces decrease monotonically") {
    std::mt19937_64 rng(22);
    const auto samples =
        cluster_samples(rng, {{{1.0f, 0.5f}, "a"}, {{-0.5f, -1.0f}, "b"}}, 20, 0.5);
    const LinearSvmModel m = train_svm(samples, 1.0, 11);
    REQUIRE(m.objective_traces.size() == 2);
    for (const auto& trace : m.objective_traces) {
        REQUIRE(!trace.empty());
        CHECK(trace.size() <= 1000);
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9);
    }
}

TEST_CASE("train_svm is deterministic for a fixed seed") {
    std::mt19937_64 rng(23);
    const auto samples = cluster_samples(rng, {{{1.0f}, "a"}, {{-1.0f}, "b"}}, 10, 0.3);
    const LinearSvmModel a = train_svm(samples, 1.0, 42);
    const LinearSvmModel b = train_svm(samples, 1.0, 42);
    CHECK(a.weights == b.weights);
    CHECK(a.biases == b.biases);
}

TEST_CASE("train_svm tolerates contradictory labels without separating them") {
    std::mt19937_64 rng(24);
    auto samples = cluster_samples(rng, {{{2.0f}, "a"}, {{-2.0f}, "b"}}, 5);
    // The same point under both labels can never be classified consistently.
    samples.push_back({desc({0.5f}), "a"});
    samples.push_back({desc({0.5f}), "b"});
    const LinearSvmModel m = train_svm(samples, 1.0, 3);
    CHECK(train_accuracy(m, samples) < 1.0);
    CHECK(train_accuracy(m, samples) >= 0.5);
}

TEST_CASE("train_svm input validation") {
    CHECK_THROWS_AS(train_svm({}, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(train_svm({{desc({1.0f}), "a"}, {desc({2.0f}), "a"}}, 1.0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(train_svm({{desc({1.0f}), "a"}, {desc({2.0f, 3.0f}), "b"}}, 1.0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(train_svm({{desc({1.0f}), "a"}, {desc({2.0f}), "b"}}, 0.0, 0),
                    std::invalid_argument);
}

TEST_CASE("predict_proba of the zero model is uniform") {
    LinearSvmModel m;
    m.classes = {"a", "b", "c"};
    m.weights = {{0.0f, 0.0f}, {0.0f, 0.0f}, {0.0f, 0.0f}};
    m.biases = {0.0f, 0.0f, 0.0f};
    const ProbabilityMatrix p = predict_proba(m, {desc({3.0f, -1.0f})}, {"v"});
    REQUIRE(p.rows.size() == 1);
    for (float v : p.rows[0]) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("predict_proba matches the closed-form two-class softmax") {
    // Margins (10, 0): p = (1/(1+e^-10), e^-10/(1+e^-10)).
    LinearSvmModel m;
    m.classes = {"a", "b"};
    m.weights = {{1.0f}, {0.0f}};
    m.biases = {0.0f, 0.0f};
    const ProbabilityMatrix p = predict_proba(m, {desc({10.0f})}, {"v"});
    const double e = std::exp(-10.0);
    CHECK(std::fabs(p.rows[0][0] - 1.0 / (1.0 + e)) < 1e-6);
    CHECK(std::fabs(p.rows[0][1] - e / (1.0 + e)) < 1e-6);
}

TEST_CASE("predict_proba is invariant to a common margin shift") {
    // Dyadic weights, biases, and inputs keep every margin sum exact, so the
    // shifted margins differ by exactly 5 and the max-subtracted softmax
    // arguments are bitwise identical.
    LinearSvmModel m;
    m.classes = {"a", "b"};
    m.weights = {{0.75f, -0.25f}, {-0.25f, 0.5f}};
    m.biases = {0.125f, -0.5f};
    LinearSvmModel shifted = m;
    for (float& b : shifted.biases) b += 5.0f;
    const std::vector<VideoDescriptor> xs{desc({1.0f, 2.0f}), desc({-3.0f, 0.5f})};
    const ProbabilityMatrix p = predict_proba(m, xs, {"u", "v"});
    const ProbabilityMatrix q = predict_proba(shifted, xs, {"u", "v"});
    CHECK(p.rows == q.rows);
}

TEST_CASE("predict_proba rows lie on the simplex and keep the margin argmax") {
    std::mt19937_64 rng(25);
    LinearSvmModel m;
    m.classes = {"a", "b", "c", "d"};
    for (int c = 0; c < 4; ++c) {
        m.weights.push_back(testutil::random_vector(rng, 6));
        m.biases.push_back(testutil::random_vector(rng, 1)[0]);
    }
    std::vector<VideoDescriptor> xs;
    std::vector<std::string> ids;
    for (int i = 0; i < 12; ++i) {
        xs.push_back(desc(testutil::random_vector(rng, 6)));
        ids.push_back("v" + std::to_string(i));
    }
    const ProbabilityMatrix p = predict_proba(m, xs, ids);
    REQUIRE(p.rows.size() == 12);
    for (std::size_t r = 0; r < 12; ++r) {
        double sum = 0.0;
        for (float v : p.rows[r]) {
            CHECK(v >= 0.0f);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));

        std::vector<double> margins(4, 0.0);
        for (std::size_t c = 0; c < 4; ++c) {
            double acc = static_cast<double>(m.biases[c]);
            for (std::size_t j = 0; j < 6; ++j)
                acc += static_cast<double>(m.weights[c][j]) * xs[r].vector[j];
            margins[c] = acc;
        }
        const auto pm = std::max_element(p.rows[r].begin(), p.rows[r].end());
        const auto mm = std::max_element(margins.begin(), margins.end());
        CHECK(pm - p.rows[r].begin() == mm - margins.begin());
    }

    CHECK_THROWS_AS(predict_proba(m, {desc({1.0f})}, {"v"}), std::invalid_argument);
    CHECK_THROWS_AS(predict_proba(m, xs, {"only-one"}), std::invalid_argument);
}

TEST_CASE("fuse_scores identity and fixed point are exact") {
    const ProbabilityMatrix a = make_mat({"u", "v"}, {"x", "y"},
                                         {{0.3f, 0.7f}, {0.9f, 0.1f}});
    const ProbabilityMatrix one = fuse_scores({a}, FusionWeights{{1.0}});
    CHECK(one.rows == a.rows);
    CHECK(one.video_ids == a.video_ids);
    CHECK(one.classes == a.classes);

    // Averaging a matrix with itself reproduces it bit for bit.
    const ProbabilityMatrix half = fuse_scores({a, a}, FusionWeights{{0.5, 0.5}});
    CHECK(half.rows == a.rows);
}

TEST_CASE("fuse_scores matches the explicit weighted average") {
    std::mt19937_64 rng(26);
    std::vector<ProbabilityMatrix> mats;
    for (int s = 0; s < 3; ++s) {
        std::vector<std::vector<float>> rows;
        for (int r = 0; r < 4; ++r) rows.push_back(testutil::random_vector(rng, 3, 0.0f, 1.0f));
        mats.push_back(make_mat({"a", "b", "c", "d"}, {"x", "y", "z"}, std::move(rows)));
    }
    const FusionWeights w{{0.2, 0.3, 0.5}};
    const ProbabilityMatrix fused = fuse_scores(mats, w);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 3; ++c) {
            double want = 0.0;
            for (std::size_t s = 0; s < 3; ++s)
                want += w.weights[s] * static_cast<double>(mats[s].rows[r][c]);
            CHECK(std::fabs(fused.rows[r][c] - want) < 1e-7);
        }
}

TEST_CASE("fuse_scores rejects misaligned matrices") {
    const ProbabilityMatrix a = make_mat({"u", "v"}, {"x", "y"}, {{0.5f, 0.5f}, {0.5f, 0.5f}});
    ProbabilityMatrix b = a;
    b.video_ids[1] = "w";
    CHECK_THROWS_WITH_AS(fuse_scores({a, b}, FusionWeights{{0.5, 0.5}}),
                         doctest::Contains("video_id mismatch at row 1"), std::invalid_argument);
    ProbabilityMatrix c = a;
    c.classes[1] = "z";
    CHECK_THROWS_WITH_AS(fuse_scores({a, c}, FusionWeights{{0.5, 0.5}}),
                         doctest::Contains("class mismatch at column 1"), std::invalid_argument);
    CHECK_THROWS_AS(fuse_scores({a, a}, FusionWeights{{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(fuse_scores({}, FusionWeights{{1.0}}), std::invalid_argument);
}

TEST_CASE("FusionWeights validation") {
    CHECK_NOTHROW((FusionWeights{{0.25, 0.75}}.validate()));
    CHECK_THROWS_AS(FusionWeights{}.validate(), std::invalid_argument);
    CHECK_THROWS_AS((FusionWeights{{0.5, 0.6}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((FusionWeights{{-0.1, 1.1}}.validate()), std::invalid_argument);
}

TEST_CASE("grid_search_weights finds the only working mixture") {
    // Video 1 needs weight > 0.4872 on stream A, video 2 needs < 0.5128;
    // the only grid point at step 0.05 inside that band is 0.5.
    const ProbabilityMatrix a = make_mat({"v1", "v2"}, {"c0", "c1"},
                                         {{0.55f, 0.45f}, {0.5475f, 0.4525f}});
    const ProbabilityMatrix b = make_mat({"v1", "v2"}, {"c0", "c1"},
                                         {{0.4525f, 0.5475f}, {0.45f, 0.55f}});
    const FusionWeights w = grid_search_weights({a, b}, {"c0", "c1"}, 0.05);
    REQUIRE(w.weights.size() == 2);
    CHECK(w.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(top1_accuracy(fuse_scores({a, b}, w), {"c0", "c1"}) == 1.0);
}

TEST_CASE("grid_search_weights needs full weight on a barely-right stream") {
    // Stream A is right by a 0.02 margin, stream B fully confident and wrong:
    // the mixture is correct only for weight_A > 1/1.02, i.e. exactly 1.0.
    const ProbabilityMatrix a = make_mat({"v"}, {"c0", "c1"}, {{0.51f, 0.49f}});
    const ProbabilityMatrix b = make_mat({"v"}, {"c0", "c1"}, {{0.0f, 1.0f}});
    const FusionWeights w = grid_search_weights({a, b}, {"c0"}, 0.05);
    CHECK(w.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.weights[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("grid_search_weights ties resolve to the first enumerated tuple") {
    // Identical streams: every mixture scores the same, so the first
    // candidate (0, 1) survives the strict-improvement rule.
    const ProbabilityMatrix a = make_mat({"v"}, {"c0", "c1"}, {{0.8f, 0.2f}});
    const FusionWeights w = grid_search_weights({a, a}, {"c0"}, 0.25);
    CHECK(w.weights[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(w.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid_search_weights never loses to a single stream") {
    std::mt19937_64 rng(27);
    const std::vector<std::string> classes{"a", "b", "c"};
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<ProbabilityMatrix> mats;
        std::vector<std::string> ids;
        for (int v = 0; v < 6; ++v) ids.push_back("v" + std::to_string(v));
        for (int s = 0; s < 2; ++s) {
            std::vector<std::vector<float>> rows;
            for (int v = 0; v < 6; ++v) {
                std::vector<float> row = testutil::random_vector(rng, 3, 0.01f, 1.0f);
                float sum = row[0] + row[1] + row[2];
                for (float& x : row) x /= sum;
                rows.push_back(std::move(row));
            }
            mats.push_back(make_mat(ids, classes, std::move(rows)));
        }
        std::vector<std::string> labels;
        for (int v = 0; v < 6; ++v) labels.push_back(classes[rng() % 3]);

        const FusionWeights best = grid_search_weights(mats, labels, 0.25);
        const double best_acc = top1_accuracy(fuse_scores(mats, best), labels);
        CHECK(best_acc >= top1_accuracy(mats[0], labels));
        CHECK(best_acc >= top1_accuracy(mats[1], labels));
    }
}

TEST_CASE("grid_search_weights over three streams") {
    std::mt19937_64 rng(28);
    std::vector<ProbabilityMatrix> mats;
    std::vector<std::string> ids{"u", "v", "w"};
    for (int s = 0; s < 3; ++s) {
        std::vector<std::vector<float>> rows;
        for (int v = 0; v < 3; ++v) {
            std::vector<float> row = testutil::random_vector(rng, 2, 0.01f, 1.0f);
            const float sum = row[0] + row[1];
            rows.push_back({row[0] / sum, row[1] / sum});
        }
        mats.push_back(make_mat(ids, {"a", "b"}, std::move(rows)));
    }
    const std::vector<std::string> labels{"a", "b", "a"};
    const FusionWeights w = grid_search_weights(mats, labels, 0.2);
    REQUIRE(w.weights.size() == 3);
    double sum = 0.0;
    for (double x : w.weights) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
        sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    const double best_acc = top1_accuracy(fuse_scores(mats, w), labels);
    for (const auto& m : mats) CHECK(best_acc >= top1_accuracy(m, labels));
}

TEST_CASE("grid_search_weights input validation") {
    const ProbabilityMatrix a = make_mat({"v"}, {"c0", "c1"}, {{0.8f, 0.2f}});
    CHECK_THROWS_WITH_AS(grid_search_weights({a, a}, {"c0"}, 0.3),
                         doctest::Contains("step must divide 1"), std::invalid_argument);
    CHECK_THROWS_AS(grid_search_weights({a}, {"c0"}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(grid_search_weights({a, a, a, a}, {"c0"}, 0.5), std::invalid_argument);
}

TEST_CASE("top1_accuracy counts lowest-index argmax matches") {
    const ProbabilityMatrix peaked = make_mat({"u", "v"}, {"a", "b"},
                                              {{0.9f, 0.1f}, {0.2f, 0.8f}});
    CHECK(top1_accuracy(peaked, {"a", "b"}) == 1.0);
    CHECK(top1_accuracy(peaked, {"b", "b"}) == 0.5);

    // A uniform row predicts the first class, so a "b" label never matches.
    const ProbabilityMatrix uniform = make_mat({"u"}, {"a", "b"}, {{0.5f, 0.5f}});
    CHECK(top1_accuracy(uniform, {"b"}) == 0.0);
    CHECK(top1_accuracy(uniform, {"a"}) == 1.0);

    CHECK_THROWS_WITH_AS(top1_accuracy(uniform, {"zzz"}), doctest::Contains("zzz"),
                         std::invalid_argument);
    CHECK_THROWS_AS(top1_accuracy(uniform, {"a", "b"}), std::invalid_argument);
    CHECK(top1_accuracy(make_mat({}, {"a"}, {}), {}) == 0.0);

    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<std::vector<float>> rows;
        std::vector<std::string> ids, labels;
        const std::vector<std::string> classes{"a", "b", "c"};
        for (int v = 0; v < 10; ++v) {
            rows.push_back(testutil::random_vector(rng, 3, 0.0f, 1.0f));
            ids.push_back("v" + std::to_string(v));
            labels.push_back(classes[rng() % 3]);
        }
        const ProbabilityMatrix mat = make_mat(ids, classes, rows);
        std::size_t hits = 0;
        for (int v = 0; v < 10; ++v) {
            std::size_t arg = 0;
            for (std::size_t c = 1; c < 3; ++c)
                if (rows[v][c] > rows[v][arg]) arg = c;
            if (classes[arg] == labels[v]) ++hits;
        }
        CHECK(top1_accuracy(mat, labels) == doctest::Approx(hits / 10.0).epsilon(1e-12));
    }
}

TEST_CASE("split_evaluate trains and scores per split") {
    // Two clean clusters plus one mislabeled video: it sits in the "a"
    // cluster but carries label "b". split1 hides it in training, split2
    // exposes it at test time.
    std::map<std::string, VideoDescriptor> features{
        {"a1", desc({3.0f, 0.1f})},  {"a2", desc({3.1f, -0.1f})}, {"a3", desc({2.9f, 0.0f})},
        {"b1", desc({-3.0f, 0.1f})}, {"b2", desc({-3.1f, -0.1f})}, {"b3", desc({-2.9f, 0.0f})},
        {"p", desc({3.05f, 0.05f})}};
    DatasetManifest manifest;
    manifest.split_names = {"split1", "split2"};
    auto add = [&](const std::string& id, const std::string& label, SplitAssignment s1,
                   SplitAssignment s2) {
        ManifestEntry e;
        e.video_id = id;
        e.path = id + ".dseq";
        e.label = label;
        e.splits = {{"split1", s1}, {"split2", s2}};
        manifest.entries.push_back(e);
    };
    const auto tr = SplitAssignment::Train;
    const auto te = SplitAssignment::Test;
    add("a1", "a", tr, tr);
    add("a2", "a", tr, tr);
    add("a3", "a", te, te);
    add("b1", "b", tr, tr);
    add("b2", "b", tr, tr);
    add("b3", "b", te, te);
    add("p", "b", tr, te);

    const SplitResults res = split_evaluate(manifest, features, {"split1", "split2"});
    REQUIRE(res.per_split.size() == 2);
    CHECK(res.per_split[0].first == "split1");
    CHECK(res.per_split[1].first == "split2");
    CHECK(res.per_split[0].second == 1.0);
    CHECK(res.per_split[1].second == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(res.mean ==
          doctest::Approx((res.per_split[0].second + res.per_split[1].second) / 2.0)
              .epsilon(1e-12));

    features.erase("p");
    CHECK_THROWS_WITH_AS(split_evaluate(manifest, features, {"split1"}),
                         doctest::Contains("missing descriptor for video_id p"), DataError);
    features["p"] = desc({3.05f, 0.05f});
    CHECK_THROWS_WITH_AS(split_evaluate(manifest, features, {"split9"}),
                         doctest::Contains("no split named split9"), DataError);
}

TEST_CASE("svm model round trip preserves everything but the traces") {
    TempDir dir("svm");
    std::mt19937_64 rng(30);
    const auto samples = cluster_samples(rng, {{{1.5f, 0.0f}, "a"}, {{-1.5f, 0.0f}, "b"}}, 8);
    const LinearSvmModel m = train_svm(samples, 0.5, 9);
    REQUIRE(!m.objective_traces.empty());

    write_svm(m, dir / "m.svm");
    const LinearSvmModel back = read_svm(dir / "m.svm");
    CHECK(back.classes == m.classes);
    CHECK(back.weights == m.weights);
    CHECK(back.biases == m.biases);
    CHECK(back.c_param == 0.5);
    CHECK(back.objective_traces.empty());

    std::vector<std::uint8_t> bytes = serialize_svm(m);
    std::vector<std::uint8_t> bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(deserialize_svm(bad, "ctx"), doctest::Contains("bad magic"), DataError);
    std::vector<std::uint8_t> extra = bytes;
    extra.push_back(0);
    CHECK_THROWS_WITH_AS(deserialize_svm(extra, "ctx"), doctest::Contains("trailing"), DataError);
    std::vector<std::uint8_t> cut = bytes;
    cut.resize(cut.size() - 3);
    CHECK_THROWS_WITH_AS(deserialize_svm(cut, "ctx"), doctest::Contains("truncated"), DataError);

    CHECK_THROWS_AS(read_svm(dir / "nope.svm"), DataError);
}

TEST_CASE("probability csv round trip is bit exact") {
    TempDir dir("probcsv");
    std::mt19937_64 rng(31);
    std::vector<std::vector<float>> rows;
    for (int r = 0; r < 6; ++r) rows.push_back(testutil::random_vector(rng, 3, 0.0f, 1.0f));
    const ProbabilityMatrix mat =
        make_mat({"v0", "v1", "v2", "v3", "v4", "v5"}, {"jump", "sit", "walk"}, rows);
    write_probability_csv(mat, dir / "p.csv");
    const ProbabilityMatrix back = read_probability_csv(dir / "p.csv");
    CHECK(back.video_ids == mat.video_ids);
    CHECK(back.classes == mat.classes);
    CHECK(back.rows == mat.rows);

    CHECK_THROWS_AS(read_probability_csv(dir / "missing.csv"), DataError);

    testutil::write_text(dir / "badhead.csv", "id,a,b\nv,0.5,0.5\n");
    CHECK_THROWS_WITH_AS(read_probability_csv(dir / "badhead.csv"),
                         doctest::Contains("video_id"), DataError);
    testutil::write_text(dir / "short.csv", "video_id,a,b\nv,0.5\n");
    CHECK_THROWS_AS(read_probability_csv(dir / "short.csv"), DataError);
    testutil::write_text(dir / "nan.csv", "video_id,a,b\nv,zero,0.5\n");
    CHECK_THROWS_AS(read_probability_csv(dir / "nan.csv"), DataError);
}

TEST_CASE("results csv text is explicit") {
    TempDir dir("res");
    SplitResults res;
    res.per_split = {{"split1", 0.75}, {"split2", 0.5}};
    res.mean = 0.625;
    write_results_csv(res, dir / "r.csv");
    CHECK(testutil::read_file_text(dir / "r.csv") ==
          "split,accuracy\nsplit1,0.75\nsplit2,0.5\nmean,0.625\n");
}

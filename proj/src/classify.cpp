#include "depthpipe/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "depthpipe/errors.hpp"

namespace depthpipe {

void FusionWeights::validate() const {
    if (weights.empty()) throw std::invalid_argument("FusionWeights: empty");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0 || w > 1.0)
            throw std::invalid_argument("FusionWeights: weight outside [0, 1]");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("FusionWeights: weights must sum to 1");
}

namespace {

// Dual coordinate descent for the L2-regularized hinge-loss binary SVM
// (liblinear's L1-loss dual formulation, bias via augmented feature).
// Returns the per-epoch dual objective 0.5*||w||^2 - sum(alpha).
std::vector<double> solve_binary_dual_cd(const std::vector<const float*>& xs,
                                         const std::vector<double>& x_sq,
                                         const std::vector<signed char>& y, std::size_t dim,
                                         double c, std::uint64_t seed,
                                         std::vector<double>& w_out) {
    const std::size_t n = xs.size();
    constexpr int kMaxEpochs = 1000;
    constexpr double kGapTol = 1e-4;

    std::vector<double> alpha(n, 0.0);
    std::vector<double> w(dim + 1, 0.0);  // last entry is the bias
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);

    std::vector<double> trace;
    for (int epoch = 0; epoch < kMaxEpochs; ++epoch) {
        // Fisher-Yates with the seeded generator.
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[rng() % i]);

        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t i = order[s];
            const float* x = xs[i];
            double dot = w[dim];  // bias feature is 1
            for (std::size_t j = 0; j < dim; ++j) dot += w[j] * x[j];
            const double g = y[i] * dot - 1.0;

            double pg = g;
            if (alpha[i] == 0.0)
                pg = std::min(g, 0.0);
            else if (alpha[i] == c)
                pg = std::max(g, 0.0);
            if (std::fabs(pg) > 1e-12) {
                const double old = alpha[i];
                alpha[i] = std::clamp(old - g / x_sq[i], 0.0, c);
                const double delta = (alpha[i] - old) * y[i];
                for (std::size_t j = 0; j < dim; ++j) w[j] += delta * x[j];
                w[dim] += delta;
            }
        }

        double w_sq = 0.0;
        for (double v : w) w_sq += v * v;
        double alpha_sum = 0.0;
        for (double a : alpha) alpha_sum += a;
        trace.push_back(0.5 * w_sq - alpha_sum);

        double hinge = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double dot = w[dim];
            const float* x = xs[i];
            for (std::size_t j = 0; j < dim; ++j) dot += w[j] * x[j];
            hinge += std::max(0.0, 1.0 - y[i] * dot);
        }
        const double primal = 0.5 * w_sq + c * hinge;
        const double dual = alpha_sum - 0.5 * w_sq;
        if (primal - dual <= kGapTol) break;
    }
    w_out = std::move(w);
    return trace;
}

}  // namespace

LinearSvmModel train_svm(const std::vector<std::pair<VideoDescriptor, std::string>>& samples,
                         double c_param, std::uint64_t rng_seed) {
    if (samples.empty()) throw std::invalid_argument("train_svm: no samples");
    if (!(c_param > 0.0)) throw std::invalid_argument("train_svm: c_param must be positive");
    const std::size_t dim = samples.front().first.vector.size();
    std::set<std::string> class_set;
    for (const auto& [desc, label] : samples) {
        if (desc.vector.size() != dim)
            throw std::invalid_argument("train_svm: inconsistent descriptor dims");
        class_set.insert(label);
    }
    if (class_set.size() < 2)
        throw std::invalid_argument("train_svm: need at least 2 classes");

    LinearSvmModel model;
    model.classes.assign(class_set.begin(), class_set.end());
    model.c_param = c_param;

    const std::size_t n = samples.size();
    std::vector<const float*> xs(n);
    std::vector<double> x_sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = samples[i].first.vector.data();
        double acc = 1.0;  // augmented bias feature
        for (std::size_t j = 0; j < dim; ++j)
            acc += static_cast<double>(xs[i][j]) * xs[i][j];
        x_sq[i] = acc;
    }

    std::vector<signed char> y(n);
    std::vector<double> w;
    for (std::size_t ci = 0; ci < model.classes.size(); ++ci) {
        for (std::size_t i = 0; i < n; ++i)
            y[i] = samples[i].second == model.classes[ci] ? 1 : -1;
        std::vector<double> trace =
            solve_binary_dual_cd(xs, x_sq, y, dim, c_param, rng_seed + ci, w);
        std::vector<float> wf(dim);
        for (std::size_t j = 0; j < dim; ++j) wf[j] = static_cast<float>(w[j]);
        model.weights.push_back(std::move(wf));
        model.biases.push_back(static_cast<float>(w[dim]));
        model.objective_traces.push_back(std::move(trace));
    }
    return model;
}

ProbabilityMatrix predict_proba(const LinearSvmModel& m,
                                const std::vector<VideoDescriptor>& features,
                                const std::vector<std::string>& video_ids) {
    if (features.size() != video_ids.size())
        throw std::invalid_argument("predict_proba: features/ids length mismatch");
    const std::size_t k = m.classes.size();

    ProbabilityMatrix mat;
    mat.video_ids = video_ids;
    mat.classes = m.classes;
    mat.rows.reserve(features.size());

    std::vector<double> margins(k);
    for (const VideoDescriptor& f : features) {
        for (std::size_t c = 0; c < k; ++c) {
            if (f.vector.size() != m.weights[c].size())
                throw std::invalid_argument("predict_proba: descriptor dim does not match model");
            double acc = m.biases[c];
            const float* w = m.weights[c].data();
            for (std::size_t j = 0; j < f.vector.size(); ++j)
                acc += static_cast<double>(w[j]) * f.vector[j];
            margins[c] = acc;
        }
        const double mx = *std::max_element(margins.begin(), margins.end());
        double total = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            margins[c] = std::exp(margins[c] - mx);
            total += margins[c];
        }
        std::vector<float> row(k);
        for (std::size_t c = 0; c < k; ++c)
            row[c] = static_cast<float>(margins[c] / total);
        mat.rows.push_back(std::move(row));
    }
    return mat;
}

ProbabilityMatrix fuse_scores(const std::vector<ProbabilityMatrix>& mats,
                              const FusionWeights& w) {
    if (mats.empty()) throw std::invalid_argument("fuse_scores: no matrices");
    w.validate();
    if (w.weights.size() != mats.size())
        throw std::invalid_argument("fuse_scores: weight count does not match matrix count");
    const ProbabilityMatrix& first = mats.front();
    for (std::size_t m = 1; m < mats.size(); ++m) {
        for (std::size_t i = 0; i < std::max(first.video_ids.size(), mats[m].video_ids.size()); ++i) {
            if (i >= first.video_ids.size() || i >= mats[m].video_ids.size() ||
                first.video_ids[i] != mats[m].video_ids[i])
                throw std::invalid_argument(
                    "fuse_scores: video_id mismatch at row " + std::to_string(i) +
                    " between matrix 0 and matrix " + std::to_string(m));
        }
        for (std::size_t i = 0; i < std::max(first.classes.size(), mats[m].classes.size()); ++i) {
            if (i >= first.classes.size() || i >= mats[m].classes.size() ||
                first.classes[i] != mats[m].classes[i])
                throw std::invalid_argument(
                    "fuse_scores: class mismatch at column " + std::to_string(i) +
                    " between matrix 0 and matrix " + std::to_string(m));
        }
    }

    ProbabilityMatrix out;
    out.video_ids = first.video_ids;
    out.classes = first.classes;
    out.rows.resize(first.rows.size());
    for (std::size_t r = 0; r < first.rows.size(); ++r) {
        std::vector<float>& row = out.rows[r];
        row.resize(first.classes.size());
        for (std::size_t c = 0; c < row.size(); ++c) {
            double acc = 0.0;
            for (std::size_t m = 0; m < mats.size(); ++m)
                acc += w.weights[m] * static_cast<double>(mats[m].rows[r][c]);
            row[c] = static_cast<float>(acc);
        }
    }
    return out;
}

double top1_accuracy(const ProbabilityMatrix& mat, const std::vector<std::string>& labels) {
    if (labels.size() != mat.video_ids.size())
        throw std::invalid_argument("top1_accuracy: labels not aligned with video_ids");
    std::size_t correct = 0;
    for (std::size_t r = 0; r < mat.rows.size(); ++r) {
        const auto it = std::find(mat.classes.begin(), mat.classes.end(), labels[r]);
        if (it == mat.classes.end())
            throw std::invalid_argument("top1_accuracy: label '" + labels[r] +
                                        "' not in class list");
        std::size_t argmax = 0;
        for (std::size_t c = 1; c < mat.rows[r].size(); ++c)
            if (mat.rows[r][c] > mat.rows[r][argmax]) argmax = c;
        if (argmax == static_cast<std::size_t>(it - mat.classes.begin())) ++correct;
    }
    return mat.rows.empty() ? 0.0 : static_cast<double>(correct) / mat.rows.size();
}

FusionWeights grid_search_weights(const std::vector<ProbabilityMatrix>& mats,
                                  const std::vector<std::string>& labels, double step) {
    if (mats.size() != 2 && mats.size() != 3)
        throw std::invalid_argument("grid_search_weights: need 2 or 3 matrices");
    const long m = std::lround(1.0 / step);
    if (m < 1 || std::fabs(static_cast<double>(m) * step - 1.0) > 1e-9)
        throw std::invalid_argument("grid_search_weights: step must divide 1");

    FusionWeights best;
    double best_acc = -1.0;
    auto consider = [&](const std::vector<double>& w) {
        FusionWeights fw{w};
        const double acc = top1_accuracy(fuse_scores(mats, fw), labels);
        if (acc > best_acc) {
            best_acc = acc;
            best = std::move(fw);
        }
    };

    // Lexicographically ascending enumeration with strictly-greater
    // replacement keeps the smallest tuple on ties.
    if (mats.size() == 2) {
        for (long i = 0; i <= m; ++i)
            consider({static_cast<double>(i) / m, static_cast<double>(m - i) / m});
    } else {
        for (long i = 0; i <= m; ++i)
            for (long j = 0; j <= m - i; ++j)
                consider({static_cast<double>(i) / m, static_cast<double>(j) / m,
                          static_cast<double>(m - i - j) / m});
    }
    return best;
}

SplitResults split_evaluate(const DatasetManifest& manifest,
                            const std::map<std::string, VideoDescriptor>& features,
                            const std::vector<std::string>& splits,
                            const SplitEvalConfig& cfg) {
    for (const ManifestEntry& e : manifest.entries)
        if (!features.contains(e.video_id))
            throw DataError("split_evaluate: missing descriptor for video_id " + e.video_id);

    SplitResults results;
    for (const std::string& split : splits) {
        std::vector<std::pair<VideoDescriptor, std::string>> train;
        std::vector<VideoDescriptor> test_feats;
        std::vector<std::string> test_ids, test_labels;
        for (const ManifestEntry& e : manifest.entries) {
            const auto it = e.splits.find(split);
            if (it == e.splits.end())
                throw DataError("split_evaluate: manifest has no split named " + split);
            if (it->second == SplitAssignment::Train) {
                train.emplace_back(features.at(e.video_id), e.label);
            } else {
                test_feats.push_back(features.at(e.video_id));
                test_ids.push_back(e.video_id);
                test_labels.push_back(e.label);
            }
        }
        const LinearSvmModel model = train_svm(train, cfg.svm_c, cfg.seed);
        const ProbabilityMatrix probs = predict_proba(model, test_feats, test_ids);
        results.per_split.emplace_back(split, top1_accuracy(probs, test_labels));
    }
    double sum = 0.0;
    for (const auto& [name, acc] : results.per_split) sum += acc;
    results.mean = results.per_split.empty() ? 0.0 : sum / results.per_split.size();
    return results;
}

// --- serialization -------------------------------------------------------

namespace {

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

std::string format_f32(float v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
    return buf;
}

}  // namespace

std::vector<std::uint8_t> serialize_svm(const LinearSvmModel& m) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'S', 'V', 'M', 'M'});
    put_u32(out, 1);
    put_u32(out, static_cast<std::uint32_t>(m.classes.size()));
    const std::uint32_t dim =
        m.weights.empty() ? 0 : static_cast<std::uint32_t>(m.weights.front().size());
    put_u32(out, dim);
    put_f32(out, static_cast<float>(m.c_param));
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        put_u32(out, static_cast<std::uint32_t>(m.classes[c].size()));
        out.insert(out.end(), m.classes[c].begin(), m.classes[c].end());
        put_f32(out, m.biases[c]);
        for (float v : m.weights[c]) put_f32(out, v);
    }
    return out;
}

LinearSvmModel deserialize_svm(const std::vector<std::uint8_t>& bytes, const std::string& ctx) {
    if (bytes.size() < 20 || std::memcmp(bytes.data(), "SVMM", 4) != 0)
        throw DataError(ctx + ": not an SVM model file (bad magic)");
    if (get_u32(bytes.data() + 4) != 1)
        throw DataError(ctx + ": unsupported SVM model version");
    LinearSvmModel m;
    const std::uint32_t n_classes = get_u32(bytes.data() + 8);
    const std::uint32_t dim = get_u32(bytes.data() + 12);
    m.c_param = get_f32(bytes.data() + 16);
    std::size_t pos = 20;
    for (std::uint32_t c = 0; c < n_classes; ++c) {
        if (pos + 4 > bytes.size()) throw DataError(ctx + ": truncated SVM model");
        const std::uint32_t len = get_u32(bytes.data() + pos);
        pos += 4;
        if (pos + len + 4 + static_cast<std::size_t>(dim) * 4 > bytes.size())
            throw DataError(ctx + ": truncated SVM model");
        m.classes.emplace_back(bytes.begin() + pos, bytes.begin() + pos + len);
        pos += len;
        m.biases.push_back(get_f32(bytes.data() + pos));
        pos += 4;
        std::vector<float> w(dim);
        for (std::uint32_t j = 0; j < dim; ++j, pos += 4) w[j] = get_f32(bytes.data() + pos);
        m.weights.push_back(std::move(w));
    }
    if (pos != bytes.size()) throw DataError(ctx + ": trailing bytes in SVM model");
    return m;
}

void write_svm(const LinearSvmModel& m, const std::filesystem::path& path) {
    const auto bytes = serialize_svm(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for write: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed: " + path.string());
}

LinearSvmModel read_svm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize_svm(bytes, path.string());
}

void write_probability_csv(const ProbabilityMatrix& mat, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for write: " + path.string());
    out << "video_id";
    for (const std::string& c : mat.classes) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < mat.rows.size(); ++r) {
        out << mat.video_ids[r];
        for (float v : mat.rows[r]) out << ',' << format_f32(v);
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

ProbabilityMatrix read_probability_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty probability CSV");
    ProbabilityMatrix mat;
    {
        std::stringstream ss(line);
        std::string field;
        bool first = true;
        while (std::getline(ss, field, ',')) {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            if (first) {
                if (field != "video_id")
                    throw DataError(path.string() + ": header must start with video_id");
                first = false;
            } else {
                mat.classes.push_back(field);
            }
        }
        if (mat.classes.empty())
            throw DataError(path.string() + ": no class columns in header");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(field);
        }
        if (fields.size() != mat.classes.size() + 1)
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": wrong field count");
        mat.video_ids.push_back(fields[0]);
        std::vector<float> row(mat.classes.size());
        for (std::size_t c = 0; c < row.size(); ++c) {
            try {
                row[c] = std::stof(fields[c + 1]);
            } catch (const std::exception&) {
                throw DataError(path.string() + ":" + std::to_string(line_no) +
                                ": bad probability value '" + fields[c + 1] + "'");
            }
        }
        mat.rows.push_back(std::move(row));
    }
    return mat;
}

void write_results_csv(const SplitResults& results, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for write: " + path.string());
    out << "split,accuracy\n";
    for (const auto& [name, acc] : results.per_split)
        out << name << ',' << format_f32(static_cast<float>(acc)) << '\n';
    out << "mean," << format_f32(static_cast<float>(results.mean)) << '\n';
    if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace depthpipe

// Command-line front end: normalize, mdmm, encode, train, predict, fuse,
// evaluate, run, bench-make. Exit codes: 0 success, 2 config error,
// 3 data error, 4 partial failure in lenient mode.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "depthpipe/cache.hpp"
#include "depthpipe/classify.hpp"
#include "depthpipe/config.hpp"
#include "depthpipe/depth_io.hpp"
#include "depthpipe/errors.hpp"
#include "depthpipe/features.hpp"
#include "depthpipe/motion.hpp"
#include "depthpipe/normalize.hpp"
#include "depthpipe/pipeline.hpp"

namespace fs = std::filesystem;
using namespace depthpipe;

namespace {

StdnConfig make_stdn_config(std::uint32_t window, std::uint32_t bands, double percentile) {
    StdnConfig c;
    c.window_n = window;
    c.bands = bands;
    c.percentile_p = percentile;
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

DepthSequence apply_normalize(const DepthSequence& seq, const std::string& mode,
                              const StdnConfig& c) {
    if (mode == "stdn") return stdn(seq, c);
    if (mode == "intra") return intra_frame_normalize(seq);
    return seq;  // "none"
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// Shared flag bundle for subcommands that run the preprocessing front half
// (normalize mode + extractor dimensions).
struct FrontendOpts {
    std::string mode = "stdn";
    std::uint32_t window = 16;
    std::uint32_t bands = 3;
    double percentile = 95.0;
    std::string extractor = "toy";
    std::uint32_t flat_dim = 4096;
    std::uint32_t map_size = 7;
    std::uint32_t channels = 512;
};

void add_normalize_opts(CLI::App* cmd, FrontendOpts& o) {
    cmd->add_option("--mode", o.mode, "Normalization: stdn, intra, or none")
        ->check(CLI::IsMember({"stdn", "intra", "none"}))
        ->capture_default_str();
    cmd->add_option("--window", o.window, "STDN window length in frames")->capture_default_str();
    cmd->add_option("--bands", o.bands, "STDN horizontal band count")->capture_default_str();
    cmd->add_option("--percentile", o.percentile, "STDN reference percentile")
        ->capture_default_str();
}

void add_extractor_opts(CLI::App* cmd, FrontendOpts& o) {
    cmd->add_option("--extractor", o.extractor, "Frame feature extractor name")
        ->capture_default_str();
    cmd->add_option("--flat-dim", o.flat_dim, "Flat descriptor dimension")->capture_default_str();
    cmd->add_option("--map-size", o.map_size, "Spatial map grid size")->capture_default_str();
    cmd->add_option("--channels", o.channels, "Spatial map channel count")->capture_default_str();
}

// --- encode helpers -------------------------------------------------------

LcdSet sequence_lcds(const DepthSequence& seq, const FrameExtractor& ex, std::uint32_t stride,
                     const std::vector<std::uint32_t>& levels) {
    LcdSet out;
    for (std::size_t t = 0; t < seq.frames.size(); t += stride) {
        FrameFeatures f = extract_frame_features(seq.frames[t], ex);
        LcdSet d = spp_augment(f.map, levels);
        for (auto& v : d) out.push_back(std::move(v));
    }
    return out;
}

/// Even-stride subsample of the training videos' descriptors, capped at
/// max_fit descriptors.
LcdSet collect_fit_descriptors(const std::vector<const DepthSequence*>& train,
                               const FrameExtractor& ex, std::uint32_t stride,
                               const std::vector<std::uint32_t>& levels, std::uint32_t max_fit) {
    std::uint64_t per_frame = static_cast<std::uint64_t>(ex.map_height()) * ex.map_width();
    for (std::uint32_t g : levels) per_frame += static_cast<std::uint64_t>(g) * g;
    std::uint64_t total = 0;
    for (const DepthSequence* s : train)
        total += ((s->size() - 1) / stride + 1) * per_frame;
    const std::uint64_t target = std::min<std::uint64_t>(total, max_fit);

    LcdSet fit;
    fit.reserve(target);
    std::uint64_t global = 0, next = 0;
    for (const DepthSequence* s : train) {
        LcdSet d = sequence_lcds(*s, ex, stride, levels);
        for (auto& desc : d) {
            if (next < target && global == next * total / target) {
                fit.push_back(std::move(desc));
                ++next;
            }
            ++global;
        }
    }
    return fit;
}

// --- subcommand bodies ----------------------------------------------------

void cmd_normalize(const fs::path& in, const fs::path& out, const FrontendOpts& o) {
    const StdnConfig c = make_stdn_config(o.window, o.bands, o.percentile);
    const DepthSequence seq = read_sequence(in);
    write_sequence(apply_normalize(seq, o.mode, c), out);
    std::cout << "normalized " << seq.size() << " frames (" << o.mode << ") -> " << out.string()
              << "\n";
}

void cmd_mdmm(const fs::path& in, const fs::path& out_dir, std::uint32_t clip_len, bool png) {
    if (clip_len < 2) throw ConfigError("--clip-len must be >= 2");
    const DepthSequence seq = read_sequence(in);
    const std::vector<Mdmm> maps = mdmm_tiling(seq, clip_len);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
    for (std::size_t k = 0; k < maps.size(); ++k) {
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "_mdmm_%03zu", k);
        const std::string id = seq.video_id + suffix;
        write_sequence(maps[k].as_sequence(id), out_dir / (id + ".dseq"));
        if (png) export_png(maps[k], out_dir / (id + ".png"));
    }
    std::cout << "wrote " << maps.size() << " motion maps -> " << out_dir.string() << "\n";
}

struct EncodeOpts {
    fs::path manifest, pca, codebook, out, fc6_out;
    FrontendOpts front;
    std::string stream = "spatial";
    std::uint32_t clip_len = 10;
    std::uint32_t stride = 1;
    std::vector<std::uint32_t> spp{1, 2};
    std::uint32_t pca_dim = 64;
    std::uint32_t vlad_k = 256;
    bool whiten = false;
    std::uint32_t max_fit = 20000;
    std::string fit_split;
    std::uint64_t seed = 7;
};

void cmd_encode(const EncodeOpts& o) {
    const StdnConfig sc = make_stdn_config(o.front.window, o.front.bands, o.front.percentile);
    const DatasetManifest mf = load_manifest(o.manifest);
    const auto ex =
        make_extractor(o.front.extractor, o.front.flat_dim, o.front.map_size, o.front.channels);
    if (o.stream == "temporal" && o.clip_len < 2) throw ConfigError("--clip-len must be >= 2");

    std::vector<DepthSequence> seqs;
    seqs.reserve(mf.entries.size());
    for (const ManifestEntry& e : mf.entries) {
        DepthSequence seq = read_sequence(e.path);
        seq.video_id = e.video_id;
        DepthSequence norm = apply_normalize(seq, o.front.mode, sc);
        if (o.stream == "temporal") {
            std::vector<Mdmm> maps = mdmm_tiling(norm, o.clip_len);
            DepthSequence mseq;
            mseq.video_id = e.video_id;
            for (Mdmm& m : maps)
                mseq.frames.push_back(DepthFrame{m.width, m.height, std::move(m.energy)});
            norm = std::move(mseq);
        }
        seqs.push_back(std::move(norm));
    }

    PcaModel pca;
    Codebook cb;
    if (fs::exists(o.pca) && fs::exists(o.codebook)) {
        pca = read_pca(o.pca);
        cb = read_codebook(o.codebook);
        std::cout << "loaded pca (" << pca.input_dim << "->" << pca.output_dim
                  << ") and codebook (k=" << cb.k << ")\n";
    } else {
        const std::string split = o.fit_split.empty() ? mf.split_names.front() : o.fit_split;
        if (std::find(mf.split_names.begin(), mf.split_names.end(), split) ==
            mf.split_names.end())
            throw ConfigError("--fit-split '" + split + "' is not declared by the manifest");
        std::vector<const DepthSequence*> train;
        std::string train_ids;
        for (std::size_t i = 0; i < mf.entries.size(); ++i) {
            if (mf.entries[i].splits.at(split) == SplitAssignment::Train) {
                train.push_back(&seqs[i]);
                train_ids += (train_ids.empty() ? "" : ",") + mf.entries[i].video_id;
            }
        }
        if (train.empty()) throw DataError("split " + split + ": empty training set");
        LcdSet fit = collect_fit_descriptors(train, *ex, o.stride, o.spp, o.max_fit);
        pca = fit_pca(fit, o.pca_dim, o.whiten);
        LcdSet reduced = pca_transform_all(pca, fit);
        cb = fit_codebook(reduced, o.vlad_k, o.seed);
        write_pca(pca, o.pca);
        write_codebook(cb, o.codebook);
        std::cout << "fitted pca and codebook on " << fit.size() << " descriptors from split "
                  << split << " train ids=" << train_ids << "\n";
    }

    FeatureFile vlads;
    vlads.kind = DescriptorKind::Vlad;
    vlads.dim = pca.output_dim * cb.k;
    FeatureFile fc6s;
    fc6s.kind = DescriptorKind::Fc6Pooled;
    fc6s.dim = ex->flat_dim();
    for (const DepthSequence& seq : seqs) {
        LcdSet d = sequence_lcds(seq, *ex, o.stride, o.spp);
        vlads.rows.push_back(vlad_encode(pca_transform_all(pca, d), cb).vector);
        if (!o.fc6_out.empty()) {
            std::vector<std::vector<float>> flats;
            for (std::size_t t = 0; t < seq.frames.size(); t += o.stride)
                flats.push_back(extract_frame_features(seq.frames[t], *ex).flat);
            fc6s.rows.push_back(fc6_pool(flats).vector);
        }
    }
    write_features(vlads, o.out);
    std::cout << "wrote " << vlads.rows.size() << " x " << vlads.dim << " descriptors -> "
              << o.out.string() << "\n";
    if (!o.fc6_out.empty()) {
        write_features(fc6s, o.fc6_out);
        std::cout << "wrote " << fc6s.rows.size() << " x " << fc6s.dim << " descriptors -> "
                  << o.fc6_out.string() << "\n";
    }
}

FeatureFile read_aligned_features(const fs::path& path, const DatasetManifest& mf) {
    FeatureFile ff = read_features(path);
    if (ff.rows.size() != mf.entries.size())
        throw DataError(path.string() + ": " + std::to_string(ff.rows.size()) +
                        " feature rows do not match " + std::to_string(mf.entries.size()) +
                        " manifest entries");
    return ff;
}

void require_split(const DatasetManifest& mf, const std::string& split) {
    if (std::find(mf.split_names.begin(), mf.split_names.end(), split) == mf.split_names.end())
        throw ConfigError("split '" + split + "' is not declared by the manifest");
}

void cmd_train(const fs::path& manifest, const fs::path& features, const std::string& split,
               double c, std::uint64_t seed, const fs::path& out) {
    const DatasetManifest mf = load_manifest(manifest, false);
    require_split(mf, split);
    const FeatureFile ff = read_aligned_features(features, mf);
    std::vector<std::pair<VideoDescriptor, std::string>> samples;
    for (std::size_t i = 0; i < mf.entries.size(); ++i)
        if (mf.entries[i].splits.at(split) == SplitAssignment::Train)
            samples.emplace_back(VideoDescriptor{ff.kind, ff.rows[i]}, mf.entries[i].label);
    LinearSvmModel model;
    try {
        model = train_svm(samples, c, seed);
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("training: ") + e.what());
    }
    write_svm(model, out);
    std::cout << "trained " << model.classes.size() << "-class svm on " << samples.size()
              << " videos -> " << out.string() << "\n";
}

void cmd_predict(const fs::path& manifest, const fs::path& features, const fs::path& model_path,
                 const std::string& split, const std::string& subset, const fs::path& out) {
    const DatasetManifest mf = load_manifest(manifest, false);
    if (subset != "all") {
        if (split.empty()) throw ConfigError("--subset train|test requires --split");
        require_split(mf, split);
    }
    const FeatureFile ff = read_aligned_features(features, mf);
    const LinearSvmModel model = read_svm(model_path);
    std::vector<VideoDescriptor> feats;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < mf.entries.size(); ++i) {
        if (subset != "all") {
            const SplitAssignment a = mf.entries[i].splits.at(split);
            if ((subset == "train") != (a == SplitAssignment::Train)) continue;
        }
        feats.push_back(VideoDescriptor{ff.kind, ff.rows[i]});
        ids.push_back(mf.entries[i].video_id);
    }
    write_probability_csv(predict_proba(model, feats, ids), out);
    std::cout << "wrote " << ids.size() << " probability rows -> " << out.string() << "\n";
}

void cmd_fuse(const std::vector<fs::path>& ins, const std::string& weights_arg,
              const fs::path& manifest, double grid_step, const fs::path& out) {
    std::vector<ProbabilityMatrix> mats;
    for (const fs::path& p : ins) mats.push_back(read_probability_csv(p));
    FusionWeights w;
    if (!weights_arg.empty()) {
        std::stringstream ss(weights_arg);
        std::string item;
        while (std::getline(ss, item, ','))
            try {
                w.weights.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ConfigError("--weights: bad value '" + item + "'");
            }
        try {
            w.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("--weights: ") + e.what());
        }
    } else {
        if (manifest.empty())
            throw ConfigError("either --weights or --manifest (for grid search) is required");
        const DatasetManifest mf = load_manifest(manifest, false);
        std::vector<std::string> labels;
        for (const std::string& id : mats.front().video_ids) {
            const ManifestEntry* e = mf.find(id);
            if (!e) throw DataError("video_id '" + id + "' not present in manifest");
            labels.push_back(e->label);
        }
        try {
            w = grid_search_weights(mats, labels, grid_step);
        } catch (const std::invalid_argument& e) {
            throw DataError(std::string("grid search: ") + e.what());
        }
        std::cout << "grid-search accuracy "
                  << format_real(top1_accuracy(fuse_scores(mats, w), labels)) << "\n";
    }
    ProbabilityMatrix fused;
    try {
        fused = fuse_scores(mats, w);
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("fuse: ") + e.what());
    }
    write_probability_csv(fused, out);
    std::string wtext;
    for (double v : w.weights) wtext += (wtext.empty() ? "" : ",") + format_real(v);
    std::cout << "weights " << wtext << " -> " << out.string() << "\n";
}

void cmd_evaluate(const fs::path& manifest, const fs::path& features,
                  const std::vector<std::string>& splits_arg, double c, std::uint64_t seed,
                  const fs::path& out) {
    const DatasetManifest mf = load_manifest(manifest, false);
    const FeatureFile ff = read_aligned_features(features, mf);
    std::map<std::string, VideoDescriptor> by_id;
    for (std::size_t i = 0; i < mf.entries.size(); ++i)
        by_id[mf.entries[i].video_id] = VideoDescriptor{ff.kind, ff.rows[i]};
    std::vector<std::string> splits = splits_arg.empty() ? mf.split_names : splits_arg;
    for (const std::string& s : splits) require_split(mf, s);
    SplitEvalConfig cfg;
    cfg.svm_c = c;
    cfg.seed = seed;
    SplitResults res;
    try {
        res = split_evaluate(mf, by_id, splits, cfg);
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("evaluate: ") + e.what());
    }
    for (const auto& [name, acc] : res.per_split)
        std::cout << name << " " << format_real(acc) << "\n";
    std::cout << "mean " << format_real(res.mean) << "\n";
    if (!out.empty()) {
        write_results_csv(res, out);
        std::cout << "wrote " << out.string() << "\n";
    }
}

struct RunOpts {
    fs::path manifest;
    fs::path config;
    std::vector<std::string> sets;
    std::optional<std::string> cache_dir, out_dir, fusion, paths;
    std::optional<std::uint32_t> jobs;
    std::optional<std::uint64_t> seed;
    bool lenient = false;
};

int cmd_run(const RunOpts& o) {
    PipelineConfig cfg = o.config.empty() ? default_config() : load_config(o.config);
    apply_overrides(cfg, o.sets);
    if (o.cache_dir) cfg.apply("io.cache_dir", *o.cache_dir);
    if (o.out_dir) cfg.apply("io.out_dir", *o.out_dir);
    if (o.fusion) cfg.apply("fusion.mode", *o.fusion);
    if (o.paths) cfg.apply("features.paths", *o.paths);
    if (o.jobs) cfg.apply("run.jobs", std::to_string(*o.jobs));
    if (o.seed) cfg.apply("classify.seed", std::to_string(*o.seed));
    if (o.lenient) cfg.apply("run.lenient", "true");
    cfg.validate();

    const DatasetManifest mf = load_manifest(o.manifest);
    const RunResult result = run_pipeline(cfg, mf);
    for (const auto& [name, acc] : result.results.per_split) {
        std::cout << name << " " << format_real(acc);
        if (const auto it = result.fusion_weights.find(name);
            it != result.fusion_weights.end() && it->second.size() > 1) {
            std::cout << " weights=";
            for (std::size_t i = 0; i < it->second.size(); ++i)
                std::cout << (i ? "," : "") << format_real(it->second[i]);
        }
        std::cout << "\n";
    }
    std::cout << "mean " << format_real(result.results.mean) << "\n";
    std::cout << "cache hits=" << result.cache.hits << " misses=" << result.cache.misses
              << " puts=" << result.cache.puts << "\n";
    std::cout << "results " << result.results_csv.string() << "\n";
    if (!result.failed_videos.empty()) {
        std::cout << result.failed_videos.size() << " videos failed (see "
                  << result.log_path.string() << ")\n";
        return 4;
    }
    return 0;
}

void cmd_bench_make(const fs::path& out_dir, std::uint32_t vpc, std::uint64_t seed) {
    if (vpc < 1) throw ConfigError("--videos-per-class must be >= 1");
    const DatasetManifest mf = make_benchmark(out_dir, vpc, seed);
    std::size_t train = 0;
    for (const ManifestEntry& e : mf.entries)
        if (e.splits.at("split1") == SplitAssignment::Train) ++train;
    std::cout << "wrote " << mf.entries.size() << " sequences (" << train << " train, "
              << (mf.entries.size() - train) << " test) -> " << (out_dir / "manifest.csv").string()
              << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Depth-sequence action recognition pipeline"};
    app.require_subcommand(1);
    int exit_code = 0;

    // normalize
    auto* norm = app.add_subcommand("normalize", "Normalize a depth sequence");
    static fs::path n_in, n_out;
    static FrontendOpts n_front;
    norm->add_option("--in", n_in, "Input .dseq file or PGM directory")->required();
    norm->add_option("--out", n_out, "Output .dseq path")->required();
    add_normalize_opts(norm, n_front);
    norm->callback([&] { cmd_normalize(n_in, n_out, n_front); });

    // mdmm
    auto* md = app.add_subcommand("mdmm", "Compute modified depth motion maps");
    static fs::path m_in, m_out_dir;
    static std::uint32_t m_clip = 10;
    static bool m_png = false;
    md->add_option("--in", m_in, "Input .dseq file or PGM directory")->required();
    md->add_option("--out-dir", m_out_dir, "Output directory")->required();
    md->add_option("--clip-len", m_clip, "Frames per clip")->capture_default_str();
    md->add_flag("--png", m_png, "Also export 8-bit grayscale PNGs");
    md->callback([&] { cmd_mdmm(m_in, m_out_dir, m_clip, m_png); });

    // encode
    auto* enc = app.add_subcommand("encode", "Encode per-video descriptors from a manifest");
    static EncodeOpts e;
    enc->add_option("--manifest", e.manifest, "Dataset manifest CSV")->required();
    enc->add_option("--pca", e.pca, "PCA model path (loaded if present, else fitted)")
        ->required();
    enc->add_option("--codebook", e.codebook, "Codebook path (loaded if present, else fitted)")
        ->required();
    enc->add_option("--out", e.out, "Output .ftr path (VLAD rows in manifest order)")
        ->required();
    enc->add_option("--fc6-out", e.fc6_out, "Optional .ftr path for pooled flat descriptors");
    enc->add_option("--stream", e.stream, "Encode depth frames or motion maps")
        ->check(CLI::IsMember({"spatial", "temporal"}))
        ->capture_default_str();
    enc->add_option("--clip-len", e.clip_len, "Frames per clip (temporal stream)")
        ->capture_default_str();
    enc->add_option("--stride", e.stride, "Frame sampling stride")->capture_default_str();
    enc->add_option("--spp", e.spp, "Pyramid levels")->delimiter(',')->capture_default_str();
    enc->add_option("--pca-dim", e.pca_dim, "PCA output dimension")->capture_default_str();
    enc->add_option("--vlad-k", e.vlad_k, "Codebook size")->capture_default_str();
    enc->add_flag("--whiten", e.whiten, "Whiten PCA outputs");
    enc->add_option("--max-fit-descriptors", e.max_fit, "Descriptor cap for model fitting")
        ->capture_default_str();
    enc->add_option("--fit-split", e.fit_split,
                    "Split whose training set fits the models (default: first split)");
    enc->add_option("--seed", e.seed, "Codebook RNG seed")->capture_default_str();
    add_normalize_opts(enc, e.front);
    add_extractor_opts(enc, e.front);
    enc->callback([&] { cmd_encode(e); });

    // train
    auto* tr = app.add_subcommand("train", "Train a linear svm on a training split");
    static fs::path t_manifest, t_features, t_out;
    static std::string t_split;
    static double t_c = 1.0;
    static std::uint64_t t_seed = 7;
    tr->add_option("--manifest", t_manifest, "Dataset manifest CSV")->required();
    tr->add_option("--features", t_features, ".ftr rows aligned with the manifest")->required();
    tr->add_option("--split", t_split, "Split name")->required();
    tr->add_option("--c", t_c, "SVM regularization parameter")->capture_default_str();
    tr->add_option("--seed", t_seed, "Epoch shuffle seed")->capture_default_str();
    tr->add_option("--out", t_out, "Output model path")->required();
    tr->callback([&] { cmd_train(t_manifest, t_features, t_split, t_c, t_seed, t_out); });

    // predict
    auto* pr = app.add_subcommand("predict", "Write per-video class probabilities");
    static fs::path p_manifest, p_features, p_model, p_out;
    static std::string p_split, p_subset = "all";
    pr->add_option("--manifest", p_manifest, "Dataset manifest CSV")->required();
    pr->add_option("--features", p_features, ".ftr rows aligned with the manifest")->required();
    pr->add_option("--model", p_model, "Trained svm model")->required();
    pr->add_option("--split", p_split, "Split for --subset filtering");
    pr->add_option("--subset", p_subset, "Rows to keep: all, train, or test")
        ->check(CLI::IsMember({"all", "train", "test"}))
        ->capture_default_str();
    pr->add_option("--out", p_out, "Output probability CSV")->required();
    pr->callback([&] { cmd_predict(p_manifest, p_features, p_model, p_split, p_subset, p_out); });

    // fuse
    auto* fu = app.add_subcommand("fuse", "Weighted average of probability matrices");
    static std::vector<fs::path> f_ins;
    static std::string f_weights;
    static fs::path f_manifest, f_out;
    static double f_step = 0.05;
    fu->add_option("--in", f_ins, "Input probability CSVs (repeat)")
        ->required()
        ->expected(2, 3);
    fu->add_option("--weights", f_weights, "Comma-separated convex weights; omit to grid-search");
    fu->add_option("--manifest", f_manifest, "Manifest supplying labels for grid search");
    fu->add_option("--grid-step", f_step, "Simplex grid spacing")->capture_default_str();
    fu->add_option("--out", f_out, "Output fused CSV")->required();
    fu->callback([&] { cmd_fuse(f_ins, f_weights, f_manifest, f_step, f_out); });

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Per-split train/test accuracy from features");
    static fs::path v_manifest, v_features, v_out;
    static std::vector<std::string> v_splits;
    static double v_c = 1.0;
    static std::uint64_t v_seed = 7;
    ev->add_option("--manifest", v_manifest, "Dataset manifest CSV")->required();
    ev->add_option("--features", v_features, ".ftr rows aligned with the manifest")->required();
    ev->add_option("--splits", v_splits, "Splits to evaluate (default: all)")->delimiter(',');
    ev->add_option("--c", v_c, "SVM regularization parameter")->capture_default_str();
    ev->add_option("--seed", v_seed, "Epoch shuffle seed")->capture_default_str();
    ev->add_option("--out", v_out, "Optional results CSV path");
    ev->callback([&] { cmd_evaluate(v_manifest, v_features, v_splits, v_c, v_seed, v_out); });

    // run
    auto* rn = app.add_subcommand("run", "Full pipeline: normalize, motion, encode, evaluate");
    static RunOpts r;
    rn->add_option("--manifest", r.manifest, "Dataset manifest CSV")->required();
    rn->add_option("--config", r.config, "Config file (key = value with [section] headers)");
    rn->add_option("--set", r.sets, "Config override section.key=value (repeat)");
    rn->add_option("--cache-dir", r.cache_dir, "Cache directory (also env DEPTHPIPE_CACHE)");
    rn->add_option("--out-dir", r.out_dir, "Output directory");
    rn->add_option("--fusion", r.fusion, "Fusion mode: early or late");
    rn->add_option("--paths", r.paths, "Encoding paths: spatial, temporal, or spatial,temporal");
    rn->add_option("--jobs", r.jobs, "Worker pool size");
    rn->add_option("--seed", r.seed, "Pipeline RNG seed");
    rn->add_flag("--lenient", r.lenient, "Skip failed videos; exit 4 when any fail");
    rn->callback([&] { exit_code = cmd_run(r); });

    // bench-make
    auto* bm = app.add_subcommand("bench-make", "Generate the synthetic two-class benchmark");
    static fs::path b_out;
    static std::uint32_t b_vpc = 50;
    static std::uint64_t b_seed = 7;
    bm->add_option("--out-dir", b_out, "Output directory")->required();
    bm->add_option("--videos-per-class", b_vpc, "Sequences per class")->capture_default_str();
    bm->add_option("--seed", b_seed, "Generator seed")->capture_default_str();
    bm->callback([&] { cmd_bench_make(b_out, b_vpc, b_seed); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const DataError& err) {
        std::cerr << "data error: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
    return exit_code;
}

#include "depthpipe/depth_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;

namespace depthpipe {

namespace {

constexpr char kDseqMagic[4] = {'D', 'S', 'E', 'Q'};
constexpr std::uint32_t kDseqVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
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
    std::uint32_t bits = get_u32(p);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void check_frame_values(const DepthFrame& frame, std::size_t frame_index,
                        const std::string& context) {
    for (float v : frame.values) {
        if (!std::isfinite(v) || v < 0.0f) {
            throw DataError(context + ": non-finite or negative depth value in frame " +
                            std::to_string(frame_index));
        }
    }
}

// Binary P5 PGM with maxval 65535, big-endian samples per netpbm.
DepthFrame read_pgm(const fs::path& path, float scale, std::size_t frame_index) {
    std::vector<std::uint8_t> bytes = read_file_bytes(path);
    std::size_t pos = 0;
    auto skip_ws = [&]() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_token = [&]() {
        skip_ws();
        std::string tok;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) tok.push_back(static_cast<char>(bytes[pos++]));
        return tok;
    };
    const std::string ctx = path.string();
    if (read_token() != "P5")
        throw DataError(ctx + ": not a binary PGM (frame " + std::to_string(frame_index) + ")");
    unsigned long w = 0, h = 0, maxval = 0;
    try {
        w = std::stoul(read_token());
        h = std::stoul(read_token());
        maxval = std::stoul(read_token());
    } catch (const std::exception&) {
        throw DataError(ctx + ": malformed PGM header (frame " + std::to_string(frame_index) + ")");
    }
    if (maxval != 65535)
        throw DataError(ctx + ": PGM maxval must be 65535, got " + std::to_string(maxval) +
                        " (frame " + std::to_string(frame_index) + ")");
    if (w == 0 || h == 0)
        throw DataError(ctx + ": zero PGM dimensions (frame " + std::to_string(frame_index) + ")");
    ++pos;  // single whitespace after maxval
    const std::size_t need = w * h * 2;
    if (bytes.size() - pos < need)
        throw DataError(ctx + ": truncated PGM payload (frame " + std::to_string(frame_index) + ")");
    DepthFrame frame;
    frame.width = static_cast<std::uint32_t>(w);
    frame.height = static_cast<std::uint32_t>(h);
    frame.values.resize(w * h);
    for (std::size_t i = 0; i < w * h; ++i) {
        const std::uint32_t sample =
            (static_cast<std::uint32_t>(bytes[pos + 2 * i]) << 8) | bytes[pos + 2 * i + 1];
        frame.values[i] = static_cast<float>(sample) * scale;
    }
    return frame;
}

DepthSequence read_pgm_directory(const fs::path& dir) {
    const fs::path scale_path = dir / "scale.txt";
    if (!fs::exists(scale_path))
        throw DataError(dir.string() + ": missing scale.txt sidecar for PGM directory");
    float scale = 0.0f;
    {
        std::ifstream in(scale_path);
        if (!(in >> scale) || !(scale > 0.0f) || !std::isfinite(scale))
            throw DataError(scale_path.string() + ": scale.txt must hold a positive decimal");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            files.push_back(entry.path());
    }
    if (files.empty()) throw DataError(dir.string() + ": no .pgm frames found");
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    DepthSequence seq;
    seq.video_id = dir.filename().string();
    for (std::size_t i = 0; i < files.size(); ++i) {
        DepthFrame frame = read_pgm(files[i], scale, i);
        if (!seq.frames.empty() &&
            (frame.width != seq.width() || frame.height != seq.height())) {
            throw DataError(dir.string() + ": inconsistent frame dimensions at frame " +
                            std::to_string(i));
        }
        check_frame_values(frame, i, dir.string());
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

}  // namespace

void DepthFrame::validate() const {
    if (width == 0 || height == 0)
        throw std::invalid_argument("DepthFrame: zero dimensions");
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("DepthFrame: values.length != width*height");
    for (float v : values) {
        if (!std::isfinite(v) || v < 0.0f)
            throw std::invalid_argument("DepthFrame: non-finite or negative value");
    }
}

void DepthSequence::validate() const {
    if (frames.empty()) throw std::invalid_argument("DepthSequence: no frames");
    for (const DepthFrame& f : frames) {
        f.validate();
        if (f.width != width() || f.height != height())
            throw std::invalid_argument("DepthSequence: inconsistent frame dimensions");
    }
}

const ManifestEntry* DatasetManifest::find(const std::string& video_id) const {
    for (const ManifestEntry& e : entries)
        if (e.video_id == video_id) return &e;
    return nullptr;
}

std::vector<std::uint8_t> serialize_sequence(const DepthSequence& seq) {
    seq.validate();
    std::vector<std::uint8_t> out;
    out.reserve(20 + seq.size() * seq.frames.front().pixel_count() * 4);
    out.insert(out.end(), kDseqMagic, kDseqMagic + 4);
    put_u32(out, kDseqVersion);
    put_u32(out, seq.width());
    put_u32(out, seq.height());
    put_u32(out, static_cast<std::uint32_t>(seq.size()));
    for (const DepthFrame& f : seq.frames)
        for (float v : f.values) put_f32(out, v);
    return out;
}

DepthSequence deserialize_sequence(const std::vector<std::uint8_t>& bytes,
                                   const std::string& video_id) {
    const std::string ctx = video_id.empty() ? "<memory>" : video_id;
    if (bytes.size() < 20 || std::memcmp(bytes.data(), kDseqMagic, 4) != 0)
        throw DataError(ctx + ": not a .dseq container (bad magic)");
    const std::uint32_t version = get_u32(bytes.data() + 4);
    if (version != kDseqVersion)
        throw DataError(ctx + ": unsupported .dseq version " + std::to_string(version));
    const std::uint32_t width = get_u32(bytes.data() + 8);
    const std::uint32_t height = get_u32(bytes.data() + 12);
    const std::uint32_t count = get_u32(bytes.data() + 16);
    if (width == 0 || height == 0 || count == 0)
        throw DataError(ctx + ": zero dimensions or frame count in .dseq header");
    const std::size_t pixels = static_cast<std::size_t>(width) * height;
    if (bytes.size() != 20 + static_cast<std::size_t>(count) * pixels * 4)
        throw DataError(ctx + ": truncated .dseq payload");

    DepthSequence seq;
    seq.video_id = video_id;
    seq.frames.resize(count);
    const std::uint8_t* p = bytes.data() + 20;
    for (std::uint32_t t = 0; t < count; ++t) {
        DepthFrame& f = seq.frames[t];
        f.width = width;
        f.height = height;
        f.values.resize(pixels);
        for (std::size_t i = 0; i < pixels; ++i, p += 4) f.values[i] = get_f32(p);
        check_frame_values(f, t, ctx);
    }
    return seq;
}

DepthSequence read_sequence(const fs::path& path) {
    if (fs::is_directory(path)) return read_pgm_directory(path);
    if (!fs::exists(path)) throw DataError("no such file: " + path.string());
    return deserialize_sequence(read_file_bytes(path), path.stem().string());
}

void write_sequence(const DepthSequence& seq, const fs::path& path) {
    const std::vector<std::uint8_t> bytes = serialize_sequence(seq);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for write: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed: " + path.string());
}

DepthSequence synth_sequence(const SynthSpec& spec) {
    if (spec.frames < 1) throw std::invalid_argument("synth_sequence: frames must be >= 1");
    if (spec.amplitude < 0.0f) throw std::invalid_argument("synth_sequence: amplitude must be >= 0");
    if (spec.noise_sigma < 0.0f) throw std::invalid_argument("synth_sequence: noise_sigma must be >= 0");
    if (spec.width == 0 || spec.height == 0)
        throw std::invalid_argument("synth_sequence: zero dimensions");

    std::mt19937_64 rng(spec.rng_seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double two_pi = 2.0 * 3.14159265358979323846;

    DepthSequence seq;
    seq.video_id = "synth";
    seq.frames.resize(spec.frames);
    for (std::uint32_t t = 0; t < spec.frames; ++t) {
        double signal = 0.0;
        switch (spec.kind) {
            case SynthKind::Static: signal = 0.0; break;
            case SynthKind::Oscillate:
                signal = spec.amplitude * std::sin(two_pi * t / spec.frames);
                break;
            case SynthKind::Ramp:
                signal = spec.amplitude * (static_cast<double>(t) / spec.frames);
                break;
        }
        DepthFrame& f = seq.frames[t];
        f.width = spec.width;
        f.height = spec.height;
        f.values.resize(static_cast<std::size_t>(spec.width) * spec.height);
        for (float& v : f.values) {
            double x = spec.base_depth + signal;
            if (spec.noise_sigma > 0.0f) x += spec.noise_sigma * noise(rng);
            v = std::max(0.0f, static_cast<float>(x));
        }
    }
    return seq;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

DatasetManifest load_manifest(const fs::path& path, bool check_paths) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest: " + path.string());
    const fs::path base = path.parent_path();

    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty manifest");
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "video_id" || header[1] != "path" || header[2] != "label")
        throw DataError(path.string() + ": manifest header must be video_id,path,label,<split...>");

    DatasetManifest manifest;
    manifest.split_names.assign(header.begin() + 3, header.end());

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": wrong field count");
        ManifestEntry entry;
        entry.video_id = fields[0];
        fs::path p = fields[1];
        entry.path = p.is_absolute() ? p : base / p;
        entry.label = fields[2];
        for (std::size_t s = 0; s < manifest.split_names.size(); ++s) {
            const std::string& cell = fields[3 + s];
            if (cell == "train")
                entry.splits[manifest.split_names[s]] = SplitAssignment::Train;
            else if (cell == "test")
                entry.splits[manifest.split_names[s]] = SplitAssignment::Test;
            else
                throw DataError(path.string() + ":" + std::to_string(line_no) +
                                ": split cell must be train or test, got '" + cell + "'");
        }
        manifest.entries.push_back(std::move(entry));
    }

    for (std::size_t i = 0; i < manifest.entries.size(); ++i)
        for (std::size_t j = i + 1; j < manifest.entries.size(); ++j)
            if (manifest.entries[i].video_id == manifest.entries[j].video_id)
                throw DataError(path.string() + ": duplicate video_id '" +
                                manifest.entries[i].video_id + "'");

    if (check_paths) {
        for (const ManifestEntry& e : manifest.entries)
            if (!fs::exists(e.path))
                throw DataError(path.string() + ": referenced path does not exist: " +
                                e.path.string() + " (video_id " + e.video_id + ")");
    }
    return manifest;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open for write: " + path.string());
    out << "video_id,path,label";
    for (const std::string& s : manifest.split_names) out << ',' << s;
    out << '\n';
    const fs::path base = path.parent_path();
    for (const ManifestEntry& e : manifest.entries) {
        fs::path rel = e.path.lexically_proximate(base);
        out << e.video_id << ',' << rel.generic_string() << ',' << e.label;
        for (const std::string& s : manifest.split_names) {
            auto it = e.splits.find(s);
            if (it == e.splits.end())
                throw DataError("manifest entry " + e.video_id + " missing split " + s);
            out << ',' << (it->second == SplitAssignment::Train ? "train" : "test");
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace depthpipe

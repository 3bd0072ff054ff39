#include "depthpipe/motion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <png.h>

namespace depthpipe {

void Clip::validate() const {
    if (source == nullptr) throw std::invalid_argument("Clip: null source");
    if (length_n < 2) throw std::invalid_argument("Clip: length_n must be >= 2");
    if (t_start + length_n > source->size())
        throw std::invalid_argument("Clip: range exceeds source sequence");
}

DepthSequence Mdmm::as_sequence(const std::string& video_id) const {
    DepthSequence seq;
    seq.video_id = video_id;
    DepthFrame f;
    f.width = width;
    f.height = height;
    f.values = energy;
    seq.frames.push_back(std::move(f));
    return seq;
}

DepthSequence abs_diff_sequence(const DepthSequence& seq) {
    seq.validate();
    if (seq.size() < 2)
        throw std::invalid_argument("abs_diff_sequence: need at least 2 frames");
    DepthSequence out;
    out.video_id = seq.video_id;
    out.frames.resize(seq.size() - 1);
    const std::size_t pixels = seq.frames.front().pixel_count();
    for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
        DepthFrame& d = out.frames[t];
        d.width = seq.width();
        d.height = seq.height();
        d.values.resize(pixels);
        const std::vector<float>& a = seq.frames[t].values;
        const std::vector<float>& b = seq.frames[t + 1].values;
        for (std::size_t i = 0; i < pixels; ++i) d.values[i] = std::fabs(b[i] - a[i]);
    }
    return out;
}

Mdmm mdmm(const Clip& clip) {
    clip.validate();
    const DepthSequence& seq = *clip.source;
    const std::size_t pixels = seq.frames.front().pixel_count();
    const std::size_t terms = clip.length_n - 1;

    Mdmm m;
    m.width = seq.width();
    m.height = seq.height();
    m.energy.resize(pixels);

    std::vector<float> diffs(terms);
    for (std::size_t i = 0; i < pixels; ++i) {
        for (std::size_t k = 0; k < terms; ++k) {
            const float a = seq.frames[clip.t_start + k].values[i];
            const float b = seq.frames[clip.t_start + k + 1].values[i];
            diffs[k] = std::fabs(b - a);
        }
        std::sort(diffs.begin(), diffs.end());
        double acc = 0.0;
        for (float d : diffs) acc += d;
        m.energy[i] = static_cast<float>(acc);
    }
    return m;
}

std::vector<Clip> clip_tiling(const DepthSequence& seq, std::size_t n) {
    seq.validate();
    if (seq.size() < 2)
        throw std::invalid_argument("clip_tiling: need at least 2 frames");
    if (n < 2) throw std::invalid_argument("clip_tiling: clip length must be >= 2");
    std::vector<Clip> clips;
    for (std::size_t start = 0; start < seq.size(); start += n) {
        const std::size_t len = std::min(n, seq.size() - start);
        if (len < 2) break;
        clips.push_back(Clip{&seq, start, len});
    }
    return clips;
}

std::vector<Mdmm> mdmm_tiling(const DepthSequence& seq, std::size_t n) {
    std::vector<Mdmm> maps;
    for (const Clip& c : clip_tiling(seq, n)) maps.push_back(mdmm(c));
    return maps;
}

void export_png(const Mdmm& m, const std::filesystem::path& path) {
    if (m.energy.empty() || m.energy.size() != static_cast<std::size_t>(m.width) * m.height)
        throw std::invalid_argument("export_png: invalid Mdmm");

    const auto [lo_it, hi_it] = std::minmax_element(m.energy.begin(), m.energy.end());
    const double lo = *lo_it, hi = *hi_it;
    const double range = hi - lo;

    std::vector<png_byte> pixels(m.energy.size());
    for (std::size_t i = 0; i < m.energy.size(); ++i) {
        const double v = (range > 0.0) ? (m.energy[i] - lo) / range * 255.0 : 0.0;
        pixels[i] = static_cast<png_byte>(std::lround(v));
    }

    FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp) throw DataError("cannot open for write: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        std::fclose(fp);
        throw DataError("PNG write failed: " + path.string());
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, m.width, m.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::uint32_t r = 0; r < m.height; ++r)
        png_write_row(png, pixels.data() + static_cast<std::size_t>(r) * m.width);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace depthpipe

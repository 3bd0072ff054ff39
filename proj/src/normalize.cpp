#include "depthpipe/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace depthpipe {

void StdnConfig::validate() const {
    if (window_n < 1) throw std::invalid_argument("StdnConfig: window_n must be >= 1");
    if (bands < 1) throw std::invalid_argument("StdnConfig: bands must be >= 1");
    if (!(percentile_p > 0.0) || percentile_p > 100.0)
        throw std::invalid_argument("StdnConfig: percentile_p must be in (0, 100]");
}

BandPartition make_band_partition(std::uint32_t total, std::uint32_t parts, bool allow_empty) {
    if (parts == 0) throw std::invalid_argument("band partition: parts must be >= 1");
    if (!allow_empty && total < parts)
        throw std::invalid_argument("band partition: fewer rows than bands");
    BandPartition part;
    part.band_row_ranges.reserve(parts);
    const std::uint32_t base = total / parts;
    const std::uint32_t rem = total % parts;
    std::uint32_t start = 0;
    for (std::uint32_t b = 0; b < parts; ++b) {
        const std::uint32_t h = base + (b < rem ? 1 : 0);
        part.band_row_ranges.emplace_back(start, start + h);
        start += h;
    }
    return part;
}

float nearest_rank_percentile(std::span<const float> values, double p) {
    if (values.empty())
        throw std::invalid_argument("nearest_rank_percentile: empty input");
    if (!(p > 0.0) || p > 100.0)
        throw std::invalid_argument("nearest_rank_percentile: p must be in (0, 100]");
    const std::size_t m = values.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(m) / 100.0));
    k = std::clamp<std::size_t>(k, 1, m);
    std::vector<float> scratch(values.begin(), values.end());
    std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end());
    return scratch[k - 1];
}

DepthSequence stdn(const DepthSequence& seq, const StdnConfig& cfg) {
    seq.validate();
    cfg.validate();
    if (seq.height() < cfg.bands)
        throw std::invalid_argument("stdn: frame height smaller than band count");

    const BandPartition bands = make_band_partition(seq.height(), cfg.bands);
    const std::uint32_t width = seq.width();

    DepthSequence out = seq;
    const std::size_t total = seq.size();
    std::vector<float> window_pixels;
    std::vector<float> frame_pixels;

    for (std::size_t w0 = 0; w0 < total; w0 += cfg.window_n) {
        const std::size_t w1 = std::min(total, w0 + cfg.window_n);
        for (const auto& [r0, r1] : bands.band_row_ranges) {
            const std::size_t band_pixels = static_cast<std::size_t>(r1 - r0) * width;

            window_pixels.clear();
            window_pixels.reserve(band_pixels * (w1 - w0));
            for (std::size_t t = w0; t < w1; ++t) {
                const float* row = &seq.frames[t].values[static_cast<std::size_t>(r0) * width];
                window_pixels.insert(window_pixels.end(), row, row + band_pixels);
            }
            const double d_ref = nearest_rank_percentile(window_pixels, cfg.percentile_p);

            for (std::size_t t = w0; t < w1; ++t) {
                frame_pixels.assign(
                    seq.frames[t].values.begin() + static_cast<std::size_t>(r0) * width,
                    seq.frames[t].values.begin() + static_cast<std::size_t>(r0) * width + band_pixels);
                const double d_t = nearest_rank_percentile(frame_pixels, cfg.percentile_p);
                const double scale = (d_t == 0.0) ? 1.0 : d_ref / d_t;
                float* dst = &out.frames[t].values[static_cast<std::size_t>(r0) * width];
                for (std::size_t i = 0; i < band_pixels; ++i)
                    dst[i] = static_cast<float>(dst[i] * scale);
            }
        }
    }
    return out;
}

DepthSequence intra_frame_normalize(const DepthSequence& seq) {
    seq.validate();
    DepthSequence out = seq;
    for (DepthFrame& f : out.frames) {
        const float mx = *std::max_element(f.values.begin(), f.values.end());
        if (mx == 0.0f) continue;
        const double inv = 1.0 / static_cast<double>(mx);
        for (float& v : f.values) v = static_cast<float>(v * inv);
    }
    return out;
}

}  // namespace depthpipe

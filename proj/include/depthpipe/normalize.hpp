#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "depthpipe/depth_io.hpp"

namespace depthpipe {

/// Configuration for spatio-temporal depth normalization.
struct StdnConfig {
    std::uint32_t window_n = 16;  // frames per normalization window
    std::uint32_t bands = 3;      // horizontal bands (top/middle/bottom)
    double percentile_p = 95.0;   // in (0, 100]

    void validate() const;
};

/// Contiguous, non-overlapping row ranges covering [0, height),
/// heights differing by at most one row.
struct BandPartition {
    // (start_row inclusive, end_row exclusive)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> band_row_ranges;
};

/// Balanced partition of `total` rows into `parts` ranges; remainder rows
/// go to the earliest ranges. Throws std::invalid_argument when
/// total < parts unless allow_empty.
BandPartition make_band_partition(std::uint32_t total, std::uint32_t parts,
                                  bool allow_empty = false);

/// Nearest-rank percentile: sorted(values)[ceil(p/100 * M)], 1-based.
/// The result is always an element of `values`.
float nearest_rank_percentile(std::span<const float> values, double p);

/// Spatio-temporal depth normalization. Frames are processed in consecutive
/// non-overlapping windows of cfg.window_n frames (trailing window may be
/// shorter). Within each window and horizontal band, every frame is scaled
/// so its band percentile matches the percentile taken over the whole
/// window's band pixels. An all-zero band keeps scale 1.
DepthSequence stdn(const DepthSequence& seq, const StdnConfig& cfg);

/// Baseline: each frame independently rescaled so its maximum is 1.
/// All-zero frames pass through unchanged.
DepthSequence intra_frame_normalize(const DepthSequence& seq);

}  // namespace depthpipe

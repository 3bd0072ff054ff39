#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "depthpipe/depth_io.hpp"

namespace depthpipe {

/// A window of consecutive frames inside a source sequence. Holds a
/// non-owning reference; the source must outlive the clip.
struct Clip {
    const DepthSequence* source = nullptr;
    std::size_t t_start = 0;
    std::size_t length_n = 0;  // >= 2

    void validate() const;
};

/// Accumulated absolute depth difference over one clip.
struct Mdmm {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<float> energy;  // row-major, non-negative

    /// Wraps the energy map as a single-frame sequence for `.dseq` output.
    DepthSequence as_sequence(const std::string& video_id) const;
};

/// Baseline temporal stream: output frame t = |seq[t+1] - seq[t]|.
DepthSequence abs_diff_sequence(const DepthSequence& seq);

/// Accumulates the clip's length_n - 1 consecutive absolute differences.
/// Per-pixel terms are summed in sorted order, making the result exactly
/// invariant under frame-order reversal.
Mdmm mdmm(const Clip& clip);

/// Consecutive non-overlapping clips of n frames starting at frame 0;
/// a trailing partial clip is kept iff it spans at least 2 frames.
std::vector<Mdmm> mdmm_tiling(const DepthSequence& seq, std::size_t n);

std::vector<Clip> clip_tiling(const DepthSequence& seq, std::size_t n);

/// 8-bit grayscale PNG, min-max scaled per image. A constant map
/// exports as all-black.
void export_png(const Mdmm& m, const std::filesystem::path& path);

}  // namespace depthpipe

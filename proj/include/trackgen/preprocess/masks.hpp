#pragma once

#include "trackgen/core/tracks.hpp"
#include "trackgen/core/video.hpp"

namespace trackgen::preprocess {

/// Motion reference video: 1 inside at least one box of the frame, else 0.
/// Absent boxes contribute nothing. Throws ValidationError for boxes outside
/// the H x W frame or a num_frames mismatch.
BinaryVideo rasterize_tracks(const BoxTrackSet& tracks, int frames, int height, int width);

/// v * m with m broadcast over channels.
VideoTensor apply_motion_mask(const VideoTensor& v, const BinaryVideo& m);

inline constexpr float kDefaultMaskThreshold = 0.1f;
inline constexpr int kDefaultWideningKernel = 10;

/// Foreground mask of frame(s) `f` against background frame(s) `bg`:
/// threshold the max-over-channels absolute difference at tau, then keep the
/// nonzero support of a k x k Gaussian blur of that mask. `bg` is either a
/// single frame or has as many frames as `f`.
BinaryVideo extract_foreground_mask(const VideoTensor& f, const VideoTensor& bg, float tau = kDefaultMaskThreshold,
                                    int kernel_size = kDefaultWideningKernel);

}  // namespace trackgen::preprocess

#pragma once

#include <filesystem>
#include <functional>

#include "trackgen/core/video.hpp"
#include "trackgen/preprocess/masks.hpp"

namespace trackgen::preprocess {

/// Background estimate for a video: either one frame or one per frame.
using BackgroundFn = std::function<VideoTensor(const VideoTensor& video)>;

/// Always returns `frame` (e.g. a known clean background plate).
BackgroundFn fixed_background(VideoTensor frame);

struct PrepareOptions {
  float tau = kDefaultMaskThreshold;
  int kernel_size = kDefaultWideningKernel;
};

struct PreparedEpisode {
  VideoTensor video;
  BinaryVideo motion;
  BinaryVideo masks;
};

/// Computes the motion reference video (rasterized tracks) and the refined
/// foreground masks of an episode and writes them to motion/ and masks/.
/// Throws IoError when the episode has no tracks.json.
PreparedEpisode prepare_episode(const std::filesystem::path& episode_dir, const BackgroundFn& background,
                                const PrepareOptions& opts = {});

}  // namespace trackgen::preprocess

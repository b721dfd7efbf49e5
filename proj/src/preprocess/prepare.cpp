#include "trackgen/preprocess/prepare.hpp"

#include "trackgen/core/dataset.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/core/io.hpp"

namespace trackgen::preprocess {

BackgroundFn fixed_background(VideoTensor frame) {
  return [frame = std::move(frame)](const VideoTensor&) { return frame; };
}

PreparedEpisode prepare_episode(const std::filesystem::path& episode_dir, const BackgroundFn& background,
                                const PrepareOptions& opts) {
  const EpisodePaths paths{episode_dir};
  if (!std::filesystem::exists(paths.tracks())) {
    throw IoError(episode_dir.string() + " has no tracks.json; run a tracker or ingest tracks before preprocessing");
  }
  const auto video = load_video(paths.frames());
  const auto tracks = load_tracks(paths.tracks());
  PreparedEpisode out{video,
                      rasterize_tracks(tracks, static_cast<int>(video.frames()), static_cast<int>(video.height()),
                                       static_cast<int>(video.width())),
                      extract_foreground_mask(video, background(video), opts.tau, opts.kernel_size)};
  save_binary_video(out.motion, paths.motion());
  save_binary_video(out.masks, paths.masks());
  return out;
}

}  // namespace trackgen::preprocess

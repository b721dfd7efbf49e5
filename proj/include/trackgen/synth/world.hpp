#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackgen/core/tracks.hpp"
#include "trackgen/core/video.hpp"

namespace trackgen::synth {

enum class BackgroundKind { flat, textured };
enum class SpriteShape { square, circle, mixed };

/// Sprite-world settings. Sprites move with constant integer velocity and
/// bounce off the frame edges.
struct WorldConfig {
  int num_objects = 1;
  int sprite_size = 10;
  BackgroundKind background = BackgroundKind::flat;
  SpriteShape shape = SpriteShape::square;
  /// Each velocity component is drawn uniformly from [-velocity_range, velocity_range].
  int velocity_range = 2;
  int frames = 16;
  int height = 64;
  int width = 64;
  uint64_t seed = 0;
  std::array<float, 3> background_color{0.20f, 0.42f, 0.22f};
  /// Peak deviation of the textured background from background_color.
  float texture_amplitude = 0.04f;

  void validate() const;
  nlohmann::json to_json() const;
  static WorldConfig from_json(const nlohmann::json& j);
};

/// Everything needed to render one sprite; lets callers pin trajectories exactly.
struct SpriteSpec {
  int x = 0;
  int y = 0;
  int vx = 0;
  int vy = 0;
  SpriteShape shape = SpriteShape::square;
  std::array<float, 3> color{1.0f, 1.0f, 1.0f};
};

struct SynthEpisode {
  VideoTensor video;
  BoxTrackSet tracks;
  /// Clean background frame (1 x H x W x 3).
  VideoTensor background;
};

/// Clean background of the world; depends on cfg.seed only.
VideoTensor make_background(const WorldConfig& cfg);

/// Top-left corners of a sprite over cfg.frames frames, with wall bounce.
std::vector<std::array<int, 2>> simulate_positions(const WorldConfig& cfg, const SpriteSpec& sprite);

/// Renders the given sprites over the world background; tracks are the tight
/// boxes of every sprite in every frame (object ids follow sprite order).
SynthEpisode render_episode(const WorldConfig& cfg, std::span<const SpriteSpec> sprites);

/// Samples cfg.num_objects non-overlapping sprite trajectories from `seed`
/// and renders them. Throws PlacementError after 1000 failed placements.
SynthEpisode generate_episode(const WorldConfig& cfg, uint64_t seed);

/// Samples the sprite specs generate_episode would render for `seed`.
std::vector<SpriteSpec> sample_sprites(const WorldConfig& cfg, uint64_t seed);

/// Detection threshold of the oracle detector, in [0,1] intensity units.
inline constexpr float kDetectionThreshold = 0.05f;

/// Oracle detector: connected components (8-connected) of
/// max_c |frame - background| > tau become boxes, and boxes are linked across
/// frames by greedy nearest-centroid matching.
BoxTrackSet oracle_detect(const VideoTensor& video, const VideoTensor& background, float tau = kDetectionThreshold);

/// Boxes of the connected foreground components of one frame, in raster order
/// of each component's first pixel.
std::vector<Box> detect_frame(std::span<const uint8_t> foreground, int height, int width);

/// Writes `count` episodes (frames/, tracks.json) plus index.json and the
/// world's background.png; returns the index JSON.
nlohmann::json generate_dataset(const WorldConfig& cfg, size_t count, const std::filesystem::path& out_dir);

/// Seed of the i-th episode of a dataset.
uint64_t episode_seed(uint64_t world_seed, size_t index);

}  // namespace trackgen::synth

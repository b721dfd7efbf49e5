#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "trackgen/core/dataset.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/core/io.hpp"
#include "trackgen/kernels/types.hpp"
#include "trackgen/preprocess/masks.hpp"
#include "trackgen/preprocess/prepare.hpp"
#include "trackgen/synth/world.hpp"

using namespace trackgen;
using namespace trackgen::preprocess;

namespace {

BinaryVideo brute_force_raster(const BoxTrackSet& tracks, int frames, int height, int width) {
  std::vector<uint8_t> out(static_cast<size_t>(frames * height * width), 0);
  for (int t = 0; t < frames; ++t) {
    const auto boxes = tracks.boxes_at(t);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        for (const auto& b : boxes) {
          if (b.contains(x, y)) out[static_cast<size_t>((t * height + y) * width + x)] = 1;
        }
      }
    }
  }
  return BinaryVideo(frames, height, width, out);
}

VideoTensor constant_video(VideoShape shape, float value) { return VideoTensor::filled(shape, value); }

}  // namespace

TEST_CASE("rasterizing an empty track set gives zeros") {
  const BoxTrackSet empty{3, 8, 8, {}};
  CHECK(rasterize_tracks(empty, 3, 8, 8).count_ones() == 0);
}

TEST_CASE("a static box covers the half-open pixel range") {
  const BoxTrackSet t{2, 4, 4, {{0, {Box{0, 0, 2, 2}, Box{0, 0, 2, 2}}}}};
  const auto m = rasterize_tracks(t, 2, 4, 4);
  for (int f = 0; f < 2; ++f) {
    CHECK(m.frame(f).count_ones() == 4);
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 4; ++x) CHECK(m.at(f, y, x) == ((x < 2 && y < 2) ? 1 : 0));
    }
  }
}

TEST_CASE("overlapping boxes rasterize to their union") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = testing::random_tracks(rng, 4, 12, 10, 3);
    CHECK(rasterize_tracks(t, 4, 12, 10) == brute_force_raster(t, 4, 12, 10));
  }
}

TEST_CASE("rasterize_tracks rejects mismatched dimensions") {
  const BoxTrackSet t{2, 4, 4, {}};
  CHECK_THROWS_AS(rasterize_tracks(t, 3, 4, 4), ValidationError);
}

TEST_CASE("motion masks multiply every channel") {
  const VideoShape shape{1, 2, 2, 3};
  const auto v = constant_video(shape, 0.5f);
  CHECK(apply_motion_mask(v, BinaryVideo(1, 2, 2, {1, 1, 1, 1})) == v);
  CHECK(apply_motion_mask(v, BinaryVideo::zeros(1, 2, 2)) == VideoTensor::zeros(shape));
  const auto checker = apply_motion_mask(v, BinaryVideo(1, 2, 2, {1, 0, 0, 1}));
  for (int c = 0; c < 3; ++c) {
    CHECK(checker.at(0, 0, 0, c) == 0.5f);
    CHECK(checker.at(0, 0, 1, c) == 0.0f);
    CHECK(checker.at(0, 1, 0, c) == 0.0f);
    CHECK(checker.at(0, 1, 1, c) == 0.5f);
  }
  CHECK_THROWS_AS(apply_motion_mask(v, BinaryVideo::zeros(2, 2, 2)), DimensionError);
}

TEST_CASE("foreground masks from background differences") {
  const VideoShape frame{1, 9, 9, 3};
  const auto bg = constant_video(frame, 0.0f);
  CHECK(extract_foreground_mask(bg, bg, 0.01f).count_ones() == 0);

  std::vector<float> data(static_cast<size_t>(frame.size()), 0.0f);
  data[static_cast<size_t>((4 * 9 + 4) * 3)] = 1.0f;
  const VideoTensor f(frame, data);
  const auto single = extract_foreground_mask(f, bg, 0.1f, 1);
  CHECK(single.count_ones() == 1);
  CHECK(single.at(0, 4, 4) == 1);

  // k=10 taps cover -5..+4 around each output pixel, so the blob spans 0..8 here.
  const auto wide = extract_foreground_mask(f, bg, 0.1f, 10);
  CHECK(wide.count_ones() == 81);
  const auto three = extract_foreground_mask(f, bg, 0.1f, 3);
  CHECK(three.count_ones() == 9);
  CHECK(three.at(0, 3, 3) == 1);
  CHECK(three.at(0, 5, 5) == 1);
  CHECK(three.at(0, 2, 2) == 0);
}

TEST_CASE("prepare_episode writes motion and mask videos") {
  const auto dir = testing::scratch_dir("prepare");
  synth::WorldConfig cfg;
  cfg.seed = 9;
  synth::generate_dataset(cfg, 1, dir);
  const auto ep_dir = dir / read_dataset_index(dir).episodes.at(0);
  const auto bg = load_frame_png(dir / "background.png");
  const auto prepared = prepare_episode(ep_dir, fixed_background(bg));
  const auto tracks = load_tracks(ep_dir / "tracks.json");
  CHECK(prepared.motion == rasterize_tracks(tracks, cfg.frames, cfg.height, cfg.width));
  CHECK(load_binary_video(ep_dir / "motion") == prepared.motion);
  CHECK(load_binary_video(ep_dir / "masks") == prepared.masks);

  const auto lo = kernels::tap_lo(kDefaultWideningKernel);
  const auto hi = kernels::tap_hi(kDefaultWideningKernel);
  for (int t = 0; t < cfg.frames; ++t) {
    const auto boxes = tracks.boxes_at(t);
    for (int y = 0; y < cfg.height; ++y) {
      for (int x = 0; x < cfg.width; ++x) {
        if (prepared.masks.at(t, y, x) == 0) continue;
        bool inside = false;
        for (const auto& b : boxes) inside = inside || Box{b.x0 - hi, b.y0 - hi, b.x1 - lo, b.y1 - lo}.contains(x, y);
        CHECK(inside);
      }
    }
  }
}

TEST_CASE("a background-only episode has empty masks") {
  const auto dir = testing::scratch_dir("prepare_empty");
  const auto bg = VideoTensor::filled({1, 16, 16, 3}, 0.3f);
  save_video(VideoTensor::filled({4, 16, 16, 3}, 0.3f), dir / "frames");
  save_tracks(BoxTrackSet{4, 16, 16, {}}, dir / "tracks.json");
  const auto prepared = prepare_episode(dir, fixed_background(bg));
  CHECK(prepared.masks.count_ones() == 0);
  CHECK(prepared.motion.count_ones() == 0);
}

TEST_CASE("prepare_episode without tracks asks for a tracker") {
  const auto dir = testing::scratch_dir("prepare_notracks");
  save_video(VideoTensor::zeros({2, 8, 8, 3}), dir / "frames");
  CHECK_THROWS_WITH_AS(prepare_episode(dir, fixed_background(VideoTensor::zeros({1, 8, 8, 3}))),
                       doctest::Contains("tracker"), IoError);
}

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "trackgen/core/checkpoint.hpp"
#include "trackgen/core/config.hpp"
#include "trackgen/core/dataset.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/core/fileutil.hpp"
#include "trackgen/core/io.hpp"
#include "trackgen/core/latent.hpp"
#include "trackgen/core/tracks.hpp"
#include "trackgen/core/video.hpp"

using namespace trackgen;
namespace fs = std::filesystem;
using trackgen::testing::scratch_dir;

TEST_CASE("video constructors validate shape and values") {
  CHECK_THROWS_AS(VideoTensor({1, 2, 2, 1}, std::vector<float>(3, 0.f)), DimensionError);
  CHECK_THROWS_AS(VideoTensor({1, 2, 2, 2}, std::vector<float>(8, 0.f)), DimensionError);
  CHECK_THROWS_AS(VideoTensor({0, 2, 2, 1}, {}), DimensionError);
  CHECK_THROWS_AS(VideoTensor({1, 1, 1, 1}, {std::numeric_limits<float>::quiet_NaN()}), ValidationError);
  CHECK_THROWS_AS(VideoTensor({1, 1, 1, 1}, {std::numeric_limits<float>::infinity()}), ValidationError);
  CHECK_THROWS_AS(VideoTensor({1, 1, 1, 1}, {1.5f}), ValidationError);
  CHECK_THROWS_AS(BinaryVideo(1, 1, 2, {0, 2}), ValidationError);
  CHECK_THROWS_AS(BinaryVideo::from_video(VideoTensor({1, 1, 2, 1}, {0.f, 0.5f})), ValidationError);
  CHECK_THROWS_AS(BinaryVideo::from_video(VideoTensor::zeros({1, 1, 1, 3})), DimensionError);

  const VideoTensor v({2, 2, 3, 3}, std::vector<float>(36, 0.25f));
  CHECK(v.at(1, 1, 2, 2) == 0.25f);
  CHECK(v.frame(1).frames() == 1);
  CHECK_THROWS_AS(v.frame(2), DimensionError);
}

TEST_CASE("binary video converts to and from real videos") {
  const BinaryVideo b(2, 1, 2, {0, 1, 1, 0});
  CHECK(b.count_ones() == 2);
  CHECK(BinaryVideo::from_video(b.to_video()) == b);
  CHECK(b.frame(1).at(0, 0, 0) == 1);
}

TEST_CASE("latent codes reject non-finite values and check size") {
  CHECK_THROWS_AS(LatentCode(LatentKind::motion, {0.f, std::nanf("")}), ValidationError);
  const auto z = LatentCode::zeros(LatentKind::content, 4);
  CHECK(z.size() == 4);
  CHECK_NOTHROW(z.require(LatentKind::content, 4));
  CHECK_THROWS_AS(z.require(LatentKind::content, 5), DimensionError);
  CHECK_THROWS(z.require(LatentKind::motion, 4));
}

TEST_CASE("save_video and load_video round-trip within one quantization step") {
  const auto dir = scratch_dir("video_roundtrip");
  std::mt19937_64 rng(11);
  const auto v = testing::random_video(rng, {3, 5, 7, 3});
  const auto manifest = save_video(v, dir / "v");
  CHECK(manifest["n"] == 3);
  CHECK(manifest["c"] == 3);
  CHECK(fs::exists(dir / "v" / "0002.png"));
  CHECK(fs::exists(dir / "v" / "manifest.json"));
  const auto back = load_video(dir / "v");
  REQUIRE(back.shape() == v.shape());
  double worst = 0.0;
  for (size_t i = 0; i < v.data().size(); ++i) worst = std::max(worst, double(std::abs(v.data()[i] - back.data()[i])));
  CHECK(worst <= 0.5 / 255.0 + 1e-7);

  const auto b = testing::random_binary_video(rng, 4, 6, 6);
  save_binary_video(b, dir / "b");
  CHECK(load_binary_video(dir / "b") == b);
}

TEST_CASE("load_video reports the first missing frame") {
  const auto dir = scratch_dir("video_gap");
  const auto black = VideoTensor::zeros({1, 4, 4, 3});
  save_frame_png(black, 0, dir / "0000.png");
  save_frame_png(black, 0, dir / "0002.png");
  try {
    load_video(dir);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
  const auto white = VideoTensor::filled({1, 4, 4, 3}, 1.0f);
  const auto one = scratch_dir("video_white");
  save_frame_png(white, 0, one / "0000.png");
  const auto w = load_video(one);
  CHECK(w.frames() == 1);
  CHECK(w.at(0, 3, 3, 2) == 1.0f);

  save_frame_png(VideoTensor::zeros({1, 5, 4, 3}), 0, one / "0001.png");
  CHECK_THROWS_AS(load_video(one), DimensionError);
  CHECK_THROWS_AS(load_video(dir / "missing"), IoError);
}

TEST_CASE("PNG encode and decode are inverse on 8-bit values") {
  std::vector<float> data(2 * 3 * 3);
  for (size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(i * 13 % 256) / 255.0f;
  const VideoTensor v({1, 2, 3, 3}, data);
  const auto png = encode_frame_png(v, 0);
  CHECK(image_to_frame(decode_png(png)) == v);
  const std::vector<uint8_t> junk{1, 2, 3};
  CHECK_THROWS_AS(decode_png(junk), FormatError);
}

TEST_CASE("tracks JSON round-trips canonically") {
  const auto j = nlohmann::json::parse(
      R"({"num_frames":2,"width":8,"height":4,"objects":[{"id":3,"boxes":[[0,0,4,4],[2,0,6,4]]}]})");
  const auto t = tracks_from_json(j);
  CHECK(t.objects.at(0).boxes.at(1) == Box{2, 0, 6, 4});
  CHECK(tracks_from_json(tracks_to_json(t)) == t);
  CHECK(canonical_tracks_text(tracks_from_json(nlohmann::json::parse(canonical_tracks_text(t)))) ==
        canonical_tracks_text(t));

  const auto gap = tracks_from_json(nlohmann::json::parse(
      R"({"num_frames":2,"width":8,"height":4,"objects":[{"id":0,"boxes":[[0,0,4,4],null]}]})"));
  CHECK_FALSE(gap.objects[0].boxes[1].has_value());
  CHECK(gap.boxes_at(1).empty());

  const auto empty =
      tracks_from_json(nlohmann::json::parse(R"({"num_frames":16,"width":64,"height":64,"objects":[]})"));
  CHECK(empty.objects.empty());

  const auto dir = scratch_dir("tracks");
  save_tracks(t, dir / "tracks.json");
  CHECK(load_tracks(dir / "tracks.json") == t);
}

TEST_CASE("invalid boxes cite the object and frame") {
  try {
    tracks_from_json(nlohmann::json::parse(
        R"({"num_frames":2,"width":8,"height":4,"objects":[{"id":7,"boxes":[[0,0,4,4],[5,0,5,4]]}]})"));
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find('7') != std::string::npos);
    CHECK(msg.find('1') != std::string::npos);
  }
  CHECK_THROWS_AS(tracks_from_json(nlohmann::json::parse(
                      R"({"num_frames":1,"width":8,"height":4,"objects":[{"id":0,"boxes":[[0,0,9,4]]}]})")),
                  ValidationError);
  CHECK_THROWS_AS(tracks_from_json(nlohmann::json::parse(
                      R"({"num_frames":2,"width":8,"height":4,"objects":[{"id":0,"boxes":[[0,0,1,1]]}]})")),
                  ValidationError);
  CHECK_THROWS_AS(tracks_from_json(nlohmann::json::parse(R"({"num_frames":2})")), FormatError);
}

TEST_CASE("box IoU") {
  CHECK(iou({0, 0, 10, 10}, {0, 0, 10, 10}) == 1.0);
  CHECK(iou({0, 0, 10, 10}, {5, 0, 15, 10}) == doctest::Approx(50.0 / 150.0));
  CHECK(iou({0, 0, 2, 2}, {2, 2, 4, 4}) == 0.0);
}

TEST_CASE("flat config layering") {
  FlatConfig cfg(nlohmann::json{{"a", 1}, {"b", "x"}});
  CHECK(cfg.get<int>("a", 0) == 1);
  CHECK(cfg.get<int>("missing", 5) == 5);
  CHECK_THROWS_AS(cfg.get<int>("b", 0), ConfigError);
  FlatConfig over;
  over.set("a", 2);
  cfg.merge(over);
  CHECK(cfg.get<int>("a", 0) == 2);
  CHECK_THROWS_AS(FlatConfig(nlohmann::json{{"nested", {{"k", 1}}}}), ConfigError);
  CHECK_THROWS_AS(FlatConfig(nlohmann::json::array()), ConfigError);
}

TEST_CASE("checkpoint sidecars round-trip and reject the wrong type") {
  CheckpointMeta m;
  m.model_type = ModelType::content_vae;
  m.step = 42;
  m.config = {{"content_vae.latent_dim", 8}};
  m.config_hash = config_hash(m.config);
  const auto back = meta_from_json(meta_to_json(m));
  CHECK(back.model_type == ModelType::content_vae);
  CHECK(back.step == 42);
  CHECK(back.config == m.config);
  CHECK(config_hash(nlohmann::json{{"content_vae.latent_dim", 9}}) != m.config_hash);

  const auto dir = scratch_dir("meta");
  write_json_atomic(checkpoint_meta_path(dir, ModelType::content_vae), meta_to_json(m));
  CHECK(read_checkpoint_meta(dir, ModelType::content_vae).step == 42);
  CHECK_THROWS_AS(read_checkpoint_meta(dir, ModelType::motion_vae), IoError);
  write_json_atomic(checkpoint_meta_path(dir, ModelType::motion_vae), meta_to_json(m));
  CHECK_THROWS_AS(read_checkpoint_meta(dir, ModelType::motion_vae), ValidationError);
  write_text_atomic(checkpoint_meta_path(dir, ModelType::decoder), "{\"model_type\": 3");
  CHECK_THROWS_AS(read_checkpoint_meta(dir, ModelType::decoder), FormatError);
  CHECK_THROWS_AS(model_type_from_string("nope"), ValidationError);
}

TEST_CASE("base64 round-trip") {
  const std::vector<uint8_t> bytes{0, 1, 2, 250, 255, 10, 20};
  CHECK(base64_decode(base64_encode(bytes)) == bytes);
  CHECK(base64_encode(std::vector<uint8_t>{'M', 'a', 'n'}) == "TWFu");
  CHECK_THROWS_AS(base64_decode("abc"), FormatError);
}

TEST_CASE("episodes without tracks or motion explain the missing step") {
  const auto dir = scratch_dir("episode");
  save_video(VideoTensor::zeros({2, 4, 4, 3}), dir / "frames");
  CHECK_THROWS_WITH_AS(load_episode(dir), doctest::Contains("tracks"), IoError);
  save_tracks(BoxTrackSet{2, 4, 4, {}}, dir / "tracks.json");
  CHECK(load_episode(dir).video.frames() == 2);
  CHECK_THROWS_WITH_AS(load_episode(dir, {.motion = true}), doctest::Contains("preprocess"), IoError);
}

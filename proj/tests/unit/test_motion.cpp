#include <doctest.h>

#include <torch/torch.h>

#include <limits>
#include <random>

#include "helpers.hpp"
#include "model_fixtures.hpp"
#include "trackgen/core/checkpoint.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/motion/loss.hpp"
#include "trackgen/motion/vae.hpp"
#include "trackgen/nets/tensor.hpp"
#include "trackgen/preprocess/masks.hpp"

using namespace trackgen;
using namespace trackgen::motion;

namespace {

std::vector<BinaryVideo> tiny_motions(int count) {
  const auto world = testing::tiny_world();
  std::vector<BinaryVideo> out;
  for (int i = 0; i < count; ++i) {
    const auto ep = synth::generate_episode(world, synth::episode_seed(4, static_cast<size_t>(i)));
    out.push_back(preprocess::rasterize_tracks(ep.tracks, world.frames, world.height, world.width));
  }
  return out;
}

}  // namespace

TEST_CASE("motion loss on the 2x2 example") {
  const BinaryVideo m(1, 2, 2, {1, 0, 0, 0});
  const auto half = VideoTensor::filled({1, 2, 2, 1}, 0.5f);
  MotionLossOptions opts;
  opts.epsilon = 0.0;
  CHECK(motion_weighted_loss(m, half, opts) == doctest::Approx(0.15625).epsilon(1e-12));
  const auto t = motion_weighted_loss(nets::binary_to_tensor(m).to(torch::kFloat64),
                                      nets::video_to_tensor(half).to(torch::kFloat64), opts);
  CHECK(t.item<double>() == doctest::Approx(0.15625).epsilon(1e-12));
}

TEST_CASE("a perfect reconstruction has zero loss") {
  std::mt19937_64 rng(61);
  const auto m = testing::random_binary_video(rng, 4, 8, 8);
  CHECK(motion_weighted_loss(m, m.to_video()) == 0.0);
}

TEST_CASE("uniform weights reduce the loss to mean absolute error") {
  std::mt19937_64 rng(62);
  MotionLossOptions opts;
  opts.uniform_weights = true;
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = testing::random_binary_video(rng, 3, 6, 6);
    const auto r = testing::random_video(rng, {3, 6, 6, 1});
    double mae = 0.0;
    for (size_t i = 0; i < r.data().size(); ++i) mae += std::abs(double(r.data()[i]) - m.data()[i]);
    mae /= static_cast<double>(r.data().size());
    CHECK(std::abs(motion_weighted_loss(m, r, opts) - mae) <= 1e-7);
  }
}

TEST_CASE("tensor and domain losses agree per sample") {
  std::mt19937_64 rng(63);
  const auto a = testing::random_binary_video(rng, 2, 8, 8);
  const auto b = testing::random_binary_video(rng, 2, 8, 8, 0.1);
  const auto ra = testing::random_video(rng, {2, 8, 8, 1});
  const auto rb = testing::random_video(rng, {2, 8, 8, 1});
  const auto target = torch::stack({nets::binary_to_tensor(a), nets::binary_to_tensor(b)});
  const auto recon = torch::stack({nets::video_to_tensor(ra), nets::video_to_tensor(rb)});
  const double batch = motion_weighted_loss(target, recon).item<double>();
  CHECK(batch == doctest::Approx(0.5 * (motion_weighted_loss(a, ra) + motion_weighted_loss(b, rb))).epsilon(1e-6));
}

TEST_CASE("motion loss input validation") {
  const auto target = torch::zeros({1, 4, 4});
  auto recon = torch::zeros({1, 4, 4});
  recon[0][0][0] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(motion_weighted_loss(target, recon), NumericError);
  CHECK_THROWS_AS(motion_weighted_loss(torch::full({1, 4, 4}, 0.5), torch::zeros({1, 4, 4})), ValidationError);
}

TEST_CASE("motion VAE shapes, ranges and determinism") {
  auto model = make_motion_vae(testing::tiny_motion_config());
  const auto m = tiny_motions(1).front();
  const auto [mean1, logvar1] = encode_motion(model, m);
  const auto [mean2, logvar2] = encode_motion(model, m);
  CHECK(mean1 == mean2);
  CHECK(mean1.size() == 8);
  CHECK(mean1.kind() == LatentKind::motion);
  const auto out = decode_motion(model, LatentCode::zeros(LatentKind::motion, 8));
  CHECK(out.shape() == VideoShape{testing::kFrames, testing::kSize, testing::kSize, 1});
  for (float v : out.data()) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
  CHECK_THROWS_AS(encode_motion(model, BinaryVideo::zeros(2, 16, 16)), DimensionError);
  CHECK_THROWS_AS(decode_motion(model, LatentCode::zeros(LatentKind::motion, 9)), DimensionError);
}

TEST_CASE("motion VAE training is reproducible and decreases the loss") {
  const auto videos = tiny_motions(4);
  auto cfg = testing::tiny_motion_config();
  cfg.train.steps = 40;
  const auto a = train_motion_vae(videos, cfg);
  const auto b = train_motion_vae(videos, cfg);
  REQUIRE(a.curve.size() == 40);
  CHECK((a.curve == b.curve));
  double first = 0.0, last = 0.0;
  for (int i = 0; i < 5; ++i) {
    first += a.curve[static_cast<size_t>(i)][2];
    last += a.curve[a.curve.size() - 1 - static_cast<size_t>(i)][2];
  }
  CHECK(last < first);
}

TEST_CASE("pure autoencoder mode trains") {
  auto cfg = testing::tiny_motion_config();
  cfg.kl_weight = 0.0;
  cfg.train.steps = 3;
  const auto r = train_motion_vae(tiny_motions(2), cfg);
  for (const auto& row : r.curve) CHECK(row[1] * cfg.kl_weight == 0.0);
}

TEST_CASE("motion VAE checkpoints round-trip") {
  const auto dir = testing::scratch_dir("motion_ckpt");
  auto model = make_motion_vae(testing::tiny_motion_config());
  save_motion_vae(model, dir, 12);
  auto back = load_motion_vae(dir);
  const auto m = tiny_motions(1).front();
  CHECK(encode_motion(model, m).first == encode_motion(back, m).first);
  CHECK(back->config().channels == std::vector<int64_t>{4, 8});
  CHECK(read_checkpoint_meta(dir, ModelType::motion_vae).step == 12);
}

TEST_CASE("motion VAE config reads prefixed keys and validates") {
  FlatConfig flat(nlohmann::json{{"motion_vae.latent_dim", 16}, {"motion_vae.steps", 5}, {"seed", 9}});
  const auto c = MotionVaeConfig::from_config(flat);
  CHECK(c.latent_dim == 16);
  CHECK(c.train.steps == 5);
  CHECK(c.train.seed == 9);
  CHECK(MotionVaeConfig::from_config(FlatConfig(c.to_flat())).to_flat() == c.to_flat());
  CHECK_THROWS_AS(MotionVaeConfig::from_config(FlatConfig(nlohmann::json{{"motion_vae.epsilon", 0.0}})), ConfigError);
  CHECK_THROWS_AS(MotionVaeConfig::from_config(FlatConfig(nlohmann::json{{"motion_vae.binarize_threshold", 1.0}})),
                  ConfigError);
  CHECK_THROWS_AS(MotionVaeConfig::from_config(FlatConfig(nlohmann::json{{"motion_vae.kl_weight", -1.0}})),
                  ConfigError);
}

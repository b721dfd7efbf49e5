#include <doctest.h>

#include <torch/torch.h>

#include "helpers.hpp"
#include "model_fixtures.hpp"
#include "trackgen/adversarial/gan.hpp"
#include "trackgen/core/checkpoint.hpp"
#include "trackgen/core/error.hpp"

using namespace trackgen;
using namespace trackgen::adversarial;

namespace {

CriticFn linear_critic(const torch::Tensor& a) {
  return [a](const torch::Tensor& x) { return (x.flatten(1) * a).sum(1); };
}

torch::Tensor unit_direction(int64_t n, double norm) {
  auto a = torch::randn({n}, torch::kFloat64);
  return a / a.norm() * norm;
}

}  // namespace

TEST_CASE("gradient penalty of linear critics") {
  torch::manual_seed(0);
  auto rng = nets::make_generator(1);
  const auto real = torch::rand({3, 2, 2, 4, 4}, torch::kFloat64);
  const auto fake = torch::rand({3, 2, 2, 4, 4}, torch::kFloat64);
  CHECK(gradient_penalty(linear_critic(unit_direction(64, 1.0)), real, fake, rng).item<double>() <= 1e-6);
  CHECK(gradient_penalty(linear_critic(unit_direction(64, 2.0)), real, fake, rng).item<double>() ==
        doctest::Approx(1.0).epsilon(1e-4));
  const CriticFn ignores = [](const torch::Tensor& x) { return torch::zeros({x.size(0)}, x.options()).requires_grad_(); };
  CHECK(gradient_penalty(ignores, real, fake, rng).item<double>() == doctest::Approx(1.0));
  const CriticFn constant = [](const torch::Tensor& x) { return torch::zeros({x.size(0)}, x.options()); };
  CHECK_THROWS_AS(gradient_penalty(constant, real, fake, rng), CapabilityError);
}

TEST_CASE("critic and generator updates touch only their own weights") {
  const auto shape = testing::tiny_generator_config();
  const auto cfg = testing::tiny_gan_config();
  auto gen = generator::make_generator(shape);
  auto critic = make_critic(shape, cfg.critic, 1);
  const auto real = torch::rand({4, 3, testing::kFrames, testing::kSize, testing::kSize});
  GanTrainer trainer(gen, critic, real, cfg);

  std::vector<torch::Tensor> g0, c0;
  for (const auto& p : gen->parameters()) g0.push_back(p.clone());
  for (const auto& p : critic->parameters()) c0.push_back(p.clone());
  trainer.critic_step();
  for (size_t i = 0; i < g0.size(); ++i) CHECK(torch::equal(g0[i], gen->parameters()[i]));
  bool critic_moved = false;
  for (size_t i = 0; i < c0.size(); ++i) critic_moved = critic_moved || !torch::equal(c0[i], critic->parameters()[i]);
  CHECK(critic_moved);

  std::vector<torch::Tensor> c1;
  for (const auto& p : critic->parameters()) c1.push_back(p.clone());
  trainer.generator_step();
  for (size_t i = 0; i < c1.size(); ++i) CHECK(torch::equal(c1[i], critic->parameters()[i]));
}

TEST_CASE("GAN training runs, stays finite and checkpoints") {
  const auto dir = testing::scratch_dir("gan");
  const auto shape = testing::tiny_generator_config();
  std::vector<VideoTensor> real;
  for (int i = 0; i < 3; ++i) {
    real.push_back(synth::generate_episode(testing::tiny_world(), static_cast<uint64_t>(i)).video);
  }
  const auto r = train_gan(generator::make_generator(shape), real, testing::tiny_gan_config(), dir);
  REQUIRE(r.curve.size() == 3);
  for (const auto& s : r.curve) {
    CHECK(std::isfinite(s.critic_loss));
    CHECK(std::isfinite(s.gen_loss));
    CHECK(std::isfinite(s.gp));
  }
  CHECK(std::filesystem::exists(checkpoint_weights_path(dir, ModelType::generator)));
  CHECK(std::filesystem::exists(checkpoint_weights_path(dir, ModelType::critic)));
  CHECK(read_checkpoint_meta(dir, ModelType::generator).step == 3);
}

TEST_CASE("GAN config validation and keys") {
  FlatConfig flat(nlohmann::json{{"critic.gp_weight", 5.0}, {"gan.steps", 11}});
  const auto c = GanConfig::from_config(flat);
  CHECK(c.critic.gp_weight == 5.0);
  CHECK(c.train.steps == 11);
  CHECK(c.critic.beta1 == 0.0);
  CHECK(c.critic.beta2 == 0.9);
  CHECK_THROWS_AS(GanConfig::from_config(FlatConfig(nlohmann::json{{"critic.critic_steps", 0}})), ConfigError);
  CHECK_THROWS_AS(GanConfig::from_config(FlatConfig(nlohmann::json{{"gan.encoded_latent_ratio", 1.5}})), ConfigError);
}

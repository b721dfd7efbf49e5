#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include <torch/torch.h>

#include "trackgen/core/config.hpp"
#include "trackgen/core/video.hpp"
#include "trackgen/generator/generator.hpp"
#include "trackgen/nets/blocks.hpp"
#include "trackgen/nets/training.hpp"

namespace trackgen::adversarial {

/// Critic settings; flat keys under `critic.`.
struct CriticConfig {
  std::vector<int64_t> channels{16, 32, 64};
  double gp_weight = 10.0;
  long critic_steps = 5;
  double learning_rate = 1e-4;
  double beta1 = 0.0;
  double beta2 = 0.9;

  void validate() const;
};

/// Stage-2 settings; flat keys under `gan.` (steps, batch_size,
/// learning_rate, seed, log_every, encoded_latent_ratio) plus `critic.*`.
/// One step is critic_steps critic updates followed by one generator update.
struct GanConfig {
  CriticConfig critic;
  nets::TrainOptions train{200, 4, 1e-4, 0, 25};
  /// Fraction of each fake batch built from encoded dataset latents instead of
  /// N(0, I) samples.
  double encoded_latent_ratio = 0.0;

  void validate() const;
  nlohmann::json to_flat() const;
  static GanConfig from_config(const FlatConfig& cfg);
};

/// Unbounded scalar score per video; no output nonlinearity.
class CriticImpl : public torch::nn::Module {
 public:
  CriticImpl(const generator::GeneratorConfig& shape, const CriticConfig& cfg);
  /// (B, C, n, H, W) -> (B).
  torch::Tensor forward(const torch::Tensor& videos);

 private:
  int64_t channels_;
  nets::Extent3 extent_;
  nets::VideoEncoder net_{nullptr};
};
TORCH_MODULE(Critic);

Critic make_critic(const generator::GeneratorConfig& shape, const CriticConfig& cfg, uint64_t seed);

double critic_score(Critic& critic, const VideoTensor& video);

using CriticFn = std::function<torch::Tensor(const torch::Tensor&)>;

/// mean over the batch of (||grad_x critic(x)||_2 - 1)^2 at x = u*real +
/// (1-u)*fake, one u ~ U(0,1) per sample drawn from `rng`. The result keeps
/// its graph so it can be backpropagated into the critic. A critic output
/// that does not depend on anything differentiable raises CapabilityError; an
/// output that ignores x has zero gradient and gives a penalty of 1.
torch::Tensor gradient_penalty(const CriticFn& critic, const torch::Tensor& real, const torch::Tensor& fake,
                               torch::Generator& rng);

struct GanStepLosses {
  double critic_loss = 0.0;
  double gen_loss = 0.0;
  double gp = 0.0;
};

/// Alternating WGAN-GP updates with separate Adam optimizers, so a critic
/// update never touches generator weights and vice versa.
class GanTrainer {
 public:
  /// `real` is (N, C, n, H, W). `encoded` supplies dataset latents for the
  /// encoded_latent_ratio share of fakes.
  GanTrainer(generator::Generator gen, Critic critic, torch::Tensor real, GanConfig cfg,
             std::optional<generator::EpisodeLatents> encoded = std::nullopt);

  /// One critic update; returns (critic loss, gp).
  std::pair<double, double> critic_step();
  /// One generator update; returns the generator loss.
  double generator_step();
  /// critic_steps critic updates then one generator update.
  GanStepLosses step(long index);

  generator::Generator& generator() { return gen_; }
  Critic& critic() { return critic_; }

 private:
  torch::Tensor fake_batch();

  generator::Generator gen_;
  Critic critic_;
  torch::Tensor real_;
  GanConfig cfg_;
  std::optional<generator::EpisodeLatents> encoded_;
  torch::Generator rng_;
  torch::optim::Adam gen_opt_;
  torch::optim::Adam critic_opt_;
};

struct GanTrainResult {
  generator::Generator generator{nullptr};
  Critic critic{nullptr};
  std::vector<GanStepLosses> curve;
};

/// Runs cfg.train.steps steps starting from a stage-1 generator. When
/// `out_dir` is non-empty, generator and critic checkpoints are written there
/// every log_every steps and at the end; a non-finite loss throws
/// TrainingError and leaves the last good checkpoints in place.
GanTrainResult train_gan(generator::Generator gen, const std::vector<VideoTensor>& real, const GanConfig& cfg,
                         const std::filesystem::path& out_dir = {}, nets::LossLog* log = nullptr,
                         std::optional<generator::EpisodeLatents> encoded = std::nullopt);

void save_critic(const Critic& critic, const generator::GeneratorConfig& shape, const GanConfig& cfg,
                 const std::filesystem::path& dir, long step);

}  // namespace trackgen::adversarial

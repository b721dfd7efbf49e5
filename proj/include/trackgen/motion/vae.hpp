#pragma once

#include <array>
#include <filesystem>
#include <utility>
#include <vector>

#include <torch/torch.h>

#include "trackgen/core/config.hpp"
#include "trackgen/core/latent.hpp"
#include "trackgen/core/video.hpp"
#include "trackgen/motion/loss.hpp"
#include "trackgen/nets/blocks.hpp"
#include "trackgen/nets/training.hpp"

namespace trackgen::motion {

/// Motion VAE settings. Flat config keys live under `motion_vae.`:
/// frames, height, width, latent_dim, channels, epsilon, lambda_factor,
/// lambda, binarize_threshold, kl_weight, steps, batch_size, learning_rate,
/// seed, log_every.
struct MotionVaeConfig {
  int64_t frames = 16;
  int64_t height = 64;
  int64_t width = 64;
  int64_t latent_dim = 128;
  /// 3D conv widths, shallow to deep; each layer halves n, H and W.
  std::vector<int64_t> channels{16, 32, 64};
  MotionLossOptions loss;
  double kl_weight = 1e-3;
  nets::TrainOptions train{2000, 8, 1e-3, 0, 50};

  void validate() const;
  nlohmann::json to_flat() const;
  static MotionVaeConfig from_config(const FlatConfig& cfg);
};

class MotionVaeImpl : public torch::nn::Module {
 public:
  explicit MotionVaeImpl(MotionVaeConfig cfg);

  /// (B, 1, n, H, W) in {0,1} -> (mean, logvar), each (B, latent_dim).
  std::pair<torch::Tensor, torch::Tensor> encode(const torch::Tensor& motion);
  /// (B, latent_dim) -> (B, 1, n, H, W) in [0,1].
  torch::Tensor decode(const torch::Tensor& latent);

  const MotionVaeConfig& config() const { return cfg_; }

 private:
  MotionVaeConfig cfg_;
  nets::VideoEncoder encoder_{nullptr};
  nets::VideoDecoder decoder_{nullptr};
};
TORCH_MODULE(MotionVae);

/// Builds a freshly initialized model; initialization depends on cfg.train.seed only.
MotionVae make_motion_vae(const MotionVaeConfig& cfg);

std::pair<LatentCode, LatentCode> encode_motion(MotionVae& model, const BinaryVideo& motion);
/// Real-valued single-channel reconstruction in [0,1].
VideoTensor decode_motion(MotionVae& model, const LatentCode& latent);

struct MotionTrainResult {
  MotionVae model{nullptr};
  /// Per step: motion weighted loss, KL, total objective.
  std::vector<std::array<double, 3>> curve;
};

/// Minimizes L_MW + kl_weight * KL over `videos`. With kl_weight == 0 the
/// model runs as a plain autoencoder (decodes the posterior mean). Appends
/// rows to `log` when given. Throws TrainingError on a non-finite loss.
MotionTrainResult train_motion_vae(const std::vector<BinaryVideo>& videos, const MotionVaeConfig& cfg,
                                   nets::LossLog* log = nullptr);

/// Mean L_MW of decode(encode mean) over `videos`.
double motion_reconstruction_loss(MotionVae& model, const std::vector<BinaryVideo>& videos);

void save_motion_vae(const MotionVae& model, const std::filesystem::path& dir, long step);
MotionVae load_motion_vae(const std::filesystem::path& dir);

}  // namespace trackgen::motion

#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include <torch/torch.h>

#include "trackgen/content/vae.hpp"
#include "trackgen/core/config.hpp"
#include "trackgen/core/dataset.hpp"
#include "trackgen/core/latent.hpp"
#include "trackgen/core/video.hpp"
#include "trackgen/motion/vae.hpp"
#include "trackgen/nets/blocks.hpp"
#include "trackgen/nets/training.hpp"

namespace trackgen::generator {

/// Decoder + super-resolution settings; flat keys under `generator.` (the
/// stage-1 loop reads `decoder.steps`, `decoder.batch_size`, ...).
struct GeneratorConfig {
  int64_t frames = 16;
  int64_t height = 64;
  int64_t width = 64;
  int64_t image_channels = 3;
  int64_t motion_dim = 128;
  int64_t content_dim = 128;
  int64_t noise_dim = 64;
  /// Transposed 3D conv widths of the decoder, given shallow to deep.
  std::vector<int64_t> decoder_channels{16, 32, 64};
  /// SR: z is projected to this many channels and broadcast over the video.
  int64_t sr_noise_channels = 4;
  int64_t sr_hidden = 16;
  /// Std of the SR output layer at initialization; small keeps SR near identity.
  double sr_init_std = 1e-3;
  nets::TrainOptions train{1500, 4, 1e-3, 0, 50};

  void validate() const;
  nlohmann::json to_flat() const;
  static GeneratorConfig from_config(const FlatConfig& cfg);
  /// Throws ConfigError when the latent sizes disagree with the VAEs.
  void require_compatible(const motion::MotionVaeConfig& m, const content::ContentVaeConfig& c) const;
};

/// D: concatenated (motion, content) latents -> rough video in [0,1].
class DecoderImpl : public torch::nn::Module {
 public:
  explicit DecoderImpl(const GeneratorConfig& cfg);
  /// (B, motion_dim), (B, content_dim) -> (B, C, n, H, W).
  torch::Tensor forward(const torch::Tensor& motion, const torch::Tensor& content);

 private:
  int64_t motion_dim_;
  int64_t content_dim_;
  nets::VideoDecoder net_{nullptr};
};
TORCH_MODULE(Decoder);

/// SR: residual refiner conditioned on noise. The projected noise is tiled over
/// every frame and pixel and concatenated to the input; the residual is added
/// in logit space so the output stays in (0,1).
class SuperResImpl : public torch::nn::Module {
 public:
  explicit SuperResImpl(const GeneratorConfig& cfg);
  torch::Tensor forward(const torch::Tensor& rough, const torch::Tensor& noise);

 private:
  int64_t noise_dim_;
  torch::nn::Linear project_{nullptr};
  torch::nn::Conv3d hidden_{nullptr};
  torch::nn::Conv3d out_{nullptr};
};
TORCH_MODULE(SuperRes);

class GeneratorImpl : public torch::nn::Module {
 public:
  explicit GeneratorImpl(GeneratorConfig cfg);
  torch::Tensor forward(const torch::Tensor& motion, const torch::Tensor& content, const torch::Tensor& noise);

  Decoder& decoder() { return decoder_; }
  SuperRes& super_res() { return sr_; }
  const GeneratorConfig& config() const { return cfg_; }

 private:
  GeneratorConfig cfg_;
  Decoder decoder_{nullptr};
  SuperRes sr_{nullptr};
};
TORCH_MODULE(Generator);

Generator make_generator(const GeneratorConfig& cfg);

/// mean |rough - target| over every element; gradients reach `rough`.
torch::Tensor decoder_reconstruction_loss(const torch::Tensor& rough, const torch::Tensor& target);
double decoder_reconstruction_loss(const VideoTensor& rough, const VideoTensor& target);

VideoTensor decode_video(Generator& model, const LatentCode& motion, const LatentCode& content);
VideoTensor super_resolve(Generator& model, const VideoTensor& rough, const LatentCode& noise);

/// Posterior-mean latents of one episode: E_m(motion), E_c(first frame).
struct EpisodeLatents {
  torch::Tensor motion;
  torch::Tensor content;
};

/// Encodes every episode (which must carry motion/). Rows follow `episodes`.
EpisodeLatents encode_episodes(motion::MotionVae& mvae, content::ContentVae& cvae,
                               const std::vector<Episode>& episodes);

struct DecoderTrainResult {
  Generator model{nullptr};
  std::vector<double> curve;
};

/// Stage 1: only D is optimized against the episodes' videos, from the VAEs'
/// posterior means. Throws TrainingError if either VAE changed during the run.
DecoderTrainResult train_decoder(const std::vector<Episode>& episodes, motion::MotionVae& mvae,
                                 content::ContentVae& cvae, const GeneratorConfig& cfg,
                                 nets::LossLog* log = nullptr);

/// Mean L_D of D over `episodes`.
double decoder_loss_on(Generator& model, motion::MotionVae& mvae, content::ContentVae& cvae,
                       const std::vector<Episode>& episodes);

/// `decoder.pt` holds D alone, `generator.pt` holds D and SR.
void save_decoder(Generator& model, const std::filesystem::path& dir, long step);
void save_generator(const Generator& model, const std::filesystem::path& dir, long step);
/// Prefers a stage-2 generator checkpoint; falls back to the stage-1 decoder
/// with freshly initialized (near-identity) SR.
Generator load_generator(const std::filesystem::path& dir);

}  // namespace trackgen::generator

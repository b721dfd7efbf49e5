#pragma once

#include <filesystem>
#include <vector>

#include <torch/torch.h>

#include "trackgen/core/config.hpp"
#include "trackgen/core/video.hpp"
#include "trackgen/nets/blocks.hpp"
#include "trackgen/nets/training.hpp"
#include "trackgen/preprocess/prepare.hpp"

namespace trackgen::preprocess {

/// Plain (non-variational) frame autoencoder trained with L1 on every frame of
/// a fixed-camera dataset; its narrow bottleneck keeps the static background
/// and drops small moving objects. Keys live under `background_ae.`.
struct BackgroundAeConfig {
  int64_t height = 64;
  int64_t width = 64;
  int64_t image_channels = 3;
  int64_t latent_dim = 32;
  std::vector<int64_t> channels{16, 32, 64};
  nets::TrainOptions train{600, 16, 2e-3, 0, 50};

  void validate() const;
  nlohmann::json to_flat() const;
  static BackgroundAeConfig from_config(const FlatConfig& cfg);
};

class BackgroundAeImpl : public torch::nn::Module {
 public:
  explicit BackgroundAeImpl(BackgroundAeConfig cfg);
  /// (B, C, H, W) -> reconstruction in [0,1].
  torch::Tensor forward(const torch::Tensor& frames);
  const BackgroundAeConfig& config() const { return cfg_; }

 private:
  BackgroundAeConfig cfg_;
  nets::FrameEncoder encoder_{nullptr};
  nets::FrameDecoder decoder_{nullptr};
};
TORCH_MODULE(BackgroundAe);

BackgroundAe make_background_ae(const BackgroundAeConfig& cfg);

struct BackgroundTrainResult {
  BackgroundAe model{nullptr};
  std::vector<double> curve;
};

/// Trains on every frame of every video. Zero steps is valid and yields the
/// initialized model.
BackgroundTrainResult train_background_ae(const std::vector<VideoTensor>& videos, const BackgroundAeConfig& cfg,
                                          nets::LossLog* log = nullptr);

/// Per-frame reconstruction of `video`.
VideoTensor reconstruct_background(BackgroundAe& model, const VideoTensor& video);

/// Mean absolute error between the reconstruction of `video` and `target`
/// (a single frame or one per frame).
double background_l1(BackgroundAe& model, const VideoTensor& video, const VideoTensor& target);

/// Background estimate backed by the autoencoder.
BackgroundFn autoencoder_background(BackgroundAe model);

void save_background_ae(const BackgroundAe& model, const std::filesystem::path& dir, long step);
BackgroundAe load_background_ae(const std::filesystem::path& dir);

}  // namespace trackgen::preprocess

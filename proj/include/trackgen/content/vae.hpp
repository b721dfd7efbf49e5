#pragma once

#include <array>
#include <filesystem>
#include <utility>
#include <vector>

#include <torch/torch.h>

#include "trackgen/core/config.hpp"
#include "trackgen/core/dataset.hpp"
#include "trackgen/core/latent.hpp"
#include "trackgen/core/video.hpp"
#include "trackgen/nets/blocks.hpp"
#include "trackgen/nets/training.hpp"

namespace trackgen::content {

/// Which mask restricts the content loss: the refined foreground mask of
/// preprocessing or the rasterized motion reference.
enum class MaskSource { refined, motion_ref };

std::string to_string(MaskSource source);
MaskSource mask_source_from_string(const std::string& name);

/// Content VAE settings; flat keys under `content_vae.`.
struct ContentVaeConfig {
  int64_t height = 64;
  int64_t width = 64;
  int64_t image_channels = 3;
  int64_t latent_dim = 128;
  std::vector<int64_t> channels{32, 64, 128};
  double kl_weight = 1e-3;
  MaskSource mask_source = MaskSource::refined;
  nets::TrainOptions train{2000, 16, 1e-3, 0, 50};

  void validate() const;
  nlohmann::json to_flat() const;
  static ContentVaeConfig from_config(const FlatConfig& cfg);
};

/// mean(|recon - frame| * mask) over all B*C*H*W elements for (B, C, H, W)
/// frames and a (B, 1, H, W) 0/1 mask; gradients reach `recon` only.
torch::Tensor content_weighted_loss(const torch::Tensor& frame, const torch::Tensor& recon, const torch::Tensor& mask);

class ContentVaeImpl : public torch::nn::Module {
 public:
  explicit ContentVaeImpl(ContentVaeConfig cfg);
  /// (B, C, H, W) -> (mean, logvar), each (B, latent_dim).
  std::pair<torch::Tensor, torch::Tensor> encode(const torch::Tensor& frames);
  /// (B, latent_dim) -> (B, C, H, W) in [0,1].
  torch::Tensor decode(const torch::Tensor& latent);
  const ContentVaeConfig& config() const { return cfg_; }

 private:
  ContentVaeConfig cfg_;
  nets::FrameEncoder encoder_{nullptr};
  nets::FrameDecoder decoder_{nullptr};
};
TORCH_MODULE(ContentVae);

ContentVae make_content_vae(const ContentVaeConfig& cfg);

std::pair<LatentCode, LatentCode> encode_content(ContentVae& model, const VideoTensor& frame);
VideoTensor decode_content(ContentVae& model, const LatentCode& latent);

/// A content reference frame and the mask its loss is restricted to.
struct ContentSample {
  VideoTensor frame;
  BinaryVideo mask;
};

/// First frame of each episode with its first mask frame from `source`.
/// Throws IoError when an episode lacks the needed mask video.
std::vector<ContentSample> content_samples(const std::vector<Episode>& episodes, MaskSource source);

struct ContentTrainResult {
  ContentVae model{nullptr};
  /// Per step: content weighted loss, KL, total objective.
  std::vector<std::array<double, 3>> curve;
};

ContentTrainResult train_content_vae(const std::vector<ContentSample>& samples, const ContentVaeConfig& cfg,
                                     nets::LossLog* log = nullptr);

/// Mean masked L1 of decode(encode mean) over `samples`.
double content_reconstruction_loss(ContentVae& model, const std::vector<ContentSample>& samples);

void save_content_vae(const ContentVae& model, const std::filesystem::path& dir, long step);
ContentVae load_content_vae(const std::filesystem::path& dir);

}  // namespace trackgen::content

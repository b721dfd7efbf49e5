#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <torch/script.h>
#include <torch/torch.h>

#include "trackgen/content/vae.hpp"
#include "trackgen/core/dataset.hpp"
#include "trackgen/core/video.hpp"
#include "trackgen/eval/metrics.hpp"
#include "trackgen/generator/pipeline.hpp"

namespace trackgen::eval {

/// Frame -> fixed-length feature vector used for FID.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::string name() const = 0;
  virtual int64_t dim() const = 0;

  /// One row per frame of every video, in order.
  Eigen::MatrixXd frame_features(const std::vector<VideoTensor>& videos);

 protected:
  /// (B, C, H, W) frames in [0,1] -> (B, dim).
  virtual torch::Tensor embed(const torch::Tensor& frames) = 0;
};

/// Posterior means of a trained content VAE encoder. Needs no network access.
class AeFeatureExtractor final : public FeatureExtractor {
 public:
  explicit AeFeatureExtractor(content::ContentVae model);
  std::string name() const override { return "trained_ae_features"; }
  int64_t dim() const override;

 protected:
  torch::Tensor embed(const torch::Tensor& frames) override;

 private:
  content::ContentVae model_;
};

/// A TorchScript module (e.g. an exported pretrained classifier trunk) mapping
/// (B, C, H, W) frames to (B, d) features. The dimension is probed once with a
/// zero batch of the given frame shape.
class ScriptedFeatureExtractor final : public FeatureExtractor {
 public:
  ScriptedFeatureExtractor(torch::jit::Module module, int64_t channels, int64_t height, int64_t width);
  /// Throws IoError when the file cannot be loaded.
  static ScriptedFeatureExtractor load(const std::filesystem::path& path, int64_t channels, int64_t height,
                                       int64_t width);
  std::string name() const override { return "scripted_features"; }
  int64_t dim() const override { return dim_; }

 protected:
  torch::Tensor embed(const torch::Tensor& frames) override;

 private:
  torch::jit::Module module_;
  int64_t dim_ = 0;
};

/// Set-based FID protocol: num_sets sets of videos_per_set generated videos,
/// each scored against the reference set's frame features.
struct EvalProtocol {
  int num_sets = 5;
  int videos_per_set = 50;
  generator::GenerateMode mode = generator::GenerateMode::unconditional;
  uint64_t seed = 0;
  int resamples = 1000;
  double level = 0.95;

  void validate() const;
  nlohmann::json to_json() const;
  /// Missing keys keep their defaults.
  static EvalProtocol from_json(const nlohmann::json& j);
};

/// Generates the protocol's sets (video j of set s uses seed
/// seed + s * videos_per_set + j; controlled mode cycles through the reference
/// episodes' first frames and tracks), scores each set by frame-level FID
/// against `reference`, and summarizes with bootstrap_ci.
EvalReport evaluate_model(const generator::Pipeline& pipeline, const std::vector<Episode>& reference,
                          FeatureExtractor& extractor, const EvalProtocol& protocol);

}  // namespace trackgen::eval

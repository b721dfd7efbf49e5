#pragma once

#include <optional>

#include <torch/torch.h>

#include "trackgen/core/video.hpp"

namespace trackgen::motion {

struct MotionLossOptions {
  /// Added to both weight numerators; 0 is allowed here (config requires > 0).
  double epsilon = 1.0;
  /// lambda = lambda_factor * W_fg unless `lambda` is set.
  double lambda_factor = 2.0;
  std::optional<double> lambda;
  double binarize_threshold = 0.5;
  /// Test hook: W = 1 everywhere and no change weights, so the loss becomes a
  /// plain mean absolute error.
  bool uniform_weights = false;
};

/// Motion weighted loss mean(|target - recon| * (W + W_diff)).
///
/// `target` and `recon` are (B, 1, n, H, W) or a single (1, n, H, W) /
/// (n, H, W) video. Weights are recomputed per sample from `target` and recon
/// binarized at binarize_threshold; they are constants for autograd, so the
/// gradient reaches `recon` through the absolute difference only. Throws
/// NumericError for non-finite recon and ValidationError for a non-binary
/// target.
torch::Tensor motion_weighted_loss(const torch::Tensor& target, const torch::Tensor& recon,
                                   const MotionLossOptions& opts = {});

/// Same loss on domain types, evaluated in double precision.
double motion_weighted_loss(const BinaryVideo& target, const VideoTensor& recon, const MotionLossOptions& opts = {});

}  // namespace trackgen::motion

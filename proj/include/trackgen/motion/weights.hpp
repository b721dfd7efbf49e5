#pragma once

#include <cstdint>
#include <vector>

#include "trackgen/core/video.hpp"

namespace trackgen::motion {

/// Per-pixel nonnegative weights over (n, H, W).
struct WeightMatrix {
  int64_t frames = 0;
  int64_t height = 0;
  int64_t width = 0;
  std::vector<double> values;

  double at(int64_t t, int64_t y, int64_t x) const {
    return values[static_cast<size_t>((t * height + y) * width + x)];
  }
};

/// Scalar weights and the matrix they expand to.
struct BalanceWeights {
  double foreground = 0.0;
  double background = 0.0;
  WeightMatrix matrix;
};

/// Foreground/background balance weights of a motion reference video and its
/// (binarized) reconstruction:
///
///   fg     = target OR recon
///   W_bg   = (N(target) + N(recon) + eps) / (2|M|)
///   W_fg   = (2|M| - N(target) - N(recon) + eps) / (2|M|)
///   W(p)   = fg(p) ? W_fg : W_bg
///
/// With recon == target and eps == 0 the foreground and background weight
/// masses are equal.
BalanceWeights compute_balance_weights(const BinaryVideo& target, const BinaryVideo& recon, double epsilon);

/// Change weights: frame 0 is zero, frame t > 0 is lambda where
/// target[t] XOR target[t-1], else 0.
WeightMatrix compute_diff_weights(const BinaryVideo& target, double lambda);

}  // namespace trackgen::motion

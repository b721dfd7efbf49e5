#pragma once

// OpenMP kernels used by the pipeline. Each has a serial twin with the same
// signature in reference.hpp. Reductions sum fixed-size chunk partials in
// index order, so results are independent of the thread count.

#include <span>

#include "trackgen/kernels/types.hpp"

namespace trackgen::kernels::parallel {

/// out[t,y,x] = 1 iff (y,x) lies inside at least one box of frame t.
void rasterize(Extent extent, std::span<const FrameBox> boxes, std::span<uint8_t> out);

/// out = video * mask, mask broadcast over channels.
void apply_mask(std::span<const float> video, int64_t channels, std::span<const uint8_t> mask,
                std::span<float> out);

int64_t count_ones(std::span<const uint8_t> mask);

/// out = values > threshold
void binarize(std::span<const float> values, float threshold, std::span<uint8_t> out);
void binarize(std::span<const double> values, double threshold, std::span<uint8_t> out);

/// Foreground/background balance over one video. Foreground is target OR
/// recon; out receives the per-pixel weight.
BalanceScalars balance_weights(std::span<const uint8_t> target, std::span<const uint8_t> recon, double epsilon,
                               std::span<double> out);

/// Frame 0 is all zero; frame t > 0 holds lambda where mask[t] XOR mask[t-1].
void diff_weights(Extent extent, std::span<const uint8_t> mask, double lambda, std::span<double> out);

/// mean(|pred - target| * weights). Empty weights means all ones.
double weighted_abs_mean(std::span<const float> target, std::span<const float> pred, std::span<const float> weights);
double weighted_abs_mean(std::span<const double> target, std::span<const double> pred,
                         std::span<const double> weights);

/// out = scale * sign(pred - target) * weights / N, with sign(0) = 0.
void weighted_abs_grad(std::span<const float> target, std::span<const float> pred, std::span<const float> weights,
                       double scale, std::span<float> out);
void weighted_abs_grad(std::span<const double> target, std::span<const double> pred,
                       std::span<const double> weights, double scale, std::span<double> out);

/// Mean over every element of |pred - target| * mask; mask is per pixel and
/// broadcast over the trailing channel axis.
double masked_abs_mean(std::span<const float> target, std::span<const float> pred, int64_t channels,
                       std::span<const uint8_t> mask);
double masked_abs_mean(std::span<const double> target, std::span<const double> pred, int64_t channels,
                       std::span<const uint8_t> mask);
void masked_abs_grad(std::span<const float> target, std::span<const float> pred, int64_t channels,
                     std::span<const uint8_t> mask, double scale, std::span<float> out);
void masked_abs_grad(std::span<const double> target, std::span<const double> pred, int64_t channels,
                     std::span<const uint8_t> mask, double scale, std::span<double> out);

/// out[p] = max_c |frames[p,c] - background[p,c]| > tau. `frames` may hold
/// several frames sharing one background frame.
void threshold_difference(std::span<const float> frames, std::span<const float> background, int64_t channels,
                          float tau, std::span<uint8_t> out);

/// Nonzero support of a k x k Gaussian blur of each frame of `mask`. Pixels
/// outside the frame count as 0.
void widen_mask(Extent extent, std::span<const uint8_t> mask, int kernel_size, std::span<uint8_t> out);

int max_threads();

}  // namespace trackgen::kernels::parallel

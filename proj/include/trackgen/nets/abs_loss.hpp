#pragma once

#include <torch/torch.h>

namespace trackgen::nets {

/// mean(|pred - target| * weights) over every element. `weights` (same shape
/// as pred, or undefined for all ones) and `target` are constants: gradients
/// flow into `pred` only. Forward and backward run the OpenMP kernels; float32
/// and float64 are supported.
torch::Tensor weighted_abs_loss(const torch::Tensor& pred, const torch::Tensor& target,
                                const torch::Tensor& weights = {});

/// mean(|pred - target| * mask) for (B, C, H, W) frames and a (B, 1, H, W) or
/// (B, H, W) 0/1 mask broadcast over channels. The mean runs over all
/// B*C*H*W elements.
torch::Tensor masked_abs_loss(const torch::Tensor& pred, const torch::Tensor& target, const torch::Tensor& mask);

}  // namespace trackgen::nets

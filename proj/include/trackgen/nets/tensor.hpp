#pragma once

#include <span>

#include <torch/torch.h>

#include "trackgen/core/video.hpp"

namespace trackgen::nets {

// Network tensors are channel-first: videos (C, n, H, W), batches
// (B, C, n, H, W), frames (C, H, W).

torch::Tensor video_to_tensor(const VideoTensor& v);
torch::Tensor videos_to_batch(std::span<const VideoTensor> videos);
/// Accepts (C, n, H, W) or (1, C, n, H, W). Values must already lie in [0,1].
VideoTensor tensor_to_video(const torch::Tensor& t);

torch::Tensor frame_to_tensor(const VideoTensor& v, int64_t t = 0);
/// (C, H, W) -> single-frame VideoTensor.
VideoTensor tensor_to_frame(const torch::Tensor& chw);

/// (1, n, H, W) float tensor of 0/1.
torch::Tensor binary_to_tensor(const BinaryVideo& b);
/// Elements > threshold become 1; accepts (1, n, H, W) or (n, H, W).
BinaryVideo tensor_to_binary(const torch::Tensor& t, double threshold = 0.5);

}  // namespace trackgen::nets

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <torch/torch.h>

namespace trackgen::nets {

/// Spatial (and temporal) extent of a network input.
struct Extent3 {
  int64_t frames = 1;
  int64_t height = 0;
  int64_t width = 0;
};

/// Stride-2 3D convolutions (kernel 4, pad 1), one per entry of `channels`,
/// then a linear head producing `out_features`. Every axis of `extent` must be
/// divisible by 2^depth.
class VideoEncoderImpl : public torch::nn::Module {
 public:
  VideoEncoderImpl(int64_t in_channels, Extent3 extent, std::vector<int64_t> channels, int64_t out_features);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Sequential convs_{nullptr};
  torch::nn::Linear head_{nullptr};
};
TORCH_MODULE(VideoEncoder);

/// Mirror of VideoEncoder: linear stem, transposed 3D convolutions back to
/// `extent`, output logits with `out_channels` channels. `channels` is given
/// in encoder order (shallow to deep).
class VideoDecoderImpl : public torch::nn::Module {
 public:
  VideoDecoderImpl(int64_t in_features, int64_t out_channels, Extent3 extent, std::vector<int64_t> channels);
  torch::Tensor forward(const torch::Tensor& z);

 private:
  torch::nn::Linear stem_{nullptr};
  torch::nn::Sequential deconvs_{nullptr};
  std::vector<int64_t> seed_shape_;
};
TORCH_MODULE(VideoDecoder);

/// 2D counterparts for single frames.
class FrameEncoderImpl : public torch::nn::Module {
 public:
  FrameEncoderImpl(int64_t in_channels, int64_t height, int64_t width, std::vector<int64_t> channels,
                   int64_t out_features);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Sequential convs_{nullptr};
  torch::nn::Linear head_{nullptr};
};
TORCH_MODULE(FrameEncoder);

class FrameDecoderImpl : public torch::nn::Module {
 public:
  FrameDecoderImpl(int64_t in_features, int64_t out_channels, int64_t height, int64_t width,
                   std::vector<int64_t> channels);
  torch::Tensor forward(const torch::Tensor& z);

 private:
  torch::nn::Linear stem_{nullptr};
  torch::nn::Sequential deconvs_{nullptr};
  std::vector<int64_t> seed_shape_;
};
TORCH_MODULE(FrameDecoder);

/// mean + exp(logvar / 2) * eps with eps drawn from `gen`.
torch::Tensor reparameterize(const torch::Tensor& mean, const torch::Tensor& logvar, torch::Generator& gen);

/// KL(N(mean, exp(logvar)) || N(0, I)), summed over latent dims and averaged
/// over the batch.
torch::Tensor kl_divergence(const torch::Tensor& mean, const torch::Tensor& logvar);

/// CPU generator seeded deterministically.
torch::Generator make_generator(uint64_t seed);

/// Runs `build` with the global torch RNG seeded to `seed`, serialized with
/// every other seeded construction, so module initialization is reproducible.
void with_seeded_init(uint64_t seed, const std::function<void()>& build);

/// Flat copy of all parameters, for bit-exact before/after comparisons.
std::vector<torch::Tensor> snapshot_parameters(const torch::nn::Module& module);
bool parameters_equal(const std::vector<torch::Tensor>& a, const std::vector<torch::Tensor>& b);

}  // namespace trackgen::nets

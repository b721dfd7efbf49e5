#include "trackgen/nets/blocks.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include <mutex>
#include <string>

#include "trackgen/core/error.hpp"

namespace trackgen::nets {

namespace nn = torch::nn;

namespace {

constexpr double kLeak = 0.2;

void require_divisible(int64_t size, size_t depth, const char* axis) {
  const int64_t factor = int64_t{1} << depth;
  if (size % factor != 0 || size < factor) {
    throw DimensionError(std::string(axis) + " = " + std::to_string(size) + " is not divisible by 2^" +
                         std::to_string(depth));
  }
}

void require_channels(const std::vector<int64_t>& channels) {
  if (channels.empty()) throw ConfigError("network needs at least one conv layer");
  for (auto c : channels) {
    if (c < 1) throw ConfigError("conv channel widths must be >= 1");
  }
}

}  // namespace

VideoEncoderImpl::VideoEncoderImpl(int64_t in_channels, Extent3 extent, std::vector<int64_t> channels,
                                   int64_t out_features) {
  require_channels(channels);
  require_divisible(extent.frames, channels.size(), "frames");
  require_divisible(extent.height, channels.size(), "height");
  require_divisible(extent.width, channels.size(), "width");
  convs_ = nn::Sequential();
  int64_t c_in = in_channels;
  for (auto c : channels) {
    convs_->push_back(nn::Conv3d(nn::Conv3dOptions(c_in, c, 4).stride(2).padding(1)));
    convs_->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(kLeak)));
    c_in = c;
  }
  const int64_t shrink = int64_t{1} << channels.size();
  const int64_t flat = c_in * (extent.frames / shrink) * (extent.height / shrink) * (extent.width / shrink);
  head_ = nn::Linear(flat, out_features);
  register_module("convs", convs_);
  register_module("head", head_);
}

torch::Tensor VideoEncoderImpl::forward(const torch::Tensor& x) { return head_->forward(convs_->forward(x).flatten(1)); }

VideoDecoderImpl::VideoDecoderImpl(int64_t in_features, int64_t out_channels, Extent3 extent,
                                   std::vector<int64_t> channels) {
  require_channels(channels);
  require_divisible(extent.frames, channels.size(), "frames");
  require_divisible(extent.height, channels.size(), "height");
  require_divisible(extent.width, channels.size(), "width");
  const int64_t shrink = int64_t{1} << channels.size();
  seed_shape_ = {channels.back(), extent.frames / shrink, extent.height / shrink, extent.width / shrink};
  stem_ = nn::Linear(in_features, seed_shape_[0] * seed_shape_[1] * seed_shape_[2] * seed_shape_[3]);
  deconvs_ = nn::Sequential();
  for (size_t i = channels.size(); i-- > 0;) {
    const int64_t c_out = i == 0 ? out_channels : channels[i - 1];
    deconvs_->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(kLeak)));
    deconvs_->push_back(nn::ConvTranspose3d(nn::ConvTranspose3dOptions(channels[i], c_out, 4).stride(2).padding(1)));
  }
  register_module("stem", stem_);
  register_module("deconvs", deconvs_);
}

torch::Tensor VideoDecoderImpl::forward(const torch::Tensor& z) {
  auto h = stem_->forward(z).view({z.size(0), seed_shape_[0], seed_shape_[1], seed_shape_[2], seed_shape_[3]});
  return deconvs_->forward(h);
}

FrameEncoderImpl::FrameEncoderImpl(int64_t in_channels, int64_t height, int64_t width, std::vector<int64_t> channels,
                                   int64_t out_features) {
  require_channels(channels);
  require_divisible(height, channels.size(), "height");
  require_divisible(width, channels.size(), "width");
  convs_ = nn::Sequential();
  int64_t c_in = in_channels;
  for (auto c : channels) {
    convs_->push_back(nn::Conv2d(nn::Conv2dOptions(c_in, c, 4).stride(2).padding(1)));
    convs_->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(kLeak)));
    c_in = c;
  }
  const int64_t shrink = int64_t{1} << channels.size();
  head_ = nn::Linear(c_in * (height / shrink) * (width / shrink), out_features);
  register_module("convs", convs_);
  register_module("head", head_);
}

torch::Tensor FrameEncoderImpl::forward(const torch::Tensor& x) { return head_->forward(convs_->forward(x).flatten(1)); }

FrameDecoderImpl::FrameDecoderImpl(int64_t in_features, int64_t out_channels, int64_t height, int64_t width,
                                   std::vector<int64_t> channels) {
  require_channels(channels);
  require_divisible(height, channels.size(), "height");
  require_divisible(width, channels.size(), "width");
  const int64_t shrink = int64_t{1} << channels.size();
  seed_shape_ = {channels.back(), height / shrink, width / shrink};
  stem_ = nn::Linear(in_features, seed_shape_[0] * seed_shape_[1] * seed_shape_[2]);
  deconvs_ = nn::Sequential();
  for (size_t i = channels.size(); i-- > 0;) {
    const int64_t c_out = i == 0 ? out_channels : channels[i - 1];
    deconvs_->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(kLeak)));
    deconvs_->push_back(nn::ConvTranspose2d(nn::ConvTranspose2dOptions(channels[i], c_out, 4).stride(2).padding(1)));
  }
  register_module("stem", stem_);
  register_module("deconvs", deconvs_);
}

torch::Tensor FrameDecoderImpl::forward(const torch::Tensor& z) {
  auto h = stem_->forward(z).view({z.size(0), seed_shape_[0], seed_shape_[1], seed_shape_[2]});
  return deconvs_->forward(h);
}

torch::Tensor reparameterize(const torch::Tensor& mean, const torch::Tensor& logvar, torch::Generator& gen) {
  auto eps = torch::randn(mean.sizes(), gen, mean.options());
  return mean + torch::exp(0.5 * logvar) * eps;
}

torch::Tensor kl_divergence(const torch::Tensor& mean, const torch::Tensor& logvar) {
  return (-0.5 * (1.0 + logvar - mean.pow(2) - logvar.exp())).sum(1).mean();
}

torch::Generator make_generator(uint64_t seed) { return at::make_generator<at::CPUGeneratorImpl>(seed); }

void with_seeded_init(uint64_t seed, const std::function<void()>& build) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  torch::manual_seed(seed);
  build();
}

std::vector<torch::Tensor> snapshot_parameters(const torch::nn::Module& module) {
  std::vector<torch::Tensor> out;
  for (const auto& p : module.parameters()) out.push_back(p.detach().clone());
  return out;
}

bool parameters_equal(const std::vector<torch::Tensor>& a, const std::vector<torch::Tensor>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!torch::equal(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace trackgen::nets

#include "trackgen/nets/tensor.hpp"

#include "trackgen/core/error.hpp"

namespace trackgen::nets {

torch::Tensor video_to_tensor(const VideoTensor& v) {
  auto flat = torch::from_blob(const_cast<float*>(v.data().data()),
                               {v.frames(), v.height(), v.width(), v.channels()}, torch::kFloat32);
  return flat.permute({3, 0, 1, 2}).contiguous();
}

torch::Tensor videos_to_batch(std::span<const VideoTensor> videos) {
  std::vector<torch::Tensor> parts;
  parts.reserve(videos.size());
  for (const auto& v : videos) parts.push_back(video_to_tensor(v));
  return torch::stack(parts);
}

VideoTensor tensor_to_video(const torch::Tensor& t) {
  torch::Tensor x = t.detach().to(torch::kCPU, torch::kFloat32);
  if (x.dim() == 5 && x.size(0) == 1) x = x.squeeze(0);
  if (x.dim() != 4) throw DimensionError("expected a (C, n, H, W) tensor");
  x = x.permute({1, 2, 3, 0}).contiguous();
  std::vector<float> data(x.data_ptr<float>(), x.data_ptr<float>() + x.numel());
  return VideoTensor({x.size(0), x.size(1), x.size(2), x.size(3)}, std::move(data));
}

torch::Tensor frame_to_tensor(const VideoTensor& v, int64_t t) {
  auto f = v.frame_data(t);
  auto flat = torch::from_blob(const_cast<float*>(f.data()), {v.height(), v.width(), v.channels()}, torch::kFloat32);
  return flat.permute({2, 0, 1}).contiguous();
}

VideoTensor tensor_to_frame(const torch::Tensor& chw) {
  torch::Tensor x = chw.detach().to(torch::kCPU, torch::kFloat32);
  if (x.dim() == 4 && x.size(0) == 1) x = x.squeeze(0);
  if (x.dim() != 3) throw DimensionError("expected a (C, H, W) tensor");
  x = x.permute({1, 2, 0}).contiguous();
  std::vector<float> data(x.data_ptr<float>(), x.data_ptr<float>() + x.numel());
  return VideoTensor({1, x.size(0), x.size(1), x.size(2)}, std::move(data));
}

torch::Tensor binary_to_tensor(const BinaryVideo& b) {
  auto bytes = torch::from_blob(const_cast<uint8_t*>(b.data().data()), {1, b.frames(), b.height(), b.width()},
                                torch::kUInt8);
  return bytes.to(torch::kFloat32);
}

BinaryVideo tensor_to_binary(const torch::Tensor& t, double threshold) {
  torch::Tensor x = t.detach().to(torch::kCPU);
  if (x.dim() == 4 && x.size(0) == 1) x = x.squeeze(0);
  if (x.dim() != 3) throw DimensionError("expected a (1, n, H, W) tensor");
  x = x.gt(threshold).to(torch::kUInt8).contiguous();
  std::vector<uint8_t> data(x.data_ptr<uint8_t>(), x.data_ptr<uint8_t>() + x.numel());
  return BinaryVideo(x.size(0), x.size(1), x.size(2), std::move(data));
}

}  // namespace trackgen::nets

#include "trackgen/motion/loss.hpp"

#include <vector>

#include "trackgen/core/error.hpp"
#include "trackgen/kernels/parallel.hpp"
#include "trackgen/nets/abs_loss.hpp"

namespace trackgen::motion {

torch::Tensor motion_weighted_loss(const torch::Tensor& target, const torch::Tensor& recon,
                                   const MotionLossOptions& opts) {
  if (target.sizes() != recon.sizes()) throw DimensionError("motion loss: target and recon shapes differ");
  if (recon.dim() < 3 || recon.dim() > 5) throw DimensionError("motion loss expects (B,1,n,H,W) or (n,H,W) videos");
  if (recon.dim() >= 4 && recon.size(recon.dim() - 4) != 1) {
    throw DimensionError("motion videos have a single channel");
  }
  if (!torch::isfinite(recon).all().item<bool>()) throw NumericError("motion loss: reconstruction contains NaN/Inf");
  if (!(target.eq(0) | target.eq(1)).all().item<bool>()) {
    throw ValidationError("motion loss: target must be binary (0/1)");
  }
  const auto dtype = recon.scalar_type();
  const auto target_f = target.detach().to(dtype);
  if (opts.uniform_weights) return nets::weighted_abs_loss(recon, target_f, torch::ones_like(recon));

  const int64_t batch = recon.dim() == 5 ? recon.size(0) : 1;
  const kernels::Extent extent{recon.size(-3), recon.size(-2), recon.size(-1)};
  const int64_t per_sample = extent.frames * extent.height * extent.width;

  const auto t_u8 = target.detach().to(torch::kUInt8).contiguous();
  const auto r_u8 = recon.detach().gt(opts.binarize_threshold).to(torch::kUInt8).contiguous();
  auto weights = torch::empty({batch * per_sample}, torch::kDouble);
  std::vector<double> diff(static_cast<size_t>(per_sample));
  for (int64_t b = 0; b < batch; ++b) {
    std::span<const uint8_t> m(t_u8.data_ptr<uint8_t>() + b * per_sample, static_cast<size_t>(per_sample));
    std::span<const uint8_t> m_hat(r_u8.data_ptr<uint8_t>() + b * per_sample, static_cast<size_t>(per_sample));
    std::span<double> w(weights.data_ptr<double>() + b * per_sample, static_cast<size_t>(per_sample));
    const auto scalars = kernels::parallel::balance_weights(m, m_hat, opts.epsilon, w);
    const double lambda = opts.lambda.value_or(opts.lambda_factor * scalars.foreground);
    kernels::parallel::diff_weights(extent, m, lambda, diff);
    for (int64_t i = 0; i < per_sample; ++i) w[static_cast<size_t>(i)] += diff[static_cast<size_t>(i)];
  }
  return nets::weighted_abs_loss(recon, target_f, weights.view(recon.sizes()).to(dtype));
}

double motion_weighted_loss(const BinaryVideo& target, const VideoTensor& recon, const MotionLossOptions& opts) {
  if (recon.channels() != 1 || recon.frames() != target.frames() || recon.height() != target.height() ||
      recon.width() != target.width()) {
    throw DimensionError("motion loss: reconstruction must be a single-channel video shaped like the target");
  }
  const auto shape = std::vector<int64_t>{target.frames(), target.height(), target.width()};
  const auto t = torch::from_blob(const_cast<uint8_t*>(target.data().data()), shape, torch::kUInt8).to(torch::kDouble);
  const auto r = torch::from_blob(const_cast<float*>(recon.data().data()), shape, torch::kFloat).to(torch::kDouble);
  torch::NoGradGuard no_grad;
  return motion_weighted_loss(t, r, opts).item<double>();
}

}  // namespace trackgen::motion

#include "trackgen/nets/abs_loss.hpp"

#include <span>

#include "trackgen/core/error.hpp"
#include "trackgen/kernels/parallel.hpp"

namespace trackgen::nets {

namespace {

using torch::autograd::AutogradContext;
using torch::autograd::tensor_list;

template <typename T>
std::span<const T> cspan(const torch::Tensor& t) {
  return {t.data_ptr<T>(), static_cast<size_t>(t.numel())};
}

template <typename T>
std::span<T> mspan(torch::Tensor& t) {
  return {t.data_ptr<T>(), static_cast<size_t>(t.numel())};
}

void require_floating(const torch::Tensor& t) {
  if (t.scalar_type() != torch::kFloat32 && t.scalar_type() != torch::kFloat64) {
    throw ValidationError("loss inputs must be float32 or float64");
  }
}

class WeightedAbsLoss : public torch::autograd::Function<WeightedAbsLoss> {
 public:
  static torch::Tensor forward(AutogradContext* ctx, const torch::Tensor& pred, const torch::Tensor& target,
                               const torch::Tensor& weights) {
    require_floating(pred);
    auto p = pred.detach().contiguous();
    auto t = target.detach().to(p.scalar_type()).contiguous();
    auto w = weights.detach().to(p.scalar_type()).contiguous();
    if (!p.sizes().equals(t.sizes()) || (w.numel() > 0 && w.numel() != p.numel())) {
      throw DimensionError("weighted_abs_loss: shape mismatch");
    }
    double v = 0.0;
    if (p.scalar_type() == torch::kFloat32) {
      v = kernels::parallel::weighted_abs_mean(cspan<float>(t), cspan<float>(p), cspan<float>(w));
    } else {
      v = kernels::parallel::weighted_abs_mean(cspan<double>(t), cspan<double>(p), cspan<double>(w));
    }
    ctx->save_for_backward({p, t, w});
    return torch::scalar_tensor(v, p.options());
  }

  static tensor_list backward(AutogradContext* ctx, tensor_list grad_outputs) {
    const auto saved = ctx->get_saved_variables();
    const auto& p = saved[0];
    const auto& t = saved[1];
    const auto& w = saved[2];
    const double scale = grad_outputs[0].item<double>();
    auto grad = torch::empty_like(p);
    if (p.scalar_type() == torch::kFloat32) {
      kernels::parallel::weighted_abs_grad(cspan<float>(t), cspan<float>(p), cspan<float>(w), scale,
                                           mspan<float>(grad));
    } else {
      kernels::parallel::weighted_abs_grad(cspan<double>(t), cspan<double>(p), cspan<double>(w), scale,
                                           mspan<double>(grad));
    }
    return {grad, torch::Tensor(), torch::Tensor()};
  }
};

class MaskedAbsLoss : public torch::autograd::Function<MaskedAbsLoss> {
 public:
  // Kernels broadcast the mask over a trailing channel axis, so work in
  // channel-last layout.
  static torch::Tensor forward(AutogradContext* ctx, const torch::Tensor& pred, const torch::Tensor& target,
                               const torch::Tensor& mask) {
    require_floating(pred);
    if (pred.dim() != 4 || !pred.sizes().equals(target.sizes())) {
      throw DimensionError("masked_abs_loss expects matching (B, C, H, W) tensors");
    }
    auto m = mask.detach();
    if (m.dim() == 4) m = m.squeeze(1);
    if (m.dim() != 3 || m.size(0) != pred.size(0) || m.size(1) != pred.size(2) || m.size(2) != pred.size(3)) {
      throw DimensionError("masked_abs_loss: mask does not match the frames");
    }
    if (!torch::logical_or(m.eq(0), m.eq(1)).all().item<bool>()) {
      throw ValidationError("content mask must be binary");
    }
    auto m8 = m.to(torch::kUInt8).contiguous();
    auto p = pred.detach().permute({0, 2, 3, 1}).contiguous();
    auto t = target.detach().to(p.scalar_type()).permute({0, 2, 3, 1}).contiguous();
    const int64_t channels = pred.size(1);
    double v = 0.0;
    if (p.scalar_type() == torch::kFloat32) {
      v = kernels::parallel::masked_abs_mean(cspan<float>(t), cspan<float>(p), channels, cspan<uint8_t>(m8));
    } else {
      v = kernels::parallel::masked_abs_mean(cspan<double>(t), cspan<double>(p), channels, cspan<uint8_t>(m8));
    }
    ctx->save_for_backward({p, t, m8});
    return torch::scalar_tensor(v, p.options());
  }

  static tensor_list backward(AutogradContext* ctx, tensor_list grad_outputs) {
    const auto saved = ctx->get_saved_variables();
    const auto& p = saved[0];
    const auto& t = saved[1];
    const auto& m8 = saved[2];
    const double scale = grad_outputs[0].item<double>();
    const int64_t channels = p.size(3);
    auto grad = torch::empty_like(p);
    if (p.scalar_type() == torch::kFloat32) {
      kernels::parallel::masked_abs_grad(cspan<float>(t), cspan<float>(p), channels, cspan<uint8_t>(m8), scale,
                                         mspan<float>(grad));
    } else {
      kernels::parallel::masked_abs_grad(cspan<double>(t), cspan<double>(p), channels, cspan<uint8_t>(m8), scale,
                                         mspan<double>(grad));
    }
    return {grad.permute({0, 3, 1, 2}).contiguous(), torch::Tensor(), torch::Tensor()};
  }
};

}  // namespace

torch::Tensor weighted_abs_loss(const torch::Tensor& pred, const torch::Tensor& target, const torch::Tensor& weights) {
  // Function::apply cannot take undefined inputs; an empty tensor means all ones.
  return WeightedAbsLoss::apply(pred, target, weights.defined() ? weights : torch::empty({0}, pred.options()));
}

torch::Tensor masked_abs_loss(const torch::Tensor& pred, const torch::Tensor& target, const torch::Tensor& mask) {
  return MaskedAbsLoss::apply(pred, target, mask);
}

}  // namespace trackgen::nets

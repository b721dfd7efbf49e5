#include "trackgen/kernels/reference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "check.hpp"

namespace trackgen::kernels::reference {

namespace {

template <typename T>
void binarize_impl(std::span<const T> values, T threshold, std::span<uint8_t> out) {
  detail::require_same_size(values, out, "binarize");
  for (size_t i = 0; i < values.size(); ++i) out[i] = values[i] > threshold ? 1 : 0;
}

template <typename T>
double weighted_abs_mean_impl(std::span<const T> target, std::span<const T> pred, std::span<const T> weights) {
  detail::require_same_size(target, pred, "weighted_abs_mean");
  if (target.empty()) return 0.0;
  double sum = 0.0;
  for (size_t i = 0; i < target.size(); ++i) {
    const double w = weights.empty() ? 1.0 : static_cast<double>(weights[i]);
    sum += std::abs(static_cast<double>(pred[i]) - static_cast<double>(target[i])) * w;
  }
  return sum / static_cast<double>(target.size());
}

template <typename T>
void weighted_abs_grad_impl(std::span<const T> target, std::span<const T> pred, std::span<const T> weights,
                            double scale, std::span<T> out) {
  detail::require_same_size(target, pred, "weighted_abs_grad");
  detail::require_same_size(target, out, "weighted_abs_grad out");
  for (size_t i = 0; i < target.size(); ++i) {
    const double w = weights.empty() ? 1.0 : static_cast<double>(weights[i]);
    out[i] = static_cast<T>(scale * static_cast<double>(detail::sign_of(pred[i] - target[i])) * w /
                            static_cast<double>(target.size()));
  }
}

template <typename T>
double masked_abs_mean_impl(std::span<const T> target, std::span<const T> pred, int64_t channels,
                            std::span<const uint8_t> mask) {
  detail::require_same_size(target, pred, "masked_abs_mean");
  if (target.empty()) return 0.0;
  double sum = 0.0;
  for (size_t p = 0; p < mask.size(); ++p) {
    for (int64_t c = 0; c < channels; ++c) {
      const size_t i = p * static_cast<size_t>(channels) + static_cast<size_t>(c);
      sum += std::abs(static_cast<double>(pred[i]) - static_cast<double>(target[i])) * mask[p];
    }
  }
  return sum / static_cast<double>(target.size());
}

template <typename T>
void masked_abs_grad_impl(std::span<const T> target, std::span<const T> pred, int64_t channels,
                          std::span<const uint8_t> mask, double scale, std::span<T> out) {
  detail::require_same_size(target, pred, "masked_abs_grad");
  detail::require_same_size(target, out, "masked_abs_grad out");
  for (size_t p = 0; p < mask.size(); ++p) {
    for (int64_t c = 0; c < channels; ++c) {
      const size_t i = p * static_cast<size_t>(channels) + static_cast<size_t>(c);
      out[i] = static_cast<T>(scale * static_cast<double>(detail::sign_of(pred[i] - target[i])) * mask[p] /
                              static_cast<double>(target.size()));
    }
  }
}

}  // namespace

void rasterize(Extent extent, std::span<const FrameBox> boxes, std::span<uint8_t> out) {
  for (const auto& b : boxes) detail::require_box_in_extent(b, extent);
  size_t i = 0;
  for (int64_t t = 0; t < extent.frames; ++t) {
    for (int y = 0; y < extent.height; ++y) {
      for (int x = 0; x < extent.width; ++x, ++i) {
        bool inside = false;
        for (const auto& b : boxes) {
          inside = inside || (b.frame == t && x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1);
        }
        out[i] = inside ? 1 : 0;
      }
    }
  }
}

void apply_mask(std::span<const float> video, int64_t channels, std::span<const uint8_t> mask,
                std::span<float> out) {
  for (size_t i = 0; i < video.size(); ++i) out[i] = video[i] * static_cast<float>(mask[i / static_cast<size_t>(channels)]);
}

int64_t count_ones(std::span<const uint8_t> mask) {
  int64_t n = 0;
  for (uint8_t v : mask) n += v != 0;
  return n;
}

void binarize(std::span<const float> values, float threshold, std::span<uint8_t> out) {
  binarize_impl(values, threshold, out);
}
void binarize(std::span<const double> values, double threshold, std::span<uint8_t> out) {
  binarize_impl(values, threshold, out);
}

BalanceScalars balance_weights(std::span<const uint8_t> target, std::span<const uint8_t> recon, double epsilon,
                               std::span<double> out) {
  detail::require_same_size(target, recon, "balance_weights");
  const double total = static_cast<double>(target.size());
  const double n_target = static_cast<double>(count_ones(target));
  const double n_recon = static_cast<double>(count_ones(recon));
  BalanceScalars w{(2.0 * total - n_target - n_recon + epsilon) / (2.0 * total),
                   (n_target + n_recon + epsilon) / (2.0 * total)};
  for (size_t i = 0; i < target.size(); ++i) {
    const bool foreground = target[i] == 1 || recon[i] == 1;
    out[i] = foreground ? w.foreground : w.background;
  }
  return w;
}

void diff_weights(Extent extent, std::span<const uint8_t> mask, double lambda, std::span<double> out) {
  const int64_t plane = extent.per_frame();
  for (int64_t t = 0; t < extent.frames; ++t) {
    for (int64_t p = 0; p < plane; ++p) {
      const int64_t i = t * plane + p;
      out[i] = (t > 0 && mask[i] != mask[i - plane]) ? lambda : 0.0;
    }
  }
}

double weighted_abs_mean(std::span<const float> target, std::span<const float> pred, std::span<const float> weights) {
  return weighted_abs_mean_impl(target, pred, weights);
}
double weighted_abs_mean(std::span<const double> target, std::span<const double> pred,
                         std::span<const double> weights) {
  return weighted_abs_mean_impl(target, pred, weights);
}
void weighted_abs_grad(std::span<const float> target, std::span<const float> pred, std::span<const float> weights,
                       double scale, std::span<float> out) {
  weighted_abs_grad_impl(target, pred, weights, scale, out);
}
void weighted_abs_grad(std::span<const double> target, std::span<const double> pred,
                       std::span<const double> weights, double scale, std::span<double> out) {
  weighted_abs_grad_impl(target, pred, weights, scale, out);
}
double masked_abs_mean(std::span<const float> target, std::span<const float> pred, int64_t channels,
                       std::span<const uint8_t> mask) {
  return masked_abs_mean_impl(target, pred, channels, mask);
}
double masked_abs_mean(std::span<const double> target, std::span<const double> pred, int64_t channels,
                       std::span<const uint8_t> mask) {
  return masked_abs_mean_impl(target, pred, channels, mask);
}
void masked_abs_grad(std::span<const float> target, std::span<const float> pred, int64_t channels,
                     std::span<const uint8_t> mask, double scale, std::span<float> out) {
  masked_abs_grad_impl(target, pred, channels, mask, scale, out);
}
void masked_abs_grad(std::span<const double> target, std::span<const double> pred, int64_t channels,
                     std::span<const uint8_t> mask, double scale, std::span<double> out) {
  masked_abs_grad_impl(target, pred, channels, mask, scale, out);
}

void threshold_difference(std::span<const float> frames, std::span<const float> background, int64_t channels,
                          float tau, std::span<uint8_t> out) {
  const size_t plane = background.size() / static_cast<size_t>(channels);
  for (size_t p = 0; p < out.size(); ++p) {
    bool hit = false;
    for (int64_t c = 0; c < channels; ++c) {
      const float f = frames[p * static_cast<size_t>(channels) + static_cast<size_t>(c)];
      const float b = background[(p % plane) * static_cast<size_t>(channels) + static_cast<size_t>(c)];
      hit = hit || std::abs(f - b) > tau;
    }
    out[p] = hit ? 1 : 0;
  }
}

void widen_mask(Extent extent, std::span<const uint8_t> mask, int kernel_size, std::span<uint8_t> out) {
  if (kernel_size < 1) throw ValidationError("widen_mask: kernel size must be >= 1");
  // Literal blur with the k x k Gaussian OpenCV uses by default for size k.
  const double sigma = 0.3 * ((kernel_size - 1) * 0.5 - 1.0) + 0.8;
  const double center = (kernel_size - 1) * 0.5;
  std::vector<double> g(static_cast<size_t>(kernel_size));
  double norm = 0.0;
  for (int i = 0; i < kernel_size; ++i) {
    g[static_cast<size_t>(i)] = std::exp(-(i - center) * (i - center) / (2.0 * sigma * sigma));
    norm += g[static_cast<size_t>(i)];
  }
  for (auto& v : g) v /= norm;

  const int lo = tap_lo(kernel_size);
  for (int64_t t = 0; t < extent.frames; ++t) {
    for (int64_t y = 0; y < extent.height; ++y) {
      for (int64_t x = 0; x < extent.width; ++x) {
        double acc = 0.0;
        for (int i = 0; i < kernel_size; ++i) {
          for (int j = 0; j < kernel_size; ++j) {
            const int64_t yy = y + lo + i;
            const int64_t xx = x + lo + j;
            if (yy < 0 || yy >= extent.height || xx < 0 || xx >= extent.width) continue;
            acc += g[static_cast<size_t>(i)] * g[static_cast<size_t>(j)] *
                   mask[static_cast<size_t>((t * extent.height + yy) * extent.width + xx)];
          }
        }
        out[static_cast<size_t>((t * extent.height + y) * extent.width + x)] = acc > 0.0 ? 1 : 0;
      }
    }
  }
}

}  // namespace trackgen::kernels::reference

#include "trackgen/kernels/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "check.hpp"

namespace trackgen::kernels::parallel {

namespace {

constexpr int64_t kChunk = 4096;

// Sum of f(i) for i in [0, n): chunk partials are combined serially in chunk
// order.
template <typename F>
double chunked_sum(int64_t n, F&& f) {
  const int64_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static)
  for (int64_t c = 0; c < chunks; ++c) {
    const int64_t end = std::min(n, (c + 1) * kChunk);
    double s = 0.0;
    for (int64_t i = c * kChunk; i < end; ++i) s += f(i);
    partial[static_cast<size_t>(c)] = s;
  }
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

template <typename T>
void binarize_impl(std::span<const T> values, T threshold, std::span<uint8_t> out) {
  detail::require_same_size(values, out, "binarize");
  const auto n = static_cast<int64_t>(values.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) out[i] = values[i] > threshold ? 1 : 0;
}

template <typename T>
double weighted_abs_mean_impl(std::span<const T> target, std::span<const T> pred, std::span<const T> weights) {
  detail::require_same_size(target, pred, "weighted_abs_mean");
  if (!weights.empty()) detail::require_same_size(target, weights, "weighted_abs_mean weights");
  const auto n = static_cast<int64_t>(target.size());
  if (n == 0) return 0.0;
  const double sum = weights.empty() ? chunked_sum(n, [&](int64_t i) {
    return std::abs(static_cast<double>(pred[i]) - static_cast<double>(target[i]));
  })
                                     : chunked_sum(n, [&](int64_t i) {
                                         return std::abs(static_cast<double>(pred[i]) -
                                                         static_cast<double>(target[i])) *
                                                static_cast<double>(weights[i]);
                                       });
  return sum / static_cast<double>(n);
}

template <typename T>
void weighted_abs_grad_impl(std::span<const T> target, std::span<const T> pred, std::span<const T> weights,
                            double scale, std::span<T> out) {
  detail::require_same_size(target, pred, "weighted_abs_grad");
  detail::require_same_size(target, out, "weighted_abs_grad out");
  if (!weights.empty()) detail::require_same_size(target, weights, "weighted_abs_grad weights");
  const auto n = static_cast<int64_t>(target.size());
  if (n == 0) return;
  const T k = static_cast<T>(scale / static_cast<double>(n));
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    const T w = weights.empty() ? T{1} : weights[i];
    out[i] = k * detail::sign_of(pred[i] - target[i]) * w;
  }
}

template <typename T>
double masked_abs_mean_impl(std::span<const T> target, std::span<const T> pred, int64_t channels,
                            std::span<const uint8_t> mask) {
  detail::require_same_size(target, pred, "masked_abs_mean");
  if (static_cast<int64_t>(mask.size()) * channels != static_cast<int64_t>(target.size())) {
    throw DimensionError("masked_abs_mean: mask does not cover the frame");
  }
  const auto n = static_cast<int64_t>(target.size());
  if (n == 0) return 0.0;
  const double sum = chunked_sum(static_cast<int64_t>(mask.size()), [&](int64_t p) {
    if (!mask[p]) return 0.0;
    double s = 0.0;
    for (int64_t i = p * channels; i < (p + 1) * channels; ++i) {
      s += std::abs(static_cast<double>(pred[i]) - static_cast<double>(target[i]));
    }
    return s;
  });
  return sum / static_cast<double>(n);
}

template <typename T>
void masked_abs_grad_impl(std::span<const T> target, std::span<const T> pred, int64_t channels,
                          std::span<const uint8_t> mask, double scale, std::span<T> out) {
  detail::require_same_size(target, pred, "masked_abs_grad");
  detail::require_same_size(target, out, "masked_abs_grad out");
  if (static_cast<int64_t>(mask.size()) * channels != static_cast<int64_t>(target.size())) {
    throw DimensionError("masked_abs_grad: mask does not cover the frame");
  }
  const auto n = static_cast<int64_t>(target.size());
  if (n == 0) return;
  const T k = static_cast<T>(scale / static_cast<double>(n));
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) out[i] = mask[i / channels] ? k * detail::sign_of(pred[i] - target[i]) : T{0};
}

}  // namespace

void rasterize(Extent extent, std::span<const FrameBox> boxes, std::span<uint8_t> out) {
  if (static_cast<int64_t>(out.size()) != extent.size()) throw DimensionError("rasterize: output size mismatch");
  std::vector<std::vector<FrameBox>> per_frame(static_cast<size_t>(extent.frames));
  for (const auto& b : boxes) {
    detail::require_box_in_extent(b, extent);
    per_frame[static_cast<size_t>(b.frame)].push_back(b);
  }
  const int64_t plane = extent.per_frame();
#pragma omp parallel for schedule(static)
  for (int64_t t = 0; t < extent.frames; ++t) {
    uint8_t* frame = out.data() + t * plane;
    std::fill(frame, frame + plane, uint8_t{0});
    for (const auto& b : per_frame[static_cast<size_t>(t)]) {
      for (int y = b.y0; y < b.y1; ++y) std::fill(frame + y * extent.width + b.x0, frame + y * extent.width + b.x1, 1);
    }
  }
}

void apply_mask(std::span<const float> video, int64_t channels, std::span<const uint8_t> mask,
                std::span<float> out) {
  detail::require_same_size(video, out, "apply_mask");
  if (static_cast<int64_t>(mask.size()) * channels != static_cast<int64_t>(video.size())) {
    throw DimensionError("apply_mask: mask shape does not match video");
  }
  const auto pixels = static_cast<int64_t>(mask.size());
#pragma omp parallel for schedule(static)
  for (int64_t p = 0; p < pixels; ++p) {
    for (int64_t c = 0; c < channels; ++c) {
      out[p * channels + c] = mask[p] ? video[p * channels + c] : 0.0f;
    }
  }
}

int64_t count_ones(std::span<const uint8_t> mask) {
  // Integer sums are exact, so an unordered reduction is still deterministic.
  const auto n = static_cast<int64_t>(mask.size());
  int64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
  for (int64_t i = 0; i < n; ++i) count += mask[i] != 0;
  return count;
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
  detail::require_same_size(target, out, "balance_weights out");
  const auto total = static_cast<double>(target.size());
  const auto n_target = static_cast<double>(count_ones(target));
  const auto n_recon = static_cast<double>(count_ones(recon));
  BalanceScalars w;
  w.background = (n_target + n_recon + epsilon) / (2.0 * total);
  w.foreground = (2.0 * total - n_target - n_recon + epsilon) / (2.0 * total);
  const auto n = static_cast<int64_t>(target.size());
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) out[i] = (target[i] | recon[i]) ? w.foreground : w.background;
  return w;
}

void diff_weights(Extent extent, std::span<const uint8_t> mask, double lambda, std::span<double> out) {
  if (static_cast<int64_t>(mask.size()) != extent.size() || out.size() != mask.size()) {
    throw DimensionError("diff_weights: size mismatch");
  }
  const int64_t plane = extent.per_frame();
  if (extent.frames > 0) std::fill(out.begin(), out.begin() + plane, 0.0);
#pragma omp parallel for schedule(static)
  for (int64_t i = plane; i < extent.size(); ++i) out[i] = (mask[i] ^ mask[i - plane]) ? lambda : 0.0;
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
  if (background.empty() || frames.size() % background.size() != 0) {
    throw DimensionError("threshold_difference: frames do not tile the background");
  }
  if (static_cast<int64_t>(out.size()) * channels != static_cast<int64_t>(frames.size())) {
    throw DimensionError("threshold_difference: output size mismatch");
  }
  const auto plane = static_cast<int64_t>(background.size()) / channels;
  const auto pixels = static_cast<int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (int64_t p = 0; p < pixels; ++p) {
    const int64_t bp = p % plane;
    float d = 0.0f;
    for (int64_t c = 0; c < channels; ++c) d = std::max(d, std::abs(frames[p * channels + c] - background[bp * channels + c]));
    out[p] = d > tau ? 1 : 0;
  }
}

void widen_mask(Extent extent, std::span<const uint8_t> mask, int kernel_size, std::span<uint8_t> out) {
  if (kernel_size < 1) throw ValidationError("widen_mask: kernel size must be >= 1");
  if (static_cast<int64_t>(mask.size()) != extent.size() || out.size() != mask.size()) {
    throw DimensionError("widen_mask: size mismatch");
  }
  // Every Gaussian tap is strictly positive, so the blur's support is a box
  // dilation; do it separably.
  const int lo = tap_lo(kernel_size);
  const int hi = tap_hi(kernel_size);
  const int64_t h = extent.height;
  const int64_t w = extent.width;
  std::vector<uint8_t> rows(mask.size());
#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t t = 0; t < extent.frames; ++t) {
    for (int64_t y = 0; y < h; ++y) {
      const uint8_t* src = mask.data() + (t * h + y) * w;
      uint8_t* dst = rows.data() + (t * h + y) * w;
      for (int64_t x = 0; x < w; ++x) {
        const int64_t a = std::max<int64_t>(0, x + lo);
        const int64_t b = std::min<int64_t>(w - 1, x + hi);
        uint8_t v = 0;
        for (int64_t k = a; k <= b && !v; ++k) v = src[k];
        dst[x] = v;
      }
    }
  }
#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t t = 0; t < extent.frames; ++t) {
    for (int64_t y = 0; y < h; ++y) {
      const int64_t a = std::max<int64_t>(0, y + lo);
      const int64_t b = std::min<int64_t>(h - 1, y + hi);
      uint8_t* dst = out.data() + (t * h + y) * w;
      for (int64_t x = 0; x < w; ++x) {
        uint8_t v = 0;
        for (int64_t k = a; k <= b && !v; ++k) v = rows[static_cast<size_t>((t * h + k) * w + x)];
        dst[x] = v;
      }
    }
  }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace trackgen::kernels::parallel

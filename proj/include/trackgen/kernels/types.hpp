#pragma once

#include <cstdint>

namespace trackgen::kernels {

struct Extent {
  int64_t frames = 0;
  int64_t height = 0;
  int64_t width = 0;
  int64_t per_frame() const { return height * width; }
  int64_t size() const { return frames * height * width; }
};

/// Half-open box placed on one frame.
struct FrameBox {
  int64_t frame = 0;
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
};

/// Scalar weights of the foreground/background balance.
struct BalanceScalars {
  double foreground = 0.0;
  double background = 0.0;
};

/// Offsets [lo, hi] covered by a k-tap filter along one axis.
constexpr int tap_lo(int k) { return -(k / 2); }
constexpr int tap_hi(int k) { return k - 1 - k / 2; }

}  // namespace trackgen::kernels

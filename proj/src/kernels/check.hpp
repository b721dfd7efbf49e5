#pragma once

#include <span>
#include <string>

#include "trackgen/core/error.hpp"
#include "trackgen/kernels/types.hpp"

namespace trackgen::kernels::detail {

template <typename A, typename B>
void require_same_size(std::span<A> a, std::span<B> b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": size mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

inline void require_box_in_extent(const FrameBox& b, const Extent& e) {
  if (b.frame < 0 || b.frame >= e.frames || b.x0 < 0 || b.y0 < 0 || b.x1 > e.width || b.y1 > e.height ||
      b.x0 >= b.x1 || b.y0 >= b.y1) {
    throw ValidationError("box [" + std::to_string(b.x0) + "," + std::to_string(b.y0) + "," + std::to_string(b.x1) +
                          "," + std::to_string(b.y1) + "] at frame " + std::to_string(b.frame) +
                          " is empty or outside the " + std::to_string(e.width) + "x" + std::to_string(e.height) +
                          " frame");
  }
}

template <typename T>
inline T sign_of(T v) {
  return static_cast<T>((v > T{0}) - (v < T{0}));
}

}  // namespace trackgen::kernels::detail

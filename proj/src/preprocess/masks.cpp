#include "trackgen/preprocess/masks.hpp"

#include <string>

#include "trackgen/core/error.hpp"
#include "trackgen/kernels/parallel.hpp"

namespace trackgen::preprocess {

BinaryVideo rasterize_tracks(const BoxTrackSet& tracks, int frames, int height, int width) {
  if (tracks.num_frames != frames) {
    throw ValidationError("tracks num_frames " + std::to_string(tracks.num_frames) + " does not match video length " +
                          std::to_string(frames));
  }
  std::vector<kernels::FrameBox> boxes;
  for (const auto& obj : tracks.objects) {
    if (static_cast<int>(obj.boxes.size()) != frames) {
      throw ValidationError("object " + std::to_string(obj.id) + " does not have one box entry per frame");
    }
    for (int t = 0; t < frames; ++t) {
      const auto& b = obj.boxes[static_cast<size_t>(t)];
      if (!b) continue;
      if (b->x0 < 0 || b->y0 < 0 || b->x1 > width || b->y1 > height || b->x1 <= b->x0 || b->y1 <= b->y0) {
        throw ValidationError("object " + std::to_string(obj.id) + " frame " + std::to_string(t) +
                              ": box is empty or outside the " + std::to_string(width) + "x" +
                              std::to_string(height) + " frame");
      }
      boxes.push_back({t, b->x0, b->y0, b->x1, b->y1});
    }
  }
  std::vector<uint8_t> out(static_cast<size_t>(frames) * static_cast<size_t>(height) * static_cast<size_t>(width));
  kernels::parallel::rasterize({frames, height, width}, boxes, out);
  return BinaryVideo(frames, height, width, std::move(out));
}

VideoTensor apply_motion_mask(const VideoTensor& v, const BinaryVideo& m) {
  if (v.frames() != m.frames() || v.height() != m.height() || v.width() != m.width()) {
    throw DimensionError("apply_motion_mask: mask is " + std::to_string(m.frames()) + "x" +
                         std::to_string(m.height()) + "x" + std::to_string(m.width()) + ", video is " +
                         std::to_string(v.frames()) + "x" + std::to_string(v.height()) + "x" +
                         std::to_string(v.width()));
  }
  std::vector<float> out(v.data().size());
  kernels::parallel::apply_mask(v.data(), v.channels(), m.data(), out);
  return VideoTensor(v.shape(), std::move(out));
}

BinaryVideo extract_foreground_mask(const VideoTensor& f, const VideoTensor& bg, float tau, int kernel_size) {
  if (bg.height() != f.height() || bg.width() != f.width() || bg.channels() != f.channels() ||
      (bg.frames() != 1 && bg.frames() != f.frames())) {
    throw DimensionError("extract_foreground_mask: background does not match the frame shape");
  }
  if (!(tau > 0.0f && tau < 1.0f)) throw ValidationError("mask threshold must lie in (0,1)");
  if (kernel_size < 1) throw ValidationError("widening kernel size must be >= 1");
  const kernels::Extent extent{f.frames(), f.height(), f.width()};
  std::vector<uint8_t> raw(static_cast<size_t>(extent.size()));
  if (bg.frames() == 1) {
    kernels::parallel::threshold_difference(f.data(), bg.data(), f.channels(), tau, raw);
  } else {
    const auto plane = static_cast<size_t>(extent.per_frame());
    for (int64_t t = 0; t < f.frames(); ++t) {
      kernels::parallel::threshold_difference(f.frame_data(t), bg.frame_data(t), f.channels(), tau,
                                              std::span(raw).subspan(static_cast<size_t>(t) * plane, plane));
    }
  }
  std::vector<uint8_t> out(raw.size());
  kernels::parallel::widen_mask(extent, raw, kernel_size, out);
  return BinaryVideo(f.frames(), f.height(), f.width(), std::move(out));
}

}  // namespace trackgen::preprocess

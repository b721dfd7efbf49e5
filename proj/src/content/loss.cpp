#include "trackgen/content/loss.hpp"

#include "trackgen/core/error.hpp"
#include "trackgen/kernels/parallel.hpp"

namespace trackgen::content {

double content_weighted_loss(const VideoTensor& frame, const VideoTensor& recon, const BinaryVideo& mask) {
  if (frame.shape() != recon.shape()) throw DimensionError("content loss: frame and reconstruction shapes differ");
  if (mask.frames() != frame.frames() || mask.height() != frame.height() || mask.width() != frame.width()) {
    throw DimensionError("content loss: mask does not match the frame");
  }
  return kernels::parallel::masked_abs_mean(frame.data(), recon.data(), frame.channels(), mask.data());
}

}  // namespace trackgen::content

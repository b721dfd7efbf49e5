#pragma once

#include "trackgen/core/video.hpp"

namespace trackgen::content {

/// mean(|recon - frame| * mask) over every element of `frame`, with the 0/1
/// mask broadcast over channels. Pixels where mask == 0 contribute exactly 0.
/// `frame` and `recon` may hold several frames; `mask` then matches them.
double content_weighted_loss(const VideoTensor& frame, const VideoTensor& recon, const BinaryVideo& mask);

}  // namespace trackgen::content

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackgen/core/video.hpp"

namespace trackgen {

/// 8-bit interleaved image, 1 (gray) or 3 (RGB) channels.
struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint8_t> pixels;
};

std::vector<uint8_t> encode_png(const Image8& image);
/// Decodes to gray when the file has no color, otherwise RGB (alpha dropped).
Image8 decode_png(std::span<const uint8_t> bytes);

Image8 frame_to_image(const VideoTensor& v, int64_t t);
/// Single-frame VideoTensor from an 8-bit image (values / 255).
VideoTensor image_to_frame(const Image8& image);

std::vector<uint8_t> encode_frame_png(const VideoTensor& v, int64_t t);
VideoTensor load_frame_png(const std::filesystem::path& path);
void save_frame_png(const VideoTensor& v, int64_t t, const std::filesystem::path& path);

/// Reads 0000.png ... NNNN.png from a directory. Frame indices must be
/// contiguous from 0 and all frames must share dimensions and channel count.
VideoTensor load_video(const std::filesystem::path& dir);

/// Writes one PNG per frame plus manifest.json {"n","h","w","c"}; returns
/// the manifest.
nlohmann::json save_video(const VideoTensor& v, const std::filesystem::path& dir);

}  // namespace trackgen

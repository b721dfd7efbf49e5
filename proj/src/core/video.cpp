#include "trackgen/core/video.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trackgen/core/error.hpp"

namespace trackgen {

namespace {

void check_shape(const VideoShape& s) {
  if (s.frames < 1 || s.height < 1 || s.width < 1) {
    throw DimensionError("video shape must have n, H, W >= 1 (got " + std::to_string(s.frames) + "x" +
                         std::to_string(s.height) + "x" + std::to_string(s.width) + ")");
  }
  if (s.channels != 1 && s.channels != 3) {
    throw DimensionError("video channels must be 1 or 3 (got " + std::to_string(s.channels) + ")");
  }
}

}  // namespace

VideoTensor::VideoTensor(VideoShape shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
  check_shape(shape_);
  if (static_cast<int64_t>(data_.size()) != shape_.size()) {
    throw DimensionError("video buffer holds " + std::to_string(data_.size()) + " elements, shape needs " +
                         std::to_string(shape_.size()));
  }
  for (size_t i = 0; i < data_.size(); ++i) {
    const float v = data_[i];
    if (!std::isfinite(v)) throw ValidationError("video element " + std::to_string(i) + " is not finite");
    if (v < 0.0f || v > 1.0f) {
      throw ValidationError("video element " + std::to_string(i) + " = " + std::to_string(v) + " outside [0,1]");
    }
  }
}

VideoTensor VideoTensor::zeros(VideoShape shape) { return filled(shape, 0.0f); }

VideoTensor VideoTensor::filled(VideoShape shape, float value) {
  check_shape(shape);
  return VideoTensor(shape, std::vector<float>(static_cast<size_t>(shape.size()), value));
}

std::span<const float> VideoTensor::frame_data(int64_t t) const {
  if (t < 0 || t >= shape_.frames) throw DimensionError("frame index " + std::to_string(t) + " out of range");
  return std::span<const float>(data_).subspan(static_cast<size_t>(t * shape_.frame_size()),
                                               static_cast<size_t>(shape_.frame_size()));
}

VideoTensor VideoTensor::frame(int64_t t) const {
  auto f = frame_data(t);
  VideoShape s = shape_;
  s.frames = 1;
  return VideoTensor(s, std::vector<float>(f.begin(), f.end()));
}

BinaryVideo::BinaryVideo(int64_t frames, int64_t height, int64_t width, std::vector<uint8_t> data)
    : frames_(frames), height_(height), width_(width), data_(std::move(data)) {
  check_shape({frames, height, width, 1});
  if (static_cast<int64_t>(data_.size()) != size()) {
    throw DimensionError("binary video buffer holds " + std::to_string(data_.size()) + " elements, shape needs " +
                         std::to_string(size()));
  }
  for (size_t i = 0; i < data_.size(); ++i) {
    if (data_[i] > 1) throw ValidationError("binary video element " + std::to_string(i) + " is not 0/1");
  }
}

BinaryVideo BinaryVideo::zeros(int64_t frames, int64_t height, int64_t width) {
  check_shape({frames, height, width, 1});
  return BinaryVideo(frames, height, width, std::vector<uint8_t>(static_cast<size_t>(frames * height * width), 0));
}

BinaryVideo BinaryVideo::from_video(const VideoTensor& v) {
  if (v.channels() != 1) throw DimensionError("binary video requires C=1");
  std::vector<uint8_t> out(v.data().size());
  for (size_t i = 0; i < out.size(); ++i) {
    const float x = v.data()[i];
    if (x != 0.0f && x != 1.0f) {
      throw ValidationError("element " + std::to_string(i) + " = " + std::to_string(x) + " is not binary");
    }
    out[i] = x == 1.0f ? 1 : 0;
  }
  return BinaryVideo(v.frames(), v.height(), v.width(), std::move(out));
}

std::span<const uint8_t> BinaryVideo::frame_data(int64_t t) const {
  if (t < 0 || t >= frames_) throw DimensionError("frame index " + std::to_string(t) + " out of range");
  const auto per = static_cast<size_t>(height_ * width_);
  return std::span<const uint8_t>(data_).subspan(static_cast<size_t>(t) * per, per);
}

BinaryVideo BinaryVideo::frame(int64_t t) const {
  auto f = frame_data(t);
  return BinaryVideo(1, height_, width_, std::vector<uint8_t>(f.begin(), f.end()));
}

int64_t BinaryVideo::count_ones() const { return std::count(data_.begin(), data_.end(), uint8_t{1}); }

VideoTensor BinaryVideo::to_video() const {
  std::vector<float> out(data_.begin(), data_.end());
  return VideoTensor(shape(), std::move(out));
}

}  // namespace trackgen

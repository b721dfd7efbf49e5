#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace trackgen {

/// Shape of a video in canonical (frame, row, column, channel) order.
struct VideoShape {
  int64_t frames = 0;
  int64_t height = 0;
  int64_t width = 0;
  int64_t channels = 0;

  int64_t frame_size() const { return height * width * channels; }
  int64_t pixels_per_frame() const { return height * width; }
  int64_t size() const { return frames * frame_size(); }
  bool operator==(const VideoShape&) const = default;
};

/// An n-frame video with every element finite and inside [0,1].
///
/// Storage is dense row-major (frame, row, column, channel). Instances are
/// immutable once constructed; all producers build a buffer and hand it over.
class VideoTensor {
 public:
  VideoTensor() = default;
  /// Throws ValidationError on NaN/Inf or out-of-range values and
  /// DimensionError when the buffer does not match the shape.
  VideoTensor(VideoShape shape, std::vector<float> data);

  static VideoTensor zeros(VideoShape shape);
  static VideoTensor filled(VideoShape shape, float value);

  const VideoShape& shape() const { return shape_; }
  int64_t frames() const { return shape_.frames; }
  int64_t height() const { return shape_.height; }
  int64_t width() const { return shape_.width; }
  int64_t channels() const { return shape_.channels; }
  bool empty() const { return data_.empty(); }

  std::span<const float> data() const { return data_; }
  std::span<const float> frame_data(int64_t t) const;

  float at(int64_t t, int64_t y, int64_t x, int64_t c = 0) const {
    return data_[static_cast<size_t>(((t * shape_.height + y) * shape_.width + x) * shape_.channels + c)];
  }

  /// Single-frame video holding frame t.
  VideoTensor frame(int64_t t) const;

  bool operator==(const VideoTensor&) const = default;

 private:
  VideoShape shape_{};
  std::vector<float> data_;
};

/// Single-channel video whose elements are exactly 0 or 1.
class BinaryVideo {
 public:
  BinaryVideo() = default;
  /// Values must be 0 or 1.
  BinaryVideo(int64_t frames, int64_t height, int64_t width, std::vector<uint8_t> data);

  static BinaryVideo zeros(int64_t frames, int64_t height, int64_t width);
  /// Rejects any element not exactly 0.0 or 1.0, or C != 1.
  static BinaryVideo from_video(const VideoTensor& v);

  int64_t frames() const { return frames_; }
  int64_t height() const { return height_; }
  int64_t width() const { return width_; }
  int64_t size() const { return frames_ * height_ * width_; }
  VideoShape shape() const { return {frames_, height_, width_, 1}; }

  std::span<const uint8_t> data() const { return data_; }
  std::span<const uint8_t> frame_data(int64_t t) const;
  uint8_t at(int64_t t, int64_t y, int64_t x) const {
    return data_[static_cast<size_t>((t * height_ + y) * width_ + x)];
  }

  BinaryVideo frame(int64_t t) const;
  int64_t count_ones() const;
  VideoTensor to_video() const;

  bool operator==(const BinaryVideo&) const = default;

 private:
  int64_t frames_ = 0;
  int64_t height_ = 0;
  int64_t width_ = 0;
  std::vector<uint8_t> data_;
};

}  // namespace trackgen

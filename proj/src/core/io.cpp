#include "trackgen/core/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "trackgen/core/error.hpp"
#include "trackgen/core/fileutil.hpp"

namespace trackgen {

namespace fs = std::filesystem;

std::vector<uint8_t> encode_png(const Image8& image) {
  if (image.channels != 1 && image.channels != 3) throw DimensionError("PNG encode needs 1 or 3 channels");
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = image.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, image.pixels.data(), 0, nullptr)) {
    throw IoError(std::string("PNG encode failed: ") + img.message);
  }
  std::vector<uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.pixels.data(), 0, nullptr)) {
    throw IoError(std::string("PNG encode failed: ") + img.message);
  }
  out.resize(size);
  return out;
}

Image8 decode_png(std::span<const uint8_t> bytes) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw FormatError(std::string("not a readable PNG: ") + img.message);
  }
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  Image8 out;
  out.width = static_cast<int>(img.width);
  out.height = static_cast<int>(img.height);
  out.channels = color ? 3 : 1;
  out.pixels.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
    png_image_free(&img);
    throw FormatError(std::string("PNG decode failed: ") + img.message);
  }
  return out;
}

Image8 frame_to_image(const VideoTensor& v, int64_t t) {
  auto f = v.frame_data(t);
  Image8 img{static_cast<int>(v.width()), static_cast<int>(v.height()), static_cast<int>(v.channels()), {}};
  img.pixels.resize(f.size());
  std::transform(f.begin(), f.end(), img.pixels.begin(),
                 [](float x) { return static_cast<uint8_t>(std::lround(std::clamp(x, 0.0f, 1.0f) * 255.0f)); });
  return img;
}

VideoTensor image_to_frame(const Image8& image) {
  std::vector<float> data(image.pixels.size());
  std::transform(image.pixels.begin(), image.pixels.end(), data.begin(),
                 [](uint8_t p) { return static_cast<float>(p) / 255.0f; });
  return VideoTensor({1, image.height, image.width, image.channels}, std::move(data));
}

std::vector<uint8_t> encode_frame_png(const VideoTensor& v, int64_t t) { return encode_png(frame_to_image(v, t)); }

VideoTensor load_frame_png(const fs::path& path) { return image_to_frame(decode_png(read_bytes(path))); }

void save_frame_png(const VideoTensor& v, int64_t t, const fs::path& path) {
  write_bytes_atomic(path, encode_frame_png(v, t));
}

namespace {

std::string frame_name(int64_t t) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04lld.png", static_cast<long long>(t));
  return buf;
}

}  // namespace

VideoTensor load_video(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::map<long, fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
    const std::string stem = entry.path().stem().string();
    const bool digits = stem.size() == 4 && std::all_of(stem.begin(), stem.end(), ::isdigit);
    if (!digits) throw FormatError("irregular frame file name '" + entry.path().filename().string() + "'");
    frames.emplace(std::stol(stem), entry.path());
  }
  if (frames.empty()) throw FormatError("no frames in " + dir.string() + " (missing frame at index 0)");
  long expected = 0;
  for (const auto& [index, path] : frames) {
    if (index != expected) throw FormatError("missing frame at index " + std::to_string(expected));
    ++expected;
  }

  std::vector<float> data;
  VideoShape shape{};
  for (const auto& [index, path] : frames) {
    const VideoTensor f = load_frame_png(path);
    if (index == 0) {
      shape = f.shape();
      data.reserve(static_cast<size_t>(shape.frame_size() * static_cast<int64_t>(frames.size())));
    } else if (f.height() != shape.height || f.width() != shape.width || f.channels() != shape.channels) {
      throw DimensionError("frame " + std::to_string(index) + " is " + std::to_string(f.width()) + "x" +
                           std::to_string(f.height()) + "x" + std::to_string(f.channels()) + ", frame 0 is " +
                           std::to_string(shape.width) + "x" + std::to_string(shape.height) + "x" +
                           std::to_string(shape.channels));
    }
    data.insert(data.end(), f.data().begin(), f.data().end());
  }
  shape.frames = static_cast<int64_t>(frames.size());
  return VideoTensor(shape, std::move(data));
}

nlohmann::json save_video(const VideoTensor& v, const fs::path& dir) {
  ensure_directory(dir);
  for (int64_t t = 0; t < v.frames(); ++t) save_frame_png(v, t, dir / frame_name(t));
  nlohmann::json manifest = {{"n", v.frames()}, {"h", v.height()}, {"w", v.width()}, {"c", v.channels()}};
  write_json_atomic(dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace trackgen

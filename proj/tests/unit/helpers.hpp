#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "trackgen/core/tracks.hpp"
#include "trackgen/core/video.hpp"

namespace trackgen::testing {

inline std::vector<uint8_t> random_bits(std::mt19937_64& rng, size_t n, double p = 0.3) {
  std::bernoulli_distribution coin(p);
  std::vector<uint8_t> out(n);
  for (auto& v : out) v = coin(rng) ? 1 : 0;
  return out;
}

template <typename T>
std::vector<T> random_values(std::mt19937_64& rng, size_t n, T lo = 0, T hi = 1) {
  std::uniform_real_distribution<T> u(lo, hi);
  std::vector<T> out(n);
  for (auto& v : out) v = u(rng);
  return out;
}

inline BinaryVideo random_binary_video(std::mt19937_64& rng, int64_t n, int64_t h, int64_t w, double p = 0.3) {
  return BinaryVideo(n, h, w, random_bits(rng, static_cast<size_t>(n * h * w), p));
}

inline VideoTensor random_video(std::mt19937_64& rng, VideoShape shape) {
  return VideoTensor(shape, random_values<float>(rng, static_cast<size_t>(shape.size())));
}

/// Random box tracks inside the frame; objects may be absent on some frames.
inline BoxTrackSet random_tracks(std::mt19937_64& rng, int frames, int height, int width, int objects) {
  BoxTrackSet set{frames, width, height, {}};
  std::uniform_int_distribution<int> xs(0, width - 1);
  std::uniform_int_distribution<int> ys(0, height - 1);
  std::bernoulli_distribution present(0.8);
  for (int id = 0; id < objects; ++id) {
    TrackedObject obj{id, {}};
    for (int t = 0; t < frames; ++t) {
      if (!present(rng)) {
        obj.boxes.emplace_back(std::nullopt);
        continue;
      }
      const int x0 = xs(rng);
      const int y0 = ys(rng);
      std::uniform_int_distribution<int> ws(1, width - x0);
      std::uniform_int_distribution<int> hs(1, height - y0);
      obj.boxes.emplace_back(Box{x0, y0, x0 + ws(rng), y0 + hs(rng)});
    }
    set.objects.push_back(std::move(obj));
  }
  return set;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("trackgen_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace trackgen::testing

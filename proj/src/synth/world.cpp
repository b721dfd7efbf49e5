#include "trackgen/synth/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "trackgen/core/dataset.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/core/fileutil.hpp"
#include "trackgen/core/io.hpp"
#include "trackgen/kernels/parallel.hpp"

namespace trackgen::synth {

namespace {

// Saturated colors, all far from the default green background.
constexpr std::array<std::array<float, 3>, 8> kPalette{{
    {0.95f, 0.15f, 0.15f},
    {0.98f, 0.92f, 0.20f},
    {0.15f, 0.85f, 0.95f},
    {0.95f, 0.30f, 0.90f},
    {1.00f, 1.00f, 1.00f},
    {0.15f, 0.20f, 0.95f},
    {1.00f, 0.60f, 0.10f},
    {0.05f, 0.05f, 0.05f},
}};

constexpr int kMaxPlacementAttempts = 1000;

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string shape_name(SpriteShape s) {
  switch (s) {
    case SpriteShape::square: return "square";
    case SpriteShape::circle: return "circle";
    case SpriteShape::mixed: return "mixed";
  }
  return "square";
}

SpriteShape shape_from_name(const std::string& s) {
  if (s == "square") return SpriteShape::square;
  if (s == "circle") return SpriteShape::circle;
  if (s == "mixed") return SpriteShape::mixed;
  throw ConfigError("unknown sprite shape '" + s + "'");
}

bool sprite_covers(SpriteShape shape, int size, int dx, int dy) {
  if (shape != SpriteShape::circle) return true;
  const double c = (size - 1) * 0.5;
  const double r = size * 0.5;
  return (dx - c) * (dx - c) + (dy - c) * (dy - c) <= r * r;
}

// Boxes grown by one pixel must not touch, so sprites never merge into one
// connected component.
bool separated(const std::vector<std::array<int, 2>>& a, const std::vector<std::array<int, 2>>& b, int size) {
  for (size_t t = 0; t < a.size(); ++t) {
    const bool overlap_x = a[t][0] - 1 < b[t][0] + size && b[t][0] - 1 < a[t][0] + size;
    const bool overlap_y = a[t][1] - 1 < b[t][1] + size && b[t][1] - 1 < a[t][1] + size;
    if (overlap_x && overlap_y) return false;
  }
  return true;
}

}  // namespace

void WorldConfig::validate() const {
  if (num_objects < 1) throw ConfigError("num_objects must be >= 1");
  if (sprite_size < 1) throw ConfigError("sprite_size must be >= 1");
  if (frames < 1) throw ConfigError("frames must be >= 1");
  if (height < 8 || width < 8) throw ConfigError("frame height and width must be >= 8");
  if (sprite_size > height || sprite_size > width) throw ConfigError("sprite does not fit in the frame");
  if (velocity_range < 0) throw ConfigError("velocity_range must be >= 0");
  if (texture_amplitude < 0.0f || texture_amplitude >= kDetectionThreshold) {
    throw ConfigError("texture_amplitude must lie in [0, detection threshold)");
  }
}

nlohmann::json WorldConfig::to_json() const {
  return {{"num_objects", num_objects},
          {"sprite_size", sprite_size},
          {"background", background == BackgroundKind::flat ? "flat" : "textured"},
          {"shape", shape_name(shape)},
          {"velocity_range", velocity_range},
          {"frames", frames},
          {"height", height},
          {"width", width},
          {"seed", seed},
          {"background_color", background_color},
          {"texture_amplitude", texture_amplitude}};
}

WorldConfig WorldConfig::from_json(const nlohmann::json& j) {
  WorldConfig c;
  try {
    c.num_objects = j.value("num_objects", c.num_objects);
    c.sprite_size = j.value("sprite_size", c.sprite_size);
    const std::string bg = j.value("background", std::string("flat"));
    if (bg != "flat" && bg != "textured") throw ConfigError("background must be 'flat' or 'textured'");
    c.background = bg == "flat" ? BackgroundKind::flat : BackgroundKind::textured;
    c.shape = shape_from_name(j.value("shape", std::string("square")));
    c.velocity_range = j.value("velocity_range", c.velocity_range);
    c.frames = j.value("frames", c.frames);
    c.height = j.value("height", c.height);
    c.width = j.value("width", c.width);
    c.seed = j.value("seed", c.seed);
    c.background_color = j.value("background_color", c.background_color);
    c.texture_amplitude = j.value("texture_amplitude", c.texture_amplitude);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad world config: ") + e.what());
  }
  c.validate();
  return c;
}

VideoTensor make_background(const WorldConfig& cfg) {
  const int h = cfg.height;
  const int w = cfg.width;
  std::vector<float> data(static_cast<size_t>(h * w * 3));
  if (cfg.background == BackgroundKind::flat) {
    for (int p = 0; p < h * w; ++p) {
      for (int c = 0; c < 3; ++c) data[static_cast<size_t>(p * 3 + c)] = cfg.background_color[static_cast<size_t>(c)];
    }
  } else {
    // Value noise: random lattice every 8 px, bilinearly interpolated.
    constexpr int kCell = 8;
    const int gh = h / kCell + 2;
    const int gw = w / kCell + 2;
    std::mt19937_64 rng(splitmix64(cfg.seed ^ 0x5bd1e995ULL));
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    std::vector<float> lattice(static_cast<size_t>(gh * gw * 3));
    for (auto& v : lattice) v = u(rng);
    auto at = [&](int gy, int gx, int c) { return lattice[static_cast<size_t>((gy * gw + gx) * 3 + c)]; };
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const float fy = static_cast<float>(y) / kCell;
        const float fx = static_cast<float>(x) / kCell;
        const int gy = static_cast<int>(fy);
        const int gx = static_cast<int>(fx);
        const float ty = fy - gy;
        const float tx = fx - gx;
        for (int c = 0; c < 3; ++c) {
          const float v = (1 - ty) * ((1 - tx) * at(gy, gx, c) + tx * at(gy, gx + 1, c)) +
                          ty * ((1 - tx) * at(gy + 1, gx, c) + tx * at(gy + 1, gx + 1, c));
          data[static_cast<size_t>((y * w + x) * 3 + c)] =
              std::clamp(cfg.background_color[static_cast<size_t>(c)] + cfg.texture_amplitude * v, 0.0f, 1.0f);
        }
      }
    }
  }
  return VideoTensor({1, h, w, 3}, std::move(data));
}

std::vector<std::array<int, 2>> simulate_positions(const WorldConfig& cfg, const SpriteSpec& sprite) {
  const int max_x = cfg.width - cfg.sprite_size;
  const int max_y = cfg.height - cfg.sprite_size;
  if (sprite.x < 0 || sprite.y < 0 || sprite.x > max_x || sprite.y > max_y) {
    throw ValidationError("sprite start position is outside the frame");
  }
  std::vector<std::array<int, 2>> out;
  out.reserve(static_cast<size_t>(cfg.frames));
  int x = sprite.x, y = sprite.y, vx = sprite.vx, vy = sprite.vy;
  for (int t = 0; t < cfg.frames; ++t) {
    out.push_back({x, y});
    x += vx;
    y += vy;
    // Reflect off the walls; repeat in case a large velocity overshoots twice.
    while (x < 0 || x > max_x) {
      x = x < 0 ? -x : 2 * max_x - x;
      vx = -vx;
    }
    while (y < 0 || y > max_y) {
      y = y < 0 ? -y : 2 * max_y - y;
      vy = -vy;
    }
  }
  return out;
}

SynthEpisode render_episode(const WorldConfig& cfg, std::span<const SpriteSpec> sprites) {
  cfg.validate();
  SynthEpisode ep;
  ep.background = make_background(cfg);
  const int n = cfg.frames, h = cfg.height, w = cfg.width, s = cfg.sprite_size;
  std::vector<float> data(static_cast<size_t>(n) * static_cast<size_t>(h * w * 3));
  const auto bg = ep.background.data();
  for (int t = 0; t < n; ++t) std::copy(bg.begin(), bg.end(), data.begin() + static_cast<long>(t) * h * w * 3);

  ep.tracks.num_frames = n;
  ep.tracks.width = w;
  ep.tracks.height = h;
  for (size_t i = 0; i < sprites.size(); ++i) {
    const auto& sp = sprites[i];
    const auto positions = simulate_positions(cfg, sp);
    TrackedObject obj;
    obj.id = static_cast<int>(i);
    for (int t = 0; t < n; ++t) {
      const auto [x0, y0] = positions[static_cast<size_t>(t)];
      int bx0 = w, by0 = h, bx1 = 0, by1 = 0;
      for (int dy = 0; dy < s; ++dy) {
        for (int dx = 0; dx < s; ++dx) {
          if (!sprite_covers(sp.shape, s, dx, dy)) continue;
          const int x = x0 + dx, y = y0 + dy;
          float* px = &data[(static_cast<size_t>(t) * h * w + static_cast<size_t>(y * w + x)) * 3];
          std::copy(sp.color.begin(), sp.color.end(), px);
          bx0 = std::min(bx0, x);
          by0 = std::min(by0, y);
          bx1 = std::max(bx1, x + 1);
          by1 = std::max(by1, y + 1);
        }
      }
      obj.boxes.emplace_back(Box{bx0, by0, bx1, by1});
    }
    ep.tracks.objects.push_back(std::move(obj));
  }
  ep.video = VideoTensor({n, h, w, 3}, std::move(data));
  return ep;
}

std::vector<SpriteSpec> sample_sprites(const WorldConfig& cfg, uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_int_distribution<int> ux(0, cfg.width - cfg.sprite_size);
  std::uniform_int_distribution<int> uy(0, cfg.height - cfg.sprite_size);
  std::uniform_int_distribution<int> uv(-cfg.velocity_range, cfg.velocity_range);
  std::bernoulli_distribution coin(0.5);

  std::vector<SpriteSpec> sprites;
  std::vector<std::vector<std::array<int, 2>>> paths;
  for (int i = 0; i < cfg.num_objects; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      SpriteSpec sp;
      sp.x = ux(rng);
      sp.y = uy(rng);
      sp.vx = uv(rng);
      sp.vy = uv(rng);
      sp.shape = cfg.shape == SpriteShape::mixed ? (coin(rng) ? SpriteShape::circle : SpriteShape::square) : cfg.shape;
      sp.color = kPalette[static_cast<size_t>(i) % kPalette.size()];
      auto path = simulate_positions(cfg, sp);
      placed = std::all_of(paths.begin(), paths.end(),
                           [&](const auto& other) { return separated(path, other, cfg.sprite_size); });
      if (placed) {
        sprites.push_back(sp);
        paths.push_back(std::move(path));
      }
    }
    if (!placed) {
      throw PlacementError("could not place sprite " + std::to_string(i) + " without overlap after " +
                           std::to_string(kMaxPlacementAttempts) + " attempts");
    }
  }
  return sprites;
}

SynthEpisode generate_episode(const WorldConfig& cfg, uint64_t seed) {
  const auto sprites = sample_sprites(cfg, seed);
  return render_episode(cfg, sprites);
}

std::vector<Box> detect_frame(std::span<const uint8_t> foreground, int height, int width) {
  std::vector<int> label(foreground.size(), -1);
  std::vector<Box> boxes;
  std::vector<int> stack;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int start = y * width + x;
      if (!foreground[static_cast<size_t>(start)] || label[static_cast<size_t>(start)] >= 0) continue;
      const int id = static_cast<int>(boxes.size());
      Box b{x, y, x + 1, y + 1};
      label[static_cast<size_t>(start)] = id;
      stack.assign(1, start);
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int py = p / width, px = p % width;
        b.x0 = std::min(b.x0, px);
        b.y0 = std::min(b.y0, py);
        b.x1 = std::max(b.x1, px + 1);
        b.y1 = std::max(b.y1, py + 1);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int qy = py + dy, qx = px + dx;
            if (qy < 0 || qy >= height || qx < 0 || qx >= width) continue;
            const int q = qy * width + qx;
            if (foreground[static_cast<size_t>(q)] && label[static_cast<size_t>(q)] < 0) {
              label[static_cast<size_t>(q)] = id;
              stack.push_back(q);
            }
          }
        }
      }
      boxes.push_back(b);
    }
  }
  return boxes;
}

BoxTrackSet oracle_detect(const VideoTensor& video, const VideoTensor& background, float tau) {
  if (background.frames() != 1 || background.height() != video.height() || background.width() != video.width() ||
      background.channels() != video.channels()) {
    throw DimensionError("oracle_detect: background frame does not match the video");
  }
  const int n = static_cast<int>(video.frames());
  const int h = static_cast<int>(video.height());
  const int w = static_cast<int>(video.width());
  std::vector<uint8_t> fg(static_cast<size_t>(n) * static_cast<size_t>(h * w));
  kernels::parallel::threshold_difference(video.data(), background.data(), video.channels(), tau, fg);

  BoxTrackSet out;
  out.num_frames = n;
  out.width = w;
  out.height = h;
  struct Live {
    double cx, cy;
  };
  std::vector<Live> last;  // last known centroid per object, index = id
  for (int t = 0; t < n; ++t) {
    const auto boxes = detect_frame(std::span(fg).subspan(static_cast<size_t>(t) * h * w, static_cast<size_t>(h * w)), h, w);
    struct Pair {
      double d;
      size_t obj, det;
    };
    std::vector<Pair> pairs;
    for (size_t o = 0; o < last.size(); ++o) {
      for (size_t d = 0; d < boxes.size(); ++d) {
        const double cx = 0.5 * (boxes[d].x0 + boxes[d].x1), cy = 0.5 * (boxes[d].y0 + boxes[d].y1);
        pairs.push_back({std::hypot(cx - last[o].cx, cy - last[o].cy), o, d});
      }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
    std::vector<bool> obj_used(last.size(), false), det_used(boxes.size(), false);
    for (auto& obj : out.objects) obj.boxes.emplace_back(std::nullopt);
    auto assign = [&](size_t o, size_t d) {
      out.objects[o].boxes.back() = boxes[d];
      last[o] = {0.5 * (boxes[d].x0 + boxes[d].x1), 0.5 * (boxes[d].y0 + boxes[d].y1)};
      obj_used[o] = det_used[d] = true;
    };
    for (const auto& p : pairs) {
      if (!obj_used[p.obj] && !det_used[p.det]) assign(p.obj, p.det);
    }
    for (size_t d = 0; d < boxes.size(); ++d) {
      if (det_used[d]) continue;
      TrackedObject obj;
      obj.id = static_cast<int>(out.objects.size());
      obj.boxes.assign(static_cast<size_t>(t + 1), std::nullopt);
      out.objects.push_back(std::move(obj));
      last.push_back({0.0, 0.0});
      obj_used.push_back(false);
      assign(out.objects.size() - 1, d);
    }
  }
  return out;
}

uint64_t episode_seed(uint64_t world_seed, size_t index) {
  return splitmix64(world_seed * 0x100000001b3ULL + static_cast<uint64_t>(index) + 1);
}

nlohmann::json generate_dataset(const WorldConfig& cfg, size_t count, const std::filesystem::path& out_dir) {
  cfg.validate();
  ensure_directory(out_dir);
  DatasetIndex index;
  index.config = cfg.to_json();
  save_frame_png(make_background(cfg), 0, out_dir / "background.png");
  for (size_t i = 0; i < count; ++i) {
    const auto ep = generate_episode(cfg, episode_seed(cfg.seed, i));
    const EpisodePaths paths{out_dir / episode_name(i)};
    save_video(ep.video, paths.frames());
    save_tracks(ep.tracks, paths.tracks());
    index.episodes.push_back(episode_name(i));
  }
  write_dataset_index(out_dir, index);
  return {{"episodes", index.episodes}, {"config", index.config}};
}

}  // namespace trackgen::synth

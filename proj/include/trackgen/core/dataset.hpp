#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackgen/core/tracks.hpp"
#include "trackgen/core/video.hpp"

namespace trackgen {

/// Directory layout of one episode: frames/, motion/, masks/, tracks.json.
struct EpisodePaths {
  std::filesystem::path root;
  std::filesystem::path frames() const { return root / "frames"; }
  std::filesystem::path motion() const { return root / "motion"; }
  std::filesystem::path masks() const { return root / "masks"; }
  std::filesystem::path tracks() const { return root / "tracks.json"; }
};

struct Episode {
  std::string name;
  VideoTensor video;
  BoxTrackSet tracks;
  std::optional<BinaryVideo> motion;
  std::optional<BinaryVideo> masks;
};

/// `index.json` at the dataset root: {"episodes": [...], "config": {...}}.
struct DatasetIndex {
  std::vector<std::string> episodes;
  nlohmann::json config = nlohmann::json::object();
};

DatasetIndex read_dataset_index(const std::filesystem::path& dataset_dir);
void write_dataset_index(const std::filesystem::path& dataset_dir, const DatasetIndex& index);
std::string episode_name(size_t i);

void save_binary_video(const BinaryVideo& v, const std::filesystem::path& dir);
BinaryVideo load_binary_video(const std::filesystem::path& dir);

struct EpisodeLoadOptions {
  bool motion = false;
  bool masks = false;
};

/// Throws IoError when a requested part is missing.
Episode load_episode(const std::filesystem::path& episode_dir, EpisodeLoadOptions opts = {});

/// Loads the first `limit` episodes of the index (all when limit <= 0).
std::vector<Episode> load_dataset(const std::filesystem::path& dataset_dir, EpisodeLoadOptions opts = {},
                                  long limit = 0);

}  // namespace trackgen

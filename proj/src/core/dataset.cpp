#include "trackgen/core/dataset.hpp"

#include <cstdio>

#include "trackgen/core/error.hpp"
#include "trackgen/core/fileutil.hpp"
#include "trackgen/core/io.hpp"

namespace trackgen {

namespace fs = std::filesystem;

DatasetIndex read_dataset_index(const fs::path& dataset_dir) {
  const auto j = read_json_file(dataset_dir / "index.json");
  DatasetIndex index;
  try {
    index.episodes = j.at("episodes").get<std::vector<std::string>>();
    index.config = j.value("config", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed dataset index: " + std::string(e.what()));
  }
  return index;
}

void write_dataset_index(const fs::path& dataset_dir, const DatasetIndex& index) {
  ensure_directory(dataset_dir);
  write_json_atomic(dataset_dir / "index.json", {{"episodes", index.episodes}, {"config", index.config}});
}

std::string episode_name(size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ep_%04zu", i);
  return buf;
}

void save_binary_video(const BinaryVideo& v, const fs::path& dir) { save_video(v.to_video(), dir); }

BinaryVideo load_binary_video(const fs::path& dir) { return BinaryVideo::from_video(load_video(dir)); }

Episode load_episode(const fs::path& episode_dir, EpisodeLoadOptions opts) {
  const EpisodePaths paths{episode_dir};
  Episode ep;
  ep.name = episode_dir.filename().string();
  ep.video = load_video(paths.frames());
  if (!fs::exists(paths.tracks())) {
    throw IoError("episode " + episode_dir.string() + " has no tracks.json; run a tracker or ingest tracks first");
  }
  ep.tracks = load_tracks(paths.tracks());
  if (opts.motion) {
    if (!fs::is_directory(paths.motion())) {
      throw IoError("episode " + episode_dir.string() + " has no motion/ videos; run `preprocess` first");
    }
    ep.motion = load_binary_video(paths.motion());
  }
  if (opts.masks) {
    if (!fs::is_directory(paths.masks())) {
      throw IoError("episode " + episode_dir.string() + " has no masks/; run `preprocess` first");
    }
    ep.masks = load_binary_video(paths.masks());
  }
  return ep;
}

std::vector<Episode> load_dataset(const fs::path& dataset_dir, EpisodeLoadOptions opts, long limit) {
  const auto index = read_dataset_index(dataset_dir);
  std::vector<Episode> out;
  for (const auto& name : index.episodes) {
    if (limit > 0 && static_cast<long>(out.size()) >= limit) break;
    out.push_back(load_episode(dataset_dir / name, opts));
  }
  return out;
}

}  // namespace trackgen

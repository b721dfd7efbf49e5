#include "trackgen/core/tracks.hpp"

#include <algorithm>
#include <set>

#include "trackgen/core/error.hpp"
#include "trackgen/core/fileutil.hpp"

namespace trackgen {

double iou(const Box& a, const Box& b) {
  const int ix0 = std::max(a.x0, b.x0);
  const int iy0 = std::max(a.y0, b.y0);
  const int ix1 = std::min(a.x1, b.x1);
  const int iy1 = std::min(a.y1, b.y1);
  const int64_t inter =
      (ix1 > ix0 && iy1 > iy0) ? static_cast<int64_t>(ix1 - ix0) * static_cast<int64_t>(iy1 - iy0) : 0;
  const int64_t uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

void BoxTrackSet::validate() const {
  if (num_frames < 1) throw ValidationError("num_frames must be >= 1");
  if (width < 1 || height < 1) throw ValidationError("track set width/height must be >= 1");
  std::set<int> ids;
  for (const auto& obj : objects) {
    if (!ids.insert(obj.id).second) throw ValidationError("duplicate object id " + std::to_string(obj.id));
    if (static_cast<int>(obj.boxes.size()) != num_frames) {
      throw ValidationError("object " + std::to_string(obj.id) + " has " + std::to_string(obj.boxes.size()) +
                            " boxes, num_frames is " + std::to_string(num_frames));
    }
    for (int t = 0; t < num_frames; ++t) {
      const auto& b = obj.boxes[static_cast<size_t>(t)];
      if (!b) continue;
      const std::string where = "object " + std::to_string(obj.id) + " frame " + std::to_string(t);
      if (b->x1 <= b->x0 || b->y1 <= b->y0) throw ValidationError(where + ": empty box (x1<=x0 or y1<=y0)");
      if (b->x0 < 0 || b->y0 < 0 || b->x1 > width || b->y1 > height) {
        throw ValidationError(where + ": box outside " + std::to_string(width) + "x" + std::to_string(height) +
                              " frame");
      }
    }
  }
}

std::vector<Box> BoxTrackSet::boxes_at(int t) const {
  std::vector<Box> out;
  for (const auto& obj : objects) {
    if (t < static_cast<int>(obj.boxes.size()) && obj.boxes[static_cast<size_t>(t)]) {
      out.push_back(*obj.boxes[static_cast<size_t>(t)]);
    }
  }
  return out;
}

nlohmann::json tracks_to_json(const BoxTrackSet& tracks) {
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& obj : tracks.objects) {
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& b : obj.boxes) {
      if (b) {
        boxes.push_back({b->x0, b->y0, b->x1, b->y1});
      } else {
        boxes.push_back(nullptr);
      }
    }
    objects.push_back({{"id", obj.id}, {"boxes", std::move(boxes)}});
  }
  return {{"num_frames", tracks.num_frames},
          {"width", tracks.width},
          {"height", tracks.height},
          {"objects", std::move(objects)}};
}

BoxTrackSet tracks_from_json(const nlohmann::json& j) {
  BoxTrackSet t;
  try {
    t.num_frames = j.at("num_frames").get<int>();
    t.width = j.at("width").get<int>();
    t.height = j.at("height").get<int>();
    for (const auto& o : j.at("objects")) {
      TrackedObject obj;
      obj.id = o.at("id").get<int>();
      for (const auto& b : o.at("boxes")) {
        if (b.is_null()) {
          obj.boxes.emplace_back(std::nullopt);
          continue;
        }
        if (!b.is_array() || b.size() != 4) {
          throw FormatError("object " + std::to_string(obj.id) + ": box must be [x0,y0,x1,y1] or null");
        }
        obj.boxes.emplace_back(Box{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()});
      }
      t.objects.push_back(std::move(obj));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed tracks JSON: ") + e.what());
  }
  t.validate();
  return t;
}

BoxTrackSet load_tracks(const std::filesystem::path& path) {
  return tracks_from_json(read_json_file(path));
}

std::string canonical_tracks_text(const BoxTrackSet& tracks) { return tracks_to_json(tracks).dump(1) + "\n"; }

void save_tracks(const BoxTrackSet& tracks, const std::filesystem::path& path) {
  tracks.validate();
  write_text_atomic(path, canonical_tracks_text(tracks));
}

}  // namespace trackgen

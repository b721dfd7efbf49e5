#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace trackgen {

/// Axis-aligned pixel rectangle, half-open: [x0,x1) x [y0,y1).
struct Box {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  int64_t area() const { return static_cast<int64_t>(width()) * height(); }
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  bool operator==(const Box&) const = default;
};

/// Intersection-over-union of two half-open boxes.
double iou(const Box& a, const Box& b);

struct TrackedObject {
  int id = 0;
  /// One entry per frame; nullopt where the object was not observed.
  std::vector<std::optional<Box>> boxes;
  bool operator==(const TrackedObject&) const = default;
};

/// Per-object, per-frame boxes over an n-frame video of size width x height.
struct BoxTrackSet {
  int num_frames = 0;
  int width = 0;
  int height = 0;
  std::vector<TrackedObject> objects;

  /// Throws ValidationError naming the object id and frame of the first bad box.
  void validate() const;
  /// Boxes present in frame t, in object order.
  std::vector<Box> boxes_at(int t) const;

  bool operator==(const BoxTrackSet&) const = default;
};

nlohmann::json tracks_to_json(const BoxTrackSet& tracks);
/// Parses and validates; throws FormatError on schema problems.
BoxTrackSet tracks_from_json(const nlohmann::json& j);

BoxTrackSet load_tracks(const std::filesystem::path& path);
void save_tracks(const BoxTrackSet& tracks, const std::filesystem::path& path);
/// Canonical text form written by save_tracks.
std::string canonical_tracks_text(const BoxTrackSet& tracks);

}  // namespace trackgen

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace trackgen {

enum class ModelType { background_ae, motion_vae, content_vae, decoder, generator, critic };

std::string to_string(ModelType type);
/// Throws ValidationError for unknown names.
ModelType model_type_from_string(const std::string& name);

inline constexpr int kCheckpointFormatVersion = 1;

/// JSON sidecar stored next to a weights blob.
struct CheckpointMeta {
  ModelType model_type = ModelType::motion_vae;
  std::string config_hash;
  long step = 0;
  std::string created_at;
  int format_version = kCheckpointFormatVersion;
  /// Full model/training config, enough to rebuild the network.
  nlohmann::json config = nlohmann::json::object();
};

nlohmann::json meta_to_json(const CheckpointMeta& meta);
/// Throws FormatError on missing fields or an unknown model_type.
CheckpointMeta meta_from_json(const nlohmann::json& j);

/// A checkpoint is `<dir>/<model_type>.pt` plus `<dir>/<model_type>.json`.
std::filesystem::path checkpoint_weights_path(const std::filesystem::path& dir, ModelType type);
std::filesystem::path checkpoint_meta_path(const std::filesystem::path& dir, ModelType type);

/// Reads the sidecar for `expected` and rejects a mismatched model_type.
CheckpointMeta read_checkpoint_meta(const std::filesystem::path& dir, ModelType expected);

/// Hash of the canonical (sorted-key) dump of a config.
std::string config_hash(const nlohmann::json& config);

}  // namespace trackgen

#include "trackgen/core/checkpoint.hpp"

#include <array>
#include <utility>

#include "trackgen/core/error.hpp"
#include "trackgen/core/fileutil.hpp"

namespace trackgen {

namespace {

constexpr std::array<std::pair<ModelType, const char*>, 6> kNames{{
    {ModelType::background_ae, "background_ae"},
    {ModelType::motion_vae, "motion_vae"},
    {ModelType::content_vae, "content_vae"},
    {ModelType::decoder, "decoder"},
    {ModelType::generator, "generator"},
    {ModelType::critic, "critic"},
}};

}  // namespace

std::string to_string(ModelType type) {
  for (const auto& [t, name] : kNames) {
    if (t == type) return name;
  }
  return "unknown";
}

ModelType model_type_from_string(const std::string& name) {
  for (const auto& [t, n] : kNames) {
    if (name == n) return t;
  }
  throw ValidationError("unknown model_type '" + name + "'");
}

nlohmann::json meta_to_json(const CheckpointMeta& meta) {
  return {{"model_type", to_string(meta.model_type)},
          {"config_hash", meta.config_hash},
          {"step", meta.step},
          {"created_at", meta.created_at},
          {"format_version", meta.format_version},
          {"config", meta.config}};
}

CheckpointMeta meta_from_json(const nlohmann::json& j) {
  CheckpointMeta m;
  try {
    m.model_type = model_type_from_string(j.at("model_type").get<std::string>());
    m.config_hash = j.at("config_hash").get<std::string>();
    m.step = j.at("step").get<long>();
    m.created_at = j.at("created_at").get<std::string>();
    m.format_version = j.at("format_version").get<int>();
    m.config = j.value("config", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint sidecar: ") + e.what());
  } catch (const ValidationError& e) {
    throw FormatError(std::string("malformed checkpoint sidecar: ") + e.what());
  }
  if (m.format_version != kCheckpointFormatVersion) {
    throw FormatError("unsupported checkpoint format_version " + std::to_string(m.format_version));
  }
  return m;
}

std::filesystem::path checkpoint_weights_path(const std::filesystem::path& dir, ModelType type) {
  return dir / (to_string(type) + ".pt");
}

std::filesystem::path checkpoint_meta_path(const std::filesystem::path& dir, ModelType type) {
  return dir / (to_string(type) + ".json");
}

CheckpointMeta read_checkpoint_meta(const std::filesystem::path& dir, ModelType expected) {
  const auto path = checkpoint_meta_path(dir, expected);
  if (!std::filesystem::exists(path)) {
    throw IoError("no " + to_string(expected) + " checkpoint in " + dir.string());
  }
  CheckpointMeta meta = meta_from_json(read_json_file(path));
  if (meta.model_type != expected) {
    throw ValidationError("checkpoint " + path.string() + " holds model_type " + to_string(meta.model_type) +
                          ", expected " + to_string(expected));
  }
  return meta;
}

std::string config_hash(const nlohmann::json& config) { return fnv1a_hex(config.dump()); }

}  // namespace trackgen

#include "trackgen/core/config.hpp"

#include "trackgen/core/fileutil.hpp"

namespace trackgen {

FlatConfig::FlatConfig(nlohmann::json values) : values_(std::move(values)) {
  if (!values_.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : values_.items()) {
    if (value.is_object()) throw ConfigError("config key '" + key + "' is nested; configs are flat");
  }
}

FlatConfig FlatConfig::load(const std::filesystem::path& path) { return FlatConfig(read_json_file(path)); }

void FlatConfig::merge(const FlatConfig& overrides) {
  for (const auto& [key, value] : overrides.values_.items()) values_[key] = value;
}

}  // namespace trackgen

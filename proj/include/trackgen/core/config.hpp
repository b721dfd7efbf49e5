#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "trackgen/core/error.hpp"

namespace trackgen {

/// Flat key/value configuration. Keys a reader does not ask for are ignored,
/// so a single file can carry settings for several commands.
class FlatConfig {
 public:
  FlatConfig() = default;
  explicit FlatConfig(nlohmann::json values);

  static FlatConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.contains(key); }

  template <typename T>
  T get(const std::string& key, const T& fallback) const {
    if (!values_.contains(key)) return fallback;
    try {
      return values_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }

  /// Later writes win; used to layer CLI flags over a file.
  void set(const std::string& key, nlohmann::json value) { values_[key] = std::move(value); }
  void merge(const FlatConfig& overrides);

  const nlohmann::json& json() const { return values_; }

 private:
  nlohmann::json values_ = nlohmann::json::object();
};

}  // namespace trackgen

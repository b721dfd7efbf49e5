#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "trackgen/core/video.hpp"
#include "trackgen/generator/pipeline.hpp"

namespace trackgen::service {

struct ModelEntry {
  std::string id;
  std::filesystem::path dir;
  int64_t frames = 0;
  int64_t height = 0;
  int64_t width = 0;
  long trained_steps = 0;
  std::shared_ptr<const generator::Pipeline> pipeline;

  nlohmann::json summary() const;
};

/// Immutable set of loadable models. A model is a directory holding motion
/// VAE, content VAE and decoder or generator checkpoints; `models_dir` itself
/// and each of its subdirectories are considered. Directories whose sidecars
/// or weights fail to load are skipped with a warning.
class ModelRegistry {
 public:
  ModelRegistry() = default;
  static ModelRegistry scan(const std::filesystem::path& models_dir);
  void add(ModelEntry entry);

  const std::vector<ModelEntry>& entries() const { return entries_; }
  /// nullptr when unknown.
  const ModelEntry* find(const std::string& id) const;

 private:
  std::vector<ModelEntry> entries_;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Request handling independent of the HTTP transport.
class Service {
 public:
  explicit Service(ModelRegistry registry);

  /// POST /api/v1/generate. `zip` selects the archive variant.
  HttpResponse generate(const std::string& body, bool zip) const;
  /// GET /api/v1/models.
  HttpResponse models() const;
  /// GET /api/v1/health.
  HttpResponse health() const;

  const ModelRegistry& registry() const { return registry_; }

 private:
  ModelRegistry registry_;
};

/// Parses a generate request body against a model's shape. Throws
/// ValidationError naming the offending field.
generator::GenerateRequest parse_generate_request(const nlohmann::json& body);

/// Base64 PNG per frame, in order.
std::vector<std::string> encode_frames(const VideoTensor& video);

/// Serves `service` until stop is requested. `on_ready` receives the bound
/// port (useful with port 0). Blocks; returns false if binding fails.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and serves; port 0 picks a free port. Returns false on bind failure.
  bool listen(const std::string& host, int port, const std::function<void(int)>& on_ready = {});
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace trackgen::service

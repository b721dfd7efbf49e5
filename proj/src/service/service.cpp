#include "trackgen/service/service.hpp"

#include <chrono>

#include <httplib.h>

#include "trackgen/core/checkpoint.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/core/log.hpp"
#include "trackgen/core/fileutil.hpp"
#include "trackgen/core/io.hpp"
#include "trackgen/service/zip.hpp"

namespace trackgen::service {

namespace {

/// Validation failure tied to one request field.
class FieldError : public ValidationError {
 public:
  FieldError(std::string field, const std::string& what) : ValidationError(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

HttpResponse json_response(int status, const nlohmann::json& body) { return {status, "application/json", body.dump()}; }

HttpResponse error_response(int status, const std::string& message, const std::string& field = {}) {
  nlohmann::json body = {{"error", message}};
  if (!field.empty()) body["field"] = field;
  return json_response(status, body);
}

bool has_model_checkpoints(const std::filesystem::path& dir) {
  const bool generator = std::filesystem::exists(checkpoint_meta_path(dir, ModelType::generator)) ||
                         std::filesystem::exists(checkpoint_meta_path(dir, ModelType::decoder));
  return generator && std::filesystem::exists(checkpoint_meta_path(dir, ModelType::motion_vae)) &&
         std::filesystem::exists(checkpoint_meta_path(dir, ModelType::content_vae));
}

void try_add(ModelRegistry& registry, const std::filesystem::path& dir, const std::string& id) {
  if (!has_model_checkpoints(dir)) return;
  try {
    auto pipeline = std::make_shared<const generator::Pipeline>(generator::Pipeline::load(dir));
    const auto& cfg = pipeline->config();
    registry.add({id, dir, cfg.frames, cfg.height, cfg.width, pipeline->trained_steps(), std::move(pipeline)});
  } catch (const std::exception& e) {
    log::warn("skipping model directory " + dir.string() + ": " + e.what());
  }
}

}  // namespace

nlohmann::json ModelEntry::summary() const {
  return {{"model_id", id}, {"n", frames}, {"h", height}, {"w", width}, {"trained_steps", trained_steps}};
}

ModelRegistry ModelRegistry::scan(const std::filesystem::path& models_dir) {
  ModelRegistry registry;
  if (!std::filesystem::is_directory(models_dir)) {
    log::warn("models directory " + models_dir.string() + " does not exist");
    return registry;
  }
  try_add(registry, models_dir, models_dir.filename().string());
  std::vector<std::filesystem::path> subdirs;
  for (const auto& e : std::filesystem::directory_iterator(models_dir)) {
    if (e.is_directory()) subdirs.push_back(e.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& d : subdirs) try_add(registry, d, d.filename().string());
  return registry;
}

void ModelRegistry::add(ModelEntry entry) {
  if (find(entry.id) != nullptr) {
    log::warn("duplicate model id " + entry.id + "; keeping the first");
    return;
  }
  entries_.push_back(std::move(entry));
}

const ModelEntry* ModelRegistry::find(const std::string& id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

generator::GenerateRequest parse_generate_request(const nlohmann::json& body) {
  if (!body.is_object()) throw FieldError("body", "request body must be a JSON object");
  generator::GenerateRequest req;
  const auto mode = body.value("mode", std::string("controlled"));
  try {
    req.mode = generator::generate_mode_from_string(mode);
  } catch (const ValidationError& e) {
    throw FieldError("mode", e.what());
  }
  if (!body.contains("seed") || !body["seed"].is_number_integer() ||
      (body["seed"].is_number_integer() && !body["seed"].is_number_unsigned() && body["seed"].get<int64_t>() < 0)) {
    throw FieldError("seed", "seed must be a non-negative integer");
  }
  req.seed = body["seed"].get<uint64_t>();
  if (req.mode == generator::GenerateMode::controlled) {
    if (!body.contains("content_image") || !body["content_image"].is_string()) {
      throw FieldError("content_image", "a base64 PNG content image is required in controlled mode");
    }
    if (!body.contains("tracks") || !body["tracks"].is_object()) {
      throw FieldError("tracks", "a tracks object is required in controlled mode");
    }
    try {
      const auto bytes = base64_decode(body["content_image"].get<std::string>());
      req.content = image_to_frame(decode_png(bytes));
    } catch (const Error& e) {
      throw FieldError("content_image", e.what());
    }
    try {
      req.tracks = tracks_from_json(body["tracks"]);
    } catch (const ValidationError& e) {
      throw FieldError("tracks", e.what());
    }
  }
  return req;
}

std::vector<std::string> encode_frames(const VideoTensor& video) {
  std::vector<std::string> out;
  for (int64_t t = 0; t < video.frames(); ++t) out.push_back(base64_encode(encode_frame_png(video, t)));
  return out;
}

Service::Service(ModelRegistry registry) : registry_(std::move(registry)) {}

HttpResponse Service::generate(const std::string& body, bool zip) const {
  if (registry_.entries().empty()) return error_response(503, "no model loaded");
  const auto start = std::chrono::steady_clock::now();
  try {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw FieldError("body", std::string("invalid JSON: ") + e.what());
    }
    const ModelEntry* model = &registry_.entries().front();
    if (j.is_object() && j.contains("model_id") && !j["model_id"].is_null()) {
      if (!j["model_id"].is_string()) throw FieldError("model_id", "model_id must be a string");
      model = registry_.find(j["model_id"].get<std::string>());
      if (model == nullptr) return error_response(404, "unknown model_id '" + j["model_id"].get<std::string>() + "'", "model_id");
    }
    const auto req = parse_generate_request(j);
    if (req.tracks && req.tracks->num_frames != model->frames) {
      throw FieldError("tracks.num_frames", "is " + std::to_string(req.tracks->num_frames) + ", model " + model->id +
                                                " generates " + std::to_string(model->frames) + " frames");
    }
    if (req.content && (req.content->width() != model->width || req.content->height() != model->height)) {
      throw FieldError("content_image", "must be " + std::to_string(model->width) + "x" +
                                            std::to_string(model->height));
    }
    const auto video = model->pipeline->generate(req);
    const auto elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (zip) {
      std::vector<std::pair<std::string, std::vector<uint8_t>>> files;
      for (int64_t t = 0; t < video.frames(); ++t) {
        char name[16];
        std::snprintf(name, sizeof(name), "%04lld.png", static_cast<long long>(t));
        files.emplace_back(name, encode_frame_png(video, t));
      }
      return {200, "application/zip", store_zip(files)};
    }
    return json_response(200, {{"frames", encode_frames(video)},
                               {"meta",
                                {{"model_id", model->id},
                                 {"seed", req.seed},
                                 {"n", video.frames()},
                                 {"h", video.height()},
                                 {"w", video.width()},
                                 {"elapsed_ms", elapsed}}}});
  } catch (const FieldError& e) {
    return error_response(400, e.what(), e.field());
  } catch (const ValidationError& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    log::warn(std::string("generate failed: ") + e.what());
    return error_response(500, e.what());
  }
}

HttpResponse Service::models() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : registry_.entries()) list.push_back(e.summary());
  return json_response(200, {{"models", list}});
}

HttpResponse Service::health() const {
  return json_response(200, {{"status", "ok"}, {"model_loaded", !registry_.entries().empty()}});
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->server;
  const Service* svc = &service;
  auto reply = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  srv.Post("/api/v1/generate", [svc, reply](const httplib::Request& req, httplib::Response& res) {
    const bool zip = req.has_param("format") && req.get_param_value("format") == "zip";
    reply(res, svc->generate(req.body, zip));
  });
  srv.Get("/api/v1/models",
          [svc, reply](const httplib::Request&, httplib::Response& res) { reply(res, svc->models()); });
  srv.Get("/api/v1/health",
          [svc, reply](const httplib::Request&, httplib::Response& res) { reply(res, svc->health()); });
}

HttpServer::~HttpServer() = default;

bool HttpServer::listen(const std::string& host, int port, const std::function<void(int)>& on_ready) {
  auto& srv = impl_->server;
  int bound = port;
  if (port == 0) {
    bound = srv.bind_to_any_port(host);
  } else if (!srv.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) return false;
  if (on_ready) on_ready(bound);
  return srv.listen_after_bind();
}

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace trackgen::service

#include <doctest.h>

#include <httplib.h>

#include <future>
#include <thread>

#include "helpers.hpp"
#include "model_fixtures.hpp"
#include "trackgen/core/fileutil.hpp"
#include "trackgen/core/io.hpp"
#include "trackgen/generator/pipeline.hpp"
#include "trackgen/service/service.hpp"
#include "trackgen/service/zip.hpp"

using namespace trackgen;
using namespace trackgen::service;

namespace {

nlohmann::json controlled_body(const synth::SynthEpisode& ep, uint64_t seed) {
  return {{"mode", "controlled"},
          {"seed", seed},
          {"content_image", base64_encode(encode_frame_png(ep.video, 0))},
          {"tracks", tracks_to_json(ep.tracks)}};
}

synth::SynthEpisode still_episode() {
  auto world = testing::tiny_world();
  world.velocity_range = 0;
  return synth::generate_episode(world, 2);
}

/// Registry with one tiny model in <root>/tiny and a broken one in <root>/broken.
std::filesystem::path model_root() {
  const auto root = testing::scratch_dir("service_models");
  testing::write_tiny_model(root / "tiny");
  std::filesystem::create_directories(root / "broken");
  write_text_atomic(root / "broken" / "motion_vae.json", "{not json");
  return root;
}

}  // namespace

TEST_CASE("an empty registry reports no model") {
  const Service svc{ModelRegistry{}};
  const auto models = nlohmann::json::parse(svc.models().body);
  CHECK(models["models"].empty());
  const auto health = svc.health();
  CHECK(health.status == 200);
  CHECK(nlohmann::json::parse(health.body)["model_loaded"] == false);
  CHECK(svc.generate("{}", false).status == 503);
}

TEST_CASE("registry scan skips malformed model directories") {
  const auto registry = ModelRegistry::scan(model_root());
  REQUIRE(registry.entries().size() == 1);
  const auto summary = registry.entries()[0].summary();
  CHECK(summary["model_id"] == "tiny");
  CHECK(summary["n"] == testing::kFrames);
  CHECK(summary["trained_steps"] == 7);
  CHECK(ModelRegistry::scan("/nonexistent/models").entries().empty());
}

TEST_CASE("generate responses equal direct library calls") {
  const auto root = model_root();
  const Service svc(ModelRegistry::scan(root));
  const auto ep = still_episode();
  const auto body = controlled_body(ep, 11).dump();
  const auto r1 = svc.generate(body, false);
  REQUIRE(r1.status == 200);
  const auto j1 = nlohmann::json::parse(r1.body);
  CHECK(j1["frames"].size() == testing::kFrames);
  CHECK(j1["meta"]["model_id"] == "tiny");
  CHECK(j1["meta"]["seed"] == 11);
  const auto j2 = nlohmann::json::parse(svc.generate(body, false).body);
  CHECK(j1["frames"] == j2["frames"]);

  const auto pipeline = generator::Pipeline::load(root / "tiny");
  // The service decodes the content frame from 8-bit PNG.
  const auto content = image_to_frame(decode_png(encode_frame_png(ep.video, 0)));
  const auto direct = pipeline.generate({generator::GenerateMode::controlled, content, ep.tracks, 11});
  CHECK(j1["frames"].get<std::vector<std::string>>() == encode_frames(direct));

  const auto z = svc.generate(body, true);
  CHECK(z.status == 200);
  CHECK(z.content_type == "application/zip");
  CHECK(z.body.substr(0, 4) == std::string("PK\x03\x04", 4));
}

TEST_CASE("generate request errors name the field") {
  const Service svc(ModelRegistry::scan(model_root()));
  const auto ep = still_episode();
  auto body = controlled_body(ep, 1);
  body["tracks"]["num_frames"] = 10;
  for (auto& o : body["tracks"]["objects"]) o["boxes"] = nlohmann::json::array();
  for (auto& o : body["tracks"]["objects"]) {
    for (int t = 0; t < 10; ++t) o["boxes"].push_back(nullptr);
  }
  auto r = svc.generate(body.dump(), false);
  CHECK(r.status == 400);
  CHECK(r.body.find("num_frames") != std::string::npos);

  body = controlled_body(ep, 1);
  body.erase("content_image");
  r = svc.generate(body.dump(), false);
  CHECK(r.status == 400);
  CHECK(nlohmann::json::parse(r.body)["field"] == "content_image");

  body = controlled_body(ep, 1);
  body["seed"] = -3;
  CHECK(nlohmann::json::parse(svc.generate(body.dump(), false).body)["field"] == "seed");

  body = controlled_body(ep, 1);
  body["model_id"] = "missing";
  CHECK(svc.generate(body.dump(), false).status == 404);

  CHECK(svc.generate("not json", false).status == 400);
  CHECK(svc.generate(R"({"mode":"unconditional","seed":3})", false).status == 200);
}

TEST_CASE("HTTP server round trip") {
  const Service svc(ModelRegistry::scan(model_root()));
  HttpServer server(svc);
  std::promise<int> ready;
  std::thread worker([&] { server.listen("127.0.0.1", 0, [&](int port) { ready.set_value(port); }); });
  const int port = ready.get_future().get();

  httplib::Client client("127.0.0.1", port);
  const auto health = client.Get("/api/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");
  CHECK(nlohmann::json::parse(health->body)["model_loaded"] == true);

  const auto models = client.Get("/api/v1/models");
  REQUIRE(models);
  CHECK(nlohmann::json::parse(models->body)["models"].size() == 1);

  const auto body = controlled_body(still_episode(), 4).dump();
  const auto gen = client.Post("/api/v1/generate", body, "application/json");
  REQUIRE(gen);
  CHECK(gen->status == 200);
  CHECK(nlohmann::json::parse(gen->body)["frames"] == nlohmann::json::parse(svc.generate(body, false).body)["frames"]);

  const auto zip = client.Post("/api/v1/generate?format=zip", body, "application/json");
  REQUIRE(zip);
  CHECK(zip->get_header_value("Content-Type") == "application/zip");

  const auto pre = client.Options("/api/v1/generate");
  REQUIRE(pre);
  CHECK(pre->status == 204);

  server.stop();
  worker.join();
}

TEST_CASE("stored zip archives list every file") {
  const auto zip = store_zip({{"a.txt", {'h', 'i'}}, {"b.bin", {1, 2, 3}}});
  CHECK(zip.substr(0, 4) == std::string("PK\x03\x04", 4));
  CHECK(zip.find("a.txt") != std::string::npos);
  CHECK(zip.find("b.bin") != std::string::npos);
  // end of central directory: 2 entries
  const auto eocd = zip.rfind(std::string("PK\x05\x06", 4));
  REQUIRE(eocd != std::string::npos);
  CHECK(static_cast<uint8_t>(zip[eocd + 10]) == 2);
}

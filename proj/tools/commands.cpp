#include "commands.hpp"

#include <csignal>
#include <iostream>

#include "trackgen/adversarial/gan.hpp"
#include "trackgen/content/vae.hpp"
#include "trackgen/core/checkpoint.hpp"
#include "trackgen/core/dataset.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/core/fileutil.hpp"
#include "trackgen/core/io.hpp"
#include "trackgen/core/log.hpp"
#include "trackgen/core/tracks.hpp"
#include "trackgen/eval/features.hpp"
#include "trackgen/eval/metrics.hpp"
#include "trackgen/generator/generator.hpp"
#include "trackgen/generator/pipeline.hpp"
#include "trackgen/motion/vae.hpp"
#include "trackgen/preprocess/background_ae.hpp"
#include "trackgen/preprocess/prepare.hpp"
#include "trackgen/service/service.hpp"
#include "trackgen/synth/world.hpp"

namespace trackgen::cli {

namespace {

const std::vector<std::string> kSharedWorldKeys = {"frames", "height", "width", "seed"};

nlohmann::json parse_value(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    return text;
  }
}

std::vector<VideoTensor> videos_of(const std::vector<Episode>& episodes) {
  std::vector<VideoTensor> out;
  for (const auto& ep : episodes) out.push_back(ep.video);
  return out;
}

void apply_train_flags(FlatConfig& cfg, const std::string& prefix, const TrainArgs& args) {
  if (args.steps) cfg.set(prefix + ".steps", *args.steps);
  if (args.seed) cfg.set(prefix + ".seed", *args.seed);
}

/// Fills generator shape keys from the trained VAEs unless set explicitly.
void inherit_shape(FlatConfig& cfg, const motion::MotionVaeConfig& m, const content::ContentVaeConfig& c) {
  const std::vector<std::pair<std::string, int64_t>> defaults = {{"generator.frames", m.frames},
                                                                 {"generator.height", m.height},
                                                                 {"generator.width", m.width},
                                                                 {"generator.motion_dim", m.latent_dim},
                                                                 {"generator.content_dim", c.latent_dim},
                                                                 {"generator.image_channels", c.image_channels}};
  for (const auto& [k, v] : defaults) {
    if (!cfg.has(k)) cfg.set(k, v);
  }
}

std::filesystem::path find_background(const std::filesystem::path& start) {
  auto dir = std::filesystem::absolute(start);
  for (int i = 0; i <= 3; ++i) {
    if (std::filesystem::exists(dir / "background.png")) return dir / "background.png";
    if (!dir.has_parent_path() || dir.parent_path() == dir) break;
    dir = dir.parent_path();
  }
  return {};
}

service::HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

FlatConfig ConfigSource::resolve() const {
  FlatConfig cfg = file.empty() ? FlatConfig() : FlatConfig::load(file);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + o + "'");
    cfg.set(o.substr(0, eq), parse_value(o.substr(eq + 1)));
  }
  return cfg;
}

int run_synth(const SynthArgs& args) {
  const auto cfg = args.config.resolve();
  nlohmann::json world = nlohmann::json::object();
  for (const auto& [k, v] : cfg.json().items()) {
    if (k.rfind("synth.", 0) == 0) world[k.substr(6)] = v;
  }
  for (const auto& k : kSharedWorldKeys) {
    if (cfg.has(k) && !world.contains(k)) world[k] = cfg.json().at(k);
  }
  if (args.seed) world["seed"] = *args.seed;
  const auto index = synth::generate_dataset(synth::WorldConfig::from_json(world), static_cast<size_t>(args.count),
                                             args.out);
  std::cout << "wrote " << index["episodes"].size() << " episodes to " << args.out.string() << "\n";
  return 0;
}

int run_preprocess(const PreprocessArgs& args) {
  const auto cfg = args.config.resolve();
  const auto index = read_dataset_index(args.data);
  preprocess::PrepareOptions opts;
  opts.tau = cfg.get<float>("preprocess.tau", opts.tau);
  opts.kernel_size = cfg.get<int>("preprocess.kernel_size", opts.kernel_size);

  preprocess::BackgroundFn background;
  const auto ae_dir = args.data / "background_ae";
  if (!args.background.empty()) {
    background = preprocess::fixed_background(load_frame_png(args.background));
  } else if (args.train_background) {
    std::vector<VideoTensor> videos;
    for (const auto& name : index.episodes) videos.push_back(load_video(EpisodePaths{args.data / name}.frames()));
    auto ae_cfg = preprocess::BackgroundAeConfig::from_config(cfg);
    if (!videos.empty()) {
      ae_cfg.height = videos.front().height();
      ae_cfg.width = videos.front().width();
      ae_cfg.image_channels = videos.front().channels();
    }
    ensure_directory(ae_dir);
    nets::LossLog log(ae_dir / "background_ae_loss.csv", {"l1"});
    auto trained = preprocess::train_background_ae(videos, ae_cfg, &log);
    preprocess::save_background_ae(trained.model, ae_dir, ae_cfg.train.steps);
    background = preprocess::autoencoder_background(trained.model);
  } else if (std::filesystem::exists(checkpoint_meta_path(ae_dir, ModelType::background_ae))) {
    background = preprocess::autoencoder_background(preprocess::load_background_ae(ae_dir));
  } else {
    throw ValidationError("no background model in " + ae_dir.string() +
                          "; pass --train-background or --background <png>");
  }
  for (const auto& name : index.episodes) preprocess::prepare_episode(args.data / name, background, opts);
  std::cout << "prepared " << index.episodes.size() << " episodes\n";
  return 0;
}

int run_train(const TrainArgs& args) {
  auto cfg = args.config.resolve();
  ensure_directory(args.out);
  switch (args.stage) {
    case Stage::motion_vae: {
      apply_train_flags(cfg, "motion_vae", args);
      const auto episodes = load_dataset(args.data, {.motion = true}, args.limit);
      if (!episodes.empty()) {
        const auto& v = episodes.front().video;
        for (const auto& [k, val] : std::vector<std::pair<std::string, int64_t>>{
                 {"motion_vae.frames", v.frames()}, {"motion_vae.height", v.height()}, {"motion_vae.width", v.width()}}) {
          if (!cfg.has(k)) cfg.set(k, val);
        }
      }
      const auto mcfg = motion::MotionVaeConfig::from_config(cfg);
      std::vector<BinaryVideo> motions;
      for (const auto& ep : episodes) motions.push_back(*ep.motion);
      nets::LossLog log(args.out / "motion_vae_loss.csv", {"motion_weighted", "kl", "total"});
      auto result = motion::train_motion_vae(motions, mcfg, &log);
      motion::save_motion_vae(result.model, args.out, mcfg.train.steps);
      std::cout << "motion VAE reconstruction loss " << motion::motion_reconstruction_loss(result.model, motions)
                << "\n";
      return 0;
    }
    case Stage::content_vae: {
      apply_train_flags(cfg, "content_vae", args);
      auto probe = content::ContentVaeConfig::from_config(cfg);
      const bool refined = probe.mask_source == content::MaskSource::refined;
      const auto episodes = load_dataset(args.data, {.motion = !refined, .masks = refined}, args.limit);
      if (!episodes.empty()) {
        const auto& v = episodes.front().video;
        for (const auto& [k, val] : std::vector<std::pair<std::string, int64_t>>{{"content_vae.height", v.height()},
                                                                                 {"content_vae.width", v.width()},
                                                                                 {"content_vae.image_channels",
                                                                                  v.channels()}}) {
          if (!cfg.has(k)) cfg.set(k, val);
        }
      }
      const auto ccfg = content::ContentVaeConfig::from_config(cfg);
      const auto samples = content::content_samples(episodes, ccfg.mask_source);
      nets::LossLog log(args.out / "content_vae_loss.csv", {"content_weighted", "kl", "total"});
      auto result = content::train_content_vae(samples, ccfg, &log);
      content::save_content_vae(result.model, args.out, ccfg.train.steps);
      std::cout << "content VAE masked L1 " << content::content_reconstruction_loss(result.model, samples) << "\n";
      return 0;
    }
    case Stage::decoder: {
      apply_train_flags(cfg, "decoder", args);
      auto mvae = motion::load_motion_vae(args.out);
      auto cvae = content::load_content_vae(args.out);
      inherit_shape(cfg, mvae->config(), cvae->config());
      const auto gcfg = generator::GeneratorConfig::from_config(cfg);
      const auto episodes = load_dataset(args.data, {.motion = true}, args.limit);
      nets::LossLog log(args.out / "decoder_loss.csv", {"l1"});
      auto result = generator::train_decoder(episodes, mvae, cvae, gcfg, &log);
      generator::save_decoder(result.model, args.out, gcfg.train.steps);
      std::cout << "decoder L1 " << generator::decoder_loss_on(result.model, mvae, cvae, episodes) << "\n";
      return 0;
    }
    case Stage::gan: {
      apply_train_flags(cfg, "gan", args);
      const auto gan_cfg = adversarial::GanConfig::from_config(cfg);
      auto gen = generator::load_generator(args.out);
      const bool need_latents = gan_cfg.encoded_latent_ratio > 0.0;
      const auto episodes = load_dataset(args.data, {.motion = need_latents}, args.limit);
      std::optional<generator::EpisodeLatents> latents;
      if (need_latents) {
        auto mvae = motion::load_motion_vae(args.out);
        auto cvae = content::load_content_vae(args.out);
        latents = generator::encode_episodes(mvae, cvae, episodes);
      }
      nets::LossLog log(args.out / "gan_loss.csv", {"critic_loss", "gen_loss", "gp"});
      auto result = adversarial::train_gan(gen, videos_of(episodes), gan_cfg, args.out, &log, latents);
      const auto& last = result.curve.empty() ? adversarial::GanStepLosses{} : result.curve.back();
      std::cout << "GAN finished: critic " << last.critic_loss << ", generator " << last.gen_loss << ", gp "
                << last.gp << "\n";
      return 0;
    }
  }
  return 0;
}

int run_generate(const GenerateArgs& args) {
  generator::GenerateRequest req;
  req.mode = generator::generate_mode_from_string(args.mode);
  req.seed = args.seed;
  if (req.mode == generator::GenerateMode::controlled) {
    if (args.content.empty()) throw ValidationError("--content is required in controlled mode");
    if (args.tracks.empty()) throw ValidationError("--tracks is required in controlled mode");
    req.content = load_frame_png(args.content);
    req.tracks = load_tracks(args.tracks);
  }
  const auto pipeline = generator::Pipeline::load(args.model);
  const auto video = pipeline.generate(req);
  save_video(video, args.out);
  std::cout << "wrote " << video.frames() << " frames to " << args.out.string() << "\n";
  return 0;
}

int run_eval_fid(const EvalFidArgs& args) {
  const auto protocol =
      args.protocol.empty() ? eval::EvalProtocol{} : eval::EvalProtocol::from_json(read_json_file(args.protocol));
  const auto pipeline = generator::Pipeline::load(args.model);
  const auto reference = load_dataset(args.data, {}, args.limit);
  std::unique_ptr<eval::FeatureExtractor> extractor;
  if (args.features.empty()) {
    extractor = std::make_unique<eval::AeFeatureExtractor>(content::load_content_vae(args.model));
  } else {
    const auto& c = pipeline.config();
    extractor = std::make_unique<eval::ScriptedFeatureExtractor>(
        eval::ScriptedFeatureExtractor::load(args.features, c.image_channels, c.height, c.width));
  }
  const auto report = eval::evaluate_model(pipeline, reference, *extractor, protocol).to_json();
  if (!args.out.empty()) write_json_atomic(args.out, report);
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_eval_adherence(const EvalAdherenceArgs& args) {
  const auto video = load_video(args.generated);
  const auto tracks = load_tracks(args.tracks);
  auto bg_path = args.background;
  if (bg_path.empty()) bg_path = find_background(args.generated);
  if (bg_path.empty()) {
    throw ValidationError("no background.png found near " + args.generated.string() + "; pass --background");
  }
  std::cout << eval::motion_adherence(video, tracks, load_frame_png(bg_path)) << "\n";
  return 0;
}

int run_serve(const ServeArgs& args) {
  const service::Service svc(service::ModelRegistry::scan(args.models_dir));
  service::HttpServer server(svc);
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  const bool ok = server.listen(args.host, args.port, [&](int port) {
    log::info("serving " + std::to_string(svc.registry().entries().size()) + " model(s) on http://" + args.host + ":" +
              std::to_string(port));
  });
  g_server = nullptr;
  if (!ok) throw IoError("cannot bind " + args.host + ":" + std::to_string(args.port));
  return 0;
}

}  // namespace trackgen::cli

#include "trackgen/generator/generator.hpp"

#include "trackgen/core/error.hpp"
#include "trackgen/nets/abs_loss.hpp"
#include "trackgen/nets/checkpoint_io.hpp"
#include "trackgen/nets/tensor.hpp"

namespace trackgen::generator {

namespace nn = torch::nn;

namespace {

const std::string kPrefix = "generator.";
constexpr double kLogitClamp = 1e-4;

torch::Tensor latent_row(const LatentCode& code) { return torch::tensor(code.values()).unsqueeze(0); }

}  // namespace

void GeneratorConfig::validate() const {
  if (frames < 1 || height < 8 || width < 8) throw ConfigError("generator: frames >= 1 and H, W >= 8 required");
  if (image_channels != 1 && image_channels != 3) throw ConfigError("generator.image_channels must be 1 or 3");
  if (motion_dim < 1 || content_dim < 1 || noise_dim < 1) throw ConfigError("generator latent sizes must be >= 1");
  if (sr_noise_channels < 1 || sr_hidden < 1) throw ConfigError("generator SR widths must be >= 1");
  if (sr_init_std < 0.0) throw ConfigError("generator.sr_init_std must be >= 0");
  train.validate();
}

nlohmann::json GeneratorConfig::to_flat() const {
  nlohmann::json j = {{kPrefix + "frames", frames},
                      {kPrefix + "height", height},
                      {kPrefix + "width", width},
                      {kPrefix + "image_channels", image_channels},
                      {kPrefix + "motion_dim", motion_dim},
                      {kPrefix + "content_dim", content_dim},
                      {kPrefix + "noise_dim", noise_dim},
                      {kPrefix + "decoder_channels", decoder_channels},
                      {kPrefix + "sr_noise_channels", sr_noise_channels},
                      {kPrefix + "sr_hidden", sr_hidden},
                      {kPrefix + "sr_init_std", sr_init_std}};
  const auto train_json = train.to_json();
  for (const auto& [k, v] : train_json.items()) j["decoder." + k] = v;
  return j;
}

GeneratorConfig GeneratorConfig::from_config(const FlatConfig& cfg) {
  GeneratorConfig c;
  c.frames = cfg.get<int64_t>(kPrefix + "frames", cfg.get<int64_t>("frames", c.frames));
  c.height = cfg.get<int64_t>(kPrefix + "height", cfg.get<int64_t>("height", c.height));
  c.width = cfg.get<int64_t>(kPrefix + "width", cfg.get<int64_t>("width", c.width));
  c.image_channels = cfg.get<int64_t>(kPrefix + "image_channels", c.image_channels);
  c.motion_dim = cfg.get<int64_t>(kPrefix + "motion_dim", cfg.get<int64_t>("motion_vae.latent_dim", c.motion_dim));
  c.content_dim = cfg.get<int64_t>(kPrefix + "content_dim", cfg.get<int64_t>("content_vae.latent_dim", c.content_dim));
  c.noise_dim = cfg.get<int64_t>(kPrefix + "noise_dim", c.noise_dim);
  c.decoder_channels = cfg.get<std::vector<int64_t>>(kPrefix + "decoder_channels", c.decoder_channels);
  c.sr_noise_channels = cfg.get<int64_t>(kPrefix + "sr_noise_channels", c.sr_noise_channels);
  c.sr_hidden = cfg.get<int64_t>(kPrefix + "sr_hidden", c.sr_hidden);
  c.sr_init_std = cfg.get<double>(kPrefix + "sr_init_std", c.sr_init_std);
  c.train = nets::TrainOptions::from_config(cfg, "decoder", c.train);
  c.validate();
  return c;
}

void GeneratorConfig::require_compatible(const motion::MotionVaeConfig& m, const content::ContentVaeConfig& c) const {
  if (m.latent_dim != motion_dim) {
    throw ConfigError("motion VAE latent_dim " + std::to_string(m.latent_dim) + " != generator.motion_dim " +
                      std::to_string(motion_dim));
  }
  if (c.latent_dim != content_dim) {
    throw ConfigError("content VAE latent_dim " + std::to_string(c.latent_dim) + " != generator.content_dim " +
                      std::to_string(content_dim));
  }
  if (m.frames != frames || m.height != height || m.width != width) {
    throw ConfigError("motion VAE video shape does not match the generator");
  }
  if (c.height != height || c.width != width || c.image_channels != image_channels) {
    throw ConfigError("content VAE frame shape does not match the generator");
  }
}

DecoderImpl::DecoderImpl(const GeneratorConfig& cfg) : motion_dim_(cfg.motion_dim), content_dim_(cfg.content_dim) {
  net_ = register_module("net", nets::VideoDecoder(cfg.motion_dim + cfg.content_dim, cfg.image_channels,
                                                   nets::Extent3{cfg.frames, cfg.height, cfg.width},
                                                   cfg.decoder_channels));
}

torch::Tensor DecoderImpl::forward(const torch::Tensor& motion, const torch::Tensor& content) {
  if (motion.dim() != 2 || motion.size(1) != motion_dim_ || content.dim() != 2 || content.size(1) != content_dim_ ||
      motion.size(0) != content.size(0)) {
    throw DimensionError("decoder expects (B," + std::to_string(motion_dim_) + ") motion and (B," +
                         std::to_string(content_dim_) + ") content latents");
  }
  return torch::sigmoid(net_->forward(torch::cat({motion, content}, 1)));
}

SuperResImpl::SuperResImpl(const GeneratorConfig& cfg) : noise_dim_(cfg.noise_dim) {
  project_ = register_module("project", nn::Linear(cfg.noise_dim, cfg.sr_noise_channels));
  hidden_ = register_module(
      "hidden", nn::Conv3d(nn::Conv3dOptions(cfg.image_channels + cfg.sr_noise_channels, cfg.sr_hidden, 3).padding(1)));
  out_ = register_module("out", nn::Conv3d(nn::Conv3dOptions(cfg.sr_hidden, cfg.image_channels, 3).padding(1)));
  torch::NoGradGuard no_grad;
  nn::init::normal_(out_->weight, 0.0, cfg.sr_init_std);
  nn::init::zeros_(out_->bias);
}

torch::Tensor SuperResImpl::forward(const torch::Tensor& rough, const torch::Tensor& noise) {
  if (rough.dim() != 5 || noise.dim() != 2 || noise.size(1) != noise_dim_ || noise.size(0) != rough.size(0)) {
    throw DimensionError("super resolution expects (B,C,n,H,W) videos and (B," + std::to_string(noise_dim_) +
                         ") noise");
  }
  const auto tiled = project_->forward(noise)
                         .view({noise.size(0), -1, 1, 1, 1})
                         .expand({-1, -1, rough.size(2), rough.size(3), rough.size(4)});
  const auto h = torch::leaky_relu(hidden_->forward(torch::cat({rough, tiled}, 1)), 0.2);
  const auto base = torch::logit(rough.clamp(kLogitClamp, 1.0 - kLogitClamp));
  return torch::sigmoid(base + out_->forward(h));
}

GeneratorImpl::GeneratorImpl(GeneratorConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  decoder_ = register_module("decoder", Decoder(cfg_));
  sr_ = register_module("sr", SuperRes(cfg_));
}

torch::Tensor GeneratorImpl::forward(const torch::Tensor& motion, const torch::Tensor& content,
                                     const torch::Tensor& noise) {
  return sr_->forward(decoder_->forward(motion, content), noise);
}

Generator make_generator(const GeneratorConfig& cfg) {
  Generator model{nullptr};
  nets::with_seeded_init(cfg.train.seed, [&] { model = Generator(cfg); });
  return model;
}

torch::Tensor decoder_reconstruction_loss(const torch::Tensor& rough, const torch::Tensor& target) {
  if (rough.sizes() != target.sizes()) throw DimensionError("decoder loss: shapes differ");
  return nets::weighted_abs_loss(rough, target.detach());
}

double decoder_reconstruction_loss(const VideoTensor& rough, const VideoTensor& target) {
  if (rough.shape() != target.shape()) throw DimensionError("decoder loss: shapes differ");
  torch::NoGradGuard no_grad;
  return decoder_reconstruction_loss(nets::video_to_tensor(rough), nets::video_to_tensor(target)).item<double>();
}

VideoTensor decode_video(Generator& model, const LatentCode& motion, const LatentCode& content) {
  const auto& cfg = model->config();
  motion.require(LatentKind::motion, static_cast<size_t>(cfg.motion_dim));
  content.require(LatentKind::content, static_cast<size_t>(cfg.content_dim));
  torch::NoGradGuard no_grad;
  return nets::tensor_to_video(model->decoder()->forward(latent_row(motion), latent_row(content)).squeeze(0));
}

VideoTensor super_resolve(Generator& model, const VideoTensor& rough, const LatentCode& noise) {
  const auto& cfg = model->config();
  noise.require(LatentKind::noise, static_cast<size_t>(cfg.noise_dim));
  if (rough.frames() != cfg.frames || rough.height() != cfg.height || rough.width() != cfg.width ||
      rough.channels() != cfg.image_channels) {
    throw DimensionError("super_resolve: video shape does not match the generator");
  }
  torch::NoGradGuard no_grad;
  const auto out = model->super_res()->forward(nets::video_to_tensor(rough).unsqueeze(0), latent_row(noise));
  return nets::tensor_to_video(out.squeeze(0));
}

EpisodeLatents encode_episodes(motion::MotionVae& mvae, content::ContentVae& cvae,
                               const std::vector<Episode>& episodes) {
  std::vector<torch::Tensor> motions;
  std::vector<torch::Tensor> frames;
  for (const auto& ep : episodes) {
    if (!ep.motion) throw IoError("episode " + ep.name + " has no motion/ video; run `preprocess` first");
    motions.push_back(nets::binary_to_tensor(*ep.motion));
    frames.push_back(nets::frame_to_tensor(ep.video, 0));
  }
  torch::NoGradGuard no_grad;
  return {mvae->encode(torch::stack(motions)).first, cvae->encode(torch::stack(frames)).first};
}

DecoderTrainResult train_decoder(const std::vector<Episode>& episodes, motion::MotionVae& mvae,
                                 content::ContentVae& cvae, const GeneratorConfig& cfg, nets::LossLog* log) {
  cfg.validate();
  cfg.require_compatible(mvae->config(), cvae->config());
  if (episodes.empty()) throw ValidationError("train_decoder needs at least one episode");
  const auto motion_before = nets::snapshot_parameters(*mvae);
  const auto content_before = nets::snapshot_parameters(*cvae);

  const auto latents = encode_episodes(mvae, cvae, episodes);
  std::vector<VideoTensor> videos;
  for (const auto& ep : episodes) videos.push_back(ep.video);
  const auto targets = nets::videos_to_batch(videos);

  DecoderTrainResult result{make_generator(cfg), {}};
  auto decoder = result.model->decoder();
  torch::optim::Adam opt(decoder->parameters(), torch::optim::AdamOptions(cfg.train.learning_rate));
  nets::BatchSampler sampler(episodes.size(), static_cast<size_t>(cfg.train.batch_size), cfg.train.seed);
  decoder->train();
  for (long step = 1; step <= cfg.train.steps; ++step) {
    const auto idx = sampler.next();
    const auto sel = torch::tensor(std::vector<int64_t>(idx.begin(), idx.end()));
    const auto loss = decoder_reconstruction_loss(
        decoder->forward(latents.motion.index_select(0, sel), latents.content.index_select(0, sel)),
        targets.index_select(0, sel));
    const double value = loss.item<double>();
    nets::require_finite(value, "decoder loss", step);
    opt.zero_grad();
    loss.backward();
    opt.step();
    result.curve.push_back(value);
    if (log != nullptr) log->append({step, {value}});
  }
  result.model->eval();
  if (!nets::parameters_equal(motion_before, nets::snapshot_parameters(*mvae)) ||
      !nets::parameters_equal(content_before, nets::snapshot_parameters(*cvae))) {
    throw TrainingError("VAE weights changed during decoder training", cfg.train.steps);
  }
  return result;
}

double decoder_loss_on(Generator& model, motion::MotionVae& mvae, content::ContentVae& cvae,
                       const std::vector<Episode>& episodes) {
  if (episodes.empty()) return 0.0;
  const auto latents = encode_episodes(mvae, cvae, episodes);
  std::vector<VideoTensor> videos;
  for (const auto& ep : episodes) videos.push_back(ep.video);
  torch::NoGradGuard no_grad;
  return decoder_reconstruction_loss(model->decoder()->forward(latents.motion, latents.content),
                                     nets::videos_to_batch(videos))
      .item<double>();
}

void save_decoder(Generator& model, const std::filesystem::path& dir, long step) {
  CheckpointMeta meta;
  meta.model_type = ModelType::decoder;
  meta.step = step;
  meta.config = model->config().to_flat();
  nets::save_checkpoint(*model->decoder(), dir, meta);
}

void save_generator(const Generator& model, const std::filesystem::path& dir, long step) {
  CheckpointMeta meta;
  meta.model_type = ModelType::generator;
  meta.step = step;
  meta.config = model->config().to_flat();
  nets::save_checkpoint(*model, dir, meta);
}

Generator load_generator(const std::filesystem::path& dir) {
  if (std::filesystem::exists(checkpoint_meta_path(dir, ModelType::generator))) {
    const auto meta = read_checkpoint_meta(dir, ModelType::generator);
    auto model = make_generator(GeneratorConfig::from_config(FlatConfig(meta.config)));
    nets::load_checkpoint(*model, dir, ModelType::generator);
    model->eval();
    return model;
  }
  const auto meta = read_checkpoint_meta(dir, ModelType::decoder);
  auto model = make_generator(GeneratorConfig::from_config(FlatConfig(meta.config)));
  nets::load_checkpoint(*model->decoder(), dir, ModelType::decoder);
  model->eval();
  return model;
}

}  // namespace trackgen::generator

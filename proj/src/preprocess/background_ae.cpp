#include "trackgen/preprocess/background_ae.hpp"

#include "trackgen/core/error.hpp"
#include "trackgen/nets/checkpoint_io.hpp"
#include "trackgen/nets/tensor.hpp"

namespace trackgen::preprocess {

namespace {

const std::string kPrefix = "background_ae.";

/// (n, C, H, W) stack of the frames of `video`.
torch::Tensor frames_of(const VideoTensor& video) { return nets::video_to_tensor(video).permute({1, 0, 2, 3}); }

}  // namespace

void BackgroundAeConfig::validate() const {
  if (height < 8 || width < 8) throw ConfigError("background_ae: H, W >= 8 required");
  if (image_channels != 1 && image_channels != 3) throw ConfigError("background_ae.image_channels must be 1 or 3");
  if (latent_dim < 1) throw ConfigError("background_ae.latent_dim must be >= 1");
  train.validate();
}

nlohmann::json BackgroundAeConfig::to_flat() const {
  nlohmann::json j = {{kPrefix + "height", height},
                      {kPrefix + "width", width},
                      {kPrefix + "image_channels", image_channels},
                      {kPrefix + "latent_dim", latent_dim},
                      {kPrefix + "channels", channels}};
  const auto train_json = train.to_json();
  for (const auto& [k, v] : train_json.items()) j[kPrefix + k] = v;
  return j;
}

BackgroundAeConfig BackgroundAeConfig::from_config(const FlatConfig& cfg) {
  BackgroundAeConfig c;
  c.height = cfg.get<int64_t>(kPrefix + "height", cfg.get<int64_t>("height", c.height));
  c.width = cfg.get<int64_t>(kPrefix + "width", cfg.get<int64_t>("width", c.width));
  c.image_channels = cfg.get<int64_t>(kPrefix + "image_channels", c.image_channels);
  c.latent_dim = cfg.get<int64_t>(kPrefix + "latent_dim", c.latent_dim);
  c.channels = cfg.get<std::vector<int64_t>>(kPrefix + "channels", c.channels);
  c.train = nets::TrainOptions::from_config(cfg, "background_ae", c.train);
  c.validate();
  return c;
}

BackgroundAeImpl::BackgroundAeImpl(BackgroundAeConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  encoder_ = register_module(
      "encoder", nets::FrameEncoder(cfg_.image_channels, cfg_.height, cfg_.width, cfg_.channels, cfg_.latent_dim));
  decoder_ = register_module(
      "decoder", nets::FrameDecoder(cfg_.latent_dim, cfg_.image_channels, cfg_.height, cfg_.width, cfg_.channels));
}

torch::Tensor BackgroundAeImpl::forward(const torch::Tensor& frames) {
  if (frames.dim() != 4 || frames.size(1) != cfg_.image_channels || frames.size(2) != cfg_.height ||
      frames.size(3) != cfg_.width) {
    throw DimensionError("background AE expects (B," + std::to_string(cfg_.image_channels) + "," +
                         std::to_string(cfg_.height) + "," + std::to_string(cfg_.width) + ") frames");
  }
  return torch::sigmoid(decoder_->forward(encoder_->forward(frames)));
}

BackgroundAe make_background_ae(const BackgroundAeConfig& cfg) {
  BackgroundAe model{nullptr};
  nets::with_seeded_init(cfg.train.seed, [&] { model = BackgroundAe(cfg); });
  return model;
}

BackgroundTrainResult train_background_ae(const std::vector<VideoTensor>& videos, const BackgroundAeConfig& cfg,
                                          nets::LossLog* log) {
  cfg.validate();
  if (videos.empty()) throw ValidationError("train_background_ae needs at least one frame");
  std::vector<torch::Tensor> parts;
  for (const auto& v : videos) parts.push_back(frames_of(v));
  const auto data = torch::cat(parts).contiguous();

  BackgroundTrainResult result{make_background_ae(cfg), {}};
  auto& model = result.model;
  torch::optim::Adam opt(model->parameters(), torch::optim::AdamOptions(cfg.train.learning_rate));
  nets::BatchSampler sampler(static_cast<size_t>(data.size(0)), static_cast<size_t>(cfg.train.batch_size),
                             cfg.train.seed);
  model->train();
  for (long step = 1; step <= cfg.train.steps; ++step) {
    const auto idx = sampler.next();
    const auto x = data.index_select(0, torch::tensor(std::vector<int64_t>(idx.begin(), idx.end())));
    const auto loss = torch::l1_loss(model->forward(x), x);
    const double value = loss.item<double>();
    nets::require_finite(value, "background AE loss", step);
    opt.zero_grad();
    loss.backward();
    opt.step();
    result.curve.push_back(value);
    if (log != nullptr) log->append({step, {value}});
  }
  model->eval();
  return result;
}

VideoTensor reconstruct_background(BackgroundAe& model, const VideoTensor& video) {
  torch::NoGradGuard no_grad;
  const auto recon = model->forward(frames_of(video));
  return nets::tensor_to_video(recon.permute({1, 0, 2, 3}));
}

double background_l1(BackgroundAe& model, const VideoTensor& video, const VideoTensor& target) {
  torch::NoGradGuard no_grad;
  const auto recon = model->forward(frames_of(video));
  const auto ref = frames_of(target).expand_as(recon);
  return torch::l1_loss(recon, ref).item<double>();
}

BackgroundFn autoencoder_background(BackgroundAe model) {
  return [model](const VideoTensor& video) mutable { return reconstruct_background(model, video); };
}

void save_background_ae(const BackgroundAe& model, const std::filesystem::path& dir, long step) {
  CheckpointMeta meta;
  meta.model_type = ModelType::background_ae;
  meta.step = step;
  meta.config = model->config().to_flat();
  nets::save_checkpoint(*model, dir, meta);
}

BackgroundAe load_background_ae(const std::filesystem::path& dir) {
  const auto meta = read_checkpoint_meta(dir, ModelType::background_ae);
  auto model = make_background_ae(BackgroundAeConfig::from_config(FlatConfig(meta.config)));
  nets::load_checkpoint(*model, dir, ModelType::background_ae);
  model->eval();
  return model;
}

}  // namespace trackgen::preprocess

#include "trackgen/motion/vae.hpp"

#include "trackgen/core/error.hpp"
#include "trackgen/nets/checkpoint_io.hpp"
#include "trackgen/nets/tensor.hpp"

namespace trackgen::motion {

namespace {

const std::string kPrefix = "motion_vae.";

torch::Tensor stack_motion(const std::vector<BinaryVideo>& videos) {
  std::vector<torch::Tensor> items;
  items.reserve(videos.size());
  for (const auto& v : videos) items.push_back(nets::binary_to_tensor(v));
  return torch::stack(items);
}

}  // namespace

void MotionVaeConfig::validate() const {
  if (frames < 1 || height < 8 || width < 8) throw ConfigError("motion_vae: frames >= 1 and H, W >= 8 required");
  if (latent_dim < 1) throw ConfigError("motion_vae.latent_dim must be >= 1");
  if (!(loss.epsilon > 0.0)) throw ConfigError("motion_vae.epsilon must be > 0");
  if (!(loss.binarize_threshold > 0.0 && loss.binarize_threshold < 1.0)) {
    throw ConfigError("motion_vae.binarize_threshold must lie in (0,1)");
  }
  if (loss.lambda && *loss.lambda < 0.0) throw ConfigError("motion_vae.lambda must be >= 0");
  if (loss.lambda_factor < 0.0) throw ConfigError("motion_vae.lambda_factor must be >= 0");
  if (kl_weight < 0.0) throw ConfigError("motion_vae.kl_weight must be >= 0");
  train.validate();
}

nlohmann::json MotionVaeConfig::to_flat() const {
  nlohmann::json j = {{kPrefix + "frames", frames},
                      {kPrefix + "height", height},
                      {kPrefix + "width", width},
                      {kPrefix + "latent_dim", latent_dim},
                      {kPrefix + "channels", channels},
                      {kPrefix + "epsilon", loss.epsilon},
                      {kPrefix + "lambda_factor", loss.lambda_factor},
                      {kPrefix + "binarize_threshold", loss.binarize_threshold},
                      {kPrefix + "kl_weight", kl_weight}};
  if (loss.lambda) j[kPrefix + "lambda"] = *loss.lambda;
  const auto train_json = train.to_json();
  for (const auto& [k, v] : train_json.items()) j[kPrefix + k] = v;
  return j;
}

MotionVaeConfig MotionVaeConfig::from_config(const FlatConfig& cfg) {
  MotionVaeConfig c;
  c.frames = cfg.get<int64_t>(kPrefix + "frames", cfg.get<int64_t>("frames", c.frames));
  c.height = cfg.get<int64_t>(kPrefix + "height", cfg.get<int64_t>("height", c.height));
  c.width = cfg.get<int64_t>(kPrefix + "width", cfg.get<int64_t>("width", c.width));
  c.latent_dim = cfg.get<int64_t>(kPrefix + "latent_dim", c.latent_dim);
  c.channels = cfg.get<std::vector<int64_t>>(kPrefix + "channels", c.channels);
  c.loss.epsilon = cfg.get<double>(kPrefix + "epsilon", c.loss.epsilon);
  c.loss.lambda_factor = cfg.get<double>(kPrefix + "lambda_factor", c.loss.lambda_factor);
  if (cfg.has(kPrefix + "lambda")) c.loss.lambda = cfg.get<double>(kPrefix + "lambda", 0.0);
  c.loss.binarize_threshold = cfg.get<double>(kPrefix + "binarize_threshold", c.loss.binarize_threshold);
  c.kl_weight = cfg.get<double>(kPrefix + "kl_weight", c.kl_weight);
  c.train = nets::TrainOptions::from_config(cfg, "motion_vae", c.train);
  c.validate();
  return c;
}

MotionVaeImpl::MotionVaeImpl(MotionVaeConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const nets::Extent3 extent{cfg_.frames, cfg_.height, cfg_.width};
  encoder_ = register_module("encoder", nets::VideoEncoder(1, extent, cfg_.channels, 2 * cfg_.latent_dim));
  decoder_ = register_module("decoder", nets::VideoDecoder(cfg_.latent_dim, 1, extent, cfg_.channels));
}

std::pair<torch::Tensor, torch::Tensor> MotionVaeImpl::encode(const torch::Tensor& motion) {
  if (motion.dim() != 5 || motion.size(1) != 1 || motion.size(2) != cfg_.frames || motion.size(3) != cfg_.height ||
      motion.size(4) != cfg_.width) {
    throw DimensionError("motion VAE expects (B,1," + std::to_string(cfg_.frames) + "," + std::to_string(cfg_.height) +
                         "," + std::to_string(cfg_.width) + ") input");
  }
  auto h = encoder_->forward(motion);
  auto parts = h.chunk(2, 1);
  return {parts[0], parts[1]};
}

torch::Tensor MotionVaeImpl::decode(const torch::Tensor& latent) {
  if (latent.dim() != 2 || latent.size(1) != cfg_.latent_dim) {
    throw DimensionError("motion VAE expects (B," + std::to_string(cfg_.latent_dim) + ") latents");
  }
  return torch::sigmoid(decoder_->forward(latent));
}

MotionVae make_motion_vae(const MotionVaeConfig& cfg) {
  MotionVae model{nullptr};
  nets::with_seeded_init(cfg.train.seed, [&] { model = MotionVae(cfg); });
  return model;
}

std::pair<LatentCode, LatentCode> encode_motion(MotionVae& model, const BinaryVideo& motion) {
  torch::NoGradGuard no_grad;
  auto [mean, logvar] = model->encode(nets::binary_to_tensor(motion).unsqueeze(0));
  auto to_code = [](const torch::Tensor& t) {
    auto c = t.squeeze(0).contiguous();
    return LatentCode(LatentKind::motion, std::vector<float>(c.data_ptr<float>(), c.data_ptr<float>() + c.numel()));
  };
  return {to_code(mean), to_code(logvar)};
}

VideoTensor decode_motion(MotionVae& model, const LatentCode& latent) {
  latent.require(LatentKind::motion, static_cast<size_t>(model->config().latent_dim));
  torch::NoGradGuard no_grad;
  auto z = torch::tensor(latent.values()).unsqueeze(0);
  return nets::tensor_to_video(model->decode(z).squeeze(0));
}

MotionTrainResult train_motion_vae(const std::vector<BinaryVideo>& videos, const MotionVaeConfig& cfg,
                                   nets::LossLog* log) {
  cfg.validate();
  if (videos.empty()) throw ValidationError("train_motion_vae needs at least one motion video");
  MotionTrainResult result{make_motion_vae(cfg), {}};
  auto& model = result.model;
  const auto data = stack_motion(videos);
  torch::optim::Adam opt(model->parameters(), torch::optim::AdamOptions(cfg.train.learning_rate));
  nets::BatchSampler sampler(videos.size(), static_cast<size_t>(cfg.train.batch_size), cfg.train.seed);
  auto gen = nets::make_generator(cfg.train.seed + 1);
  model->train();
  for (long step = 1; step <= cfg.train.steps; ++step) {
    const auto idx = sampler.next();
    const auto x = data.index_select(0, torch::tensor(std::vector<int64_t>(idx.begin(), idx.end())));
    auto [mean, logvar] = model->encode(x);
    const auto z = cfg.kl_weight > 0.0 ? nets::reparameterize(mean, logvar, gen) : mean;
    const auto recon = model->decode(z);
    const auto mw = motion_weighted_loss(x, recon, cfg.loss);
    const auto kl = nets::kl_divergence(mean, logvar);
    const auto total = cfg.kl_weight > 0.0 ? mw + cfg.kl_weight * kl : mw;
    const std::array<double, 3> row{mw.item<double>(), kl.item<double>(), total.item<double>()};
    nets::require_finite(row[2], "motion VAE loss", step);
    opt.zero_grad();
    total.backward();
    opt.step();
    result.curve.push_back(row);
    if (log != nullptr) log->append({step, {row.begin(), row.end()}});
  }
  model->eval();
  return result;
}

double motion_reconstruction_loss(MotionVae& model, const std::vector<BinaryVideo>& videos) {
  if (videos.empty()) return 0.0;
  torch::NoGradGuard no_grad;
  const auto data = stack_motion(videos);
  auto [mean, logvar] = model->encode(data);
  return motion_weighted_loss(data, model->decode(mean), model->config().loss).item<double>();
}

void save_motion_vae(const MotionVae& model, const std::filesystem::path& dir, long step) {
  CheckpointMeta meta;
  meta.model_type = ModelType::motion_vae;
  meta.step = step;
  meta.config = model->config().to_flat();
  nets::save_checkpoint(*model, dir, meta);
}

MotionVae load_motion_vae(const std::filesystem::path& dir) {
  const auto meta = read_checkpoint_meta(dir, ModelType::motion_vae);
  auto model = make_motion_vae(MotionVaeConfig::from_config(FlatConfig(meta.config)));
  nets::load_checkpoint(*model, dir, ModelType::motion_vae);
  model->eval();
  return model;
}

}  // namespace trackgen::motion

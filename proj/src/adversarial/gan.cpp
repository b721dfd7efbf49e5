#include "trackgen/adversarial/gan.hpp"

#include <cmath>

#include "trackgen/core/error.hpp"
#include "trackgen/nets/checkpoint_io.hpp"
#include "trackgen/nets/tensor.hpp"

namespace trackgen::adversarial {

namespace {

torch::optim::AdamOptions adam(double lr, const CriticConfig& c) {
  return torch::optim::AdamOptions(lr).betas({c.beta1, c.beta2});
}

}  // namespace

void CriticConfig::validate() const {
  if (channels.empty()) throw ConfigError("critic.channels must not be empty");
  if (gp_weight < 0.0) throw ConfigError("critic.gp_weight must be >= 0");
  if (critic_steps < 1) throw ConfigError("critic.critic_steps must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("critic.learning_rate must be > 0");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) throw ConfigError("critic betas must lie in [0,1)");
}

void GanConfig::validate() const {
  critic.validate();
  train.validate();
  if (encoded_latent_ratio < 0.0 || encoded_latent_ratio > 1.0) {
    throw ConfigError("gan.encoded_latent_ratio must lie in [0,1]");
  }
}

nlohmann::json GanConfig::to_flat() const {
  nlohmann::json j = {{"critic.channels", critic.channels},
                      {"critic.gp_weight", critic.gp_weight},
                      {"critic.critic_steps", critic.critic_steps},
                      {"critic.learning_rate", critic.learning_rate},
                      {"critic.beta1", critic.beta1},
                      {"critic.beta2", critic.beta2},
                      {"gan.encoded_latent_ratio", encoded_latent_ratio}};
  const auto train_json = train.to_json();
  for (const auto& [k, v] : train_json.items()) j["gan." + k] = v;
  return j;
}

GanConfig GanConfig::from_config(const FlatConfig& cfg) {
  GanConfig c;
  c.critic.channels = cfg.get<std::vector<int64_t>>("critic.channels", c.critic.channels);
  c.critic.gp_weight = cfg.get<double>("critic.gp_weight", c.critic.gp_weight);
  c.critic.critic_steps = cfg.get<long>("critic.critic_steps", c.critic.critic_steps);
  c.critic.learning_rate = cfg.get<double>("critic.learning_rate", c.critic.learning_rate);
  c.critic.beta1 = cfg.get<double>("critic.beta1", c.critic.beta1);
  c.critic.beta2 = cfg.get<double>("critic.beta2", c.critic.beta2);
  c.encoded_latent_ratio = cfg.get<double>("gan.encoded_latent_ratio", c.encoded_latent_ratio);
  c.train = nets::TrainOptions::from_config(cfg, "gan", c.train);
  c.validate();
  return c;
}

CriticImpl::CriticImpl(const generator::GeneratorConfig& shape, const CriticConfig& cfg)
    : channels_(shape.image_channels), extent_{shape.frames, shape.height, shape.width} {
  cfg.validate();
  net_ = register_module("net", nets::VideoEncoder(channels_, extent_, cfg.channels, 1));
}

torch::Tensor CriticImpl::forward(const torch::Tensor& videos) {
  if (videos.dim() != 5 || videos.size(1) != channels_ || videos.size(2) != extent_.frames ||
      videos.size(3) != extent_.height || videos.size(4) != extent_.width) {
    throw DimensionError("critic expects (B," + std::to_string(channels_) + "," + std::to_string(extent_.frames) +
                         "," + std::to_string(extent_.height) + "," + std::to_string(extent_.width) + ") videos");
  }
  return net_->forward(videos).squeeze(1);
}

Critic make_critic(const generator::GeneratorConfig& shape, const CriticConfig& cfg, uint64_t seed) {
  Critic critic{nullptr};
  nets::with_seeded_init(seed, [&] { critic = Critic(shape, cfg); });
  return critic;
}

double critic_score(Critic& critic, const VideoTensor& video) {
  torch::NoGradGuard no_grad;
  return critic->forward(nets::video_to_tensor(video).unsqueeze(0)).item<double>();
}

torch::Tensor gradient_penalty(const CriticFn& critic, const torch::Tensor& real, const torch::Tensor& fake,
                               torch::Generator& rng) {
  if (real.sizes() != fake.sizes()) throw DimensionError("gradient_penalty: real and fake batches differ in shape");
  if (real.dim() < 1 || real.size(0) < 1) throw DimensionError("gradient_penalty needs a non-empty batch");
  std::vector<int64_t> u_shape(static_cast<size_t>(real.dim()), 1);
  u_shape[0] = real.size(0);
  const auto u = torch::rand(u_shape, rng, real.options());
  const auto x = (u * real.detach() + (1.0 - u) * fake.detach()).requires_grad_(true);
  const auto out = critic(x);
  if (!out.requires_grad()) {
    throw CapabilityError("gradient_penalty: critic output is not differentiable (no autograd graph)");
  }
  const auto grads = torch::autograd::grad({out.sum()}, {x}, {}, /*retain_graph=*/true, /*create_graph=*/true,
                                           /*allow_unused=*/true);
  const auto g = grads[0].defined() ? grads[0] : torch::zeros_like(x);
  const auto norm = g.flatten(1).norm(2, 1);
  return (norm - 1.0).pow(2).mean();
}

GanTrainer::GanTrainer(generator::Generator gen, Critic critic, torch::Tensor real, GanConfig cfg,
                       std::optional<generator::EpisodeLatents> encoded)
    : gen_(std::move(gen)),
      critic_(std::move(critic)),
      real_(std::move(real)),
      cfg_(std::move(cfg)),
      encoded_(std::move(encoded)),
      rng_(nets::make_generator(cfg_.train.seed + 7)),
      gen_opt_(gen_->parameters(), adam(cfg_.train.learning_rate, cfg_.critic)),
      critic_opt_(critic_->parameters(), adam(cfg_.critic.learning_rate, cfg_.critic)) {
  cfg_.validate();
  if (real_.dim() != 5 || real_.size(0) < 1) throw ValidationError("GAN training needs at least one real video");
  if (cfg_.encoded_latent_ratio > 0.0 && !encoded_) {
    throw ConfigError("gan.encoded_latent_ratio > 0 needs encoded dataset latents");
  }
}

torch::Tensor GanTrainer::fake_batch() {
  const auto& g = gen_->config();
  const int64_t b = cfg_.train.batch_size;
  auto motion = torch::randn({b, g.motion_dim}, rng_);
  auto content = torch::randn({b, g.content_dim}, rng_);
  const auto noise = torch::randn({b, g.noise_dim}, rng_);
  const auto k = static_cast<int64_t>(std::lround(cfg_.encoded_latent_ratio * static_cast<double>(b)));
  if (k > 0) {
    const auto idx = torch::randint(encoded_->motion.size(0), {k}, rng_);
    motion = torch::cat({encoded_->motion.index_select(0, idx), motion.slice(0, k)});
    content = torch::cat({encoded_->content.index_select(0, idx), content.slice(0, k)});
  }
  return gen_->forward(motion, content, noise);
}

std::pair<double, double> GanTrainer::critic_step() {
  const auto idx = torch::randint(real_.size(0), {cfg_.train.batch_size}, rng_);
  const auto real = real_.index_select(0, idx);
  torch::Tensor fake;
  {
    torch::NoGradGuard no_grad;
    fake = fake_batch();
  }
  auto loss = critic_->forward(fake).mean() - critic_->forward(real).mean();
  double gp_value = 0.0;
  if (cfg_.critic.gp_weight > 0.0) {
    const auto gp = gradient_penalty([this](const torch::Tensor& x) { return critic_->forward(x); }, real, fake, rng_);
    gp_value = gp.item<double>();
    loss = loss + cfg_.critic.gp_weight * gp;
  }
  const double value = loss.item<double>();
  if (!std::isfinite(value) || !std::isfinite(gp_value)) return {value, gp_value};
  critic_opt_.zero_grad();
  loss.backward();
  critic_opt_.step();
  return {value, gp_value};
}

double GanTrainer::generator_step() {
  const auto loss = -critic_->forward(fake_batch()).mean();
  const double value = loss.item<double>();
  if (!std::isfinite(value)) return value;
  gen_opt_.zero_grad();
  loss.backward();
  gen_opt_.step();
  critic_opt_.zero_grad();
  return value;
}

GanStepLosses GanTrainer::step(long index) {
  GanStepLosses out;
  for (long i = 0; i < cfg_.critic.critic_steps; ++i) {
    std::tie(out.critic_loss, out.gp) = critic_step();
    nets::require_finite(out.critic_loss, "critic loss", index);
    nets::require_finite(out.gp, "gradient penalty", index);
  }
  out.gen_loss = generator_step();
  nets::require_finite(out.gen_loss, "generator loss", index);
  return out;
}

void save_critic(const Critic& critic, const generator::GeneratorConfig& shape, const GanConfig& cfg,
                 const std::filesystem::path& dir, long step) {
  CheckpointMeta meta;
  meta.model_type = ModelType::critic;
  meta.step = step;
  meta.config = cfg.to_flat();
  const auto shape_json = shape.to_flat();
  for (const auto& [k, v] : shape_json.items()) meta.config[k] = v;
  nets::save_checkpoint(*critic, dir, meta);
}

GanTrainResult train_gan(generator::Generator gen, const std::vector<VideoTensor>& real, const GanConfig& cfg,
                         const std::filesystem::path& out_dir, nets::LossLog* log,
                         std::optional<generator::EpisodeLatents> encoded) {
  cfg.validate();
  if (real.empty()) throw ValidationError("train_gan needs at least one real video");
  auto critic = make_critic(gen->config(), cfg.critic, cfg.train.seed + 3);
  GanTrainer trainer(gen, critic, nets::videos_to_batch(real), cfg, std::move(encoded));
  GanTrainResult result{gen, critic, {}};
  gen->train();
  critic->train();
  auto checkpoint = [&](long step) {
    if (out_dir.empty()) return;
    generator::save_generator(gen, out_dir, step);
    save_critic(critic, gen->config(), cfg, out_dir, step);
  };
  for (long step = 1; step <= cfg.train.steps; ++step) {
    const auto losses = trainer.step(step);
    result.curve.push_back(losses);
    if (log != nullptr) log->append({step, {losses.critic_loss, losses.gen_loss, losses.gp}});
    if (step % cfg.train.log_every == 0 && step != cfg.train.steps) checkpoint(step);
  }
  gen->eval();
  critic->eval();
  checkpoint(cfg.train.steps);
  return result;
}

}  // namespace trackgen::adversarial

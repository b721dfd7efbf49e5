#include "trackgen/content/vae.hpp"

#include "trackgen/core/error.hpp"
#include "trackgen/nets/abs_loss.hpp"
#include "trackgen/nets/checkpoint_io.hpp"
#include "trackgen/nets/tensor.hpp"

namespace trackgen::content {

namespace {

const std::string kPrefix = "content_vae.";

std::pair<torch::Tensor, torch::Tensor> stack_samples(const std::vector<ContentSample>& samples) {
  std::vector<torch::Tensor> frames;
  std::vector<torch::Tensor> masks;
  for (const auto& s : samples) {
    if (s.frame.frames() != 1 || s.mask.frames() != 1) throw DimensionError("content samples are single frames");
    frames.push_back(nets::frame_to_tensor(s.frame));
    masks.push_back(nets::binary_to_tensor(s.mask).squeeze(1));
  }
  return {torch::stack(frames), torch::stack(masks)};
}

}  // namespace

std::string to_string(MaskSource source) { return source == MaskSource::refined ? "refined" : "motion_ref"; }

MaskSource mask_source_from_string(const std::string& name) {
  if (name == "refined") return MaskSource::refined;
  if (name == "motion_ref") return MaskSource::motion_ref;
  throw ConfigError("unknown content mask source '" + name + "' (expected refined or motion_ref)");
}

void ContentVaeConfig::validate() const {
  if (height < 8 || width < 8) throw ConfigError("content_vae: H, W >= 8 required");
  if (image_channels != 1 && image_channels != 3) throw ConfigError("content_vae.image_channels must be 1 or 3");
  if (latent_dim < 1) throw ConfigError("content_vae.latent_dim must be >= 1");
  if (kl_weight < 0.0) throw ConfigError("content_vae.kl_weight must be >= 0");
  train.validate();
}

nlohmann::json ContentVaeConfig::to_flat() const {
  nlohmann::json j = {{kPrefix + "height", height},
                      {kPrefix + "width", width},
                      {kPrefix + "image_channels", image_channels},
                      {kPrefix + "latent_dim", latent_dim},
                      {kPrefix + "channels", channels},
                      {kPrefix + "kl_weight", kl_weight},
                      {kPrefix + "mask_source", to_string(mask_source)}};
  const auto train_json = train.to_json();
  for (const auto& [k, v] : train_json.items()) j[kPrefix + k] = v;
  return j;
}

ContentVaeConfig ContentVaeConfig::from_config(const FlatConfig& cfg) {
  ContentVaeConfig c;
  c.height = cfg.get<int64_t>(kPrefix + "height", cfg.get<int64_t>("height", c.height));
  c.width = cfg.get<int64_t>(kPrefix + "width", cfg.get<int64_t>("width", c.width));
  c.image_channels = cfg.get<int64_t>(kPrefix + "image_channels", c.image_channels);
  c.latent_dim = cfg.get<int64_t>(kPrefix + "latent_dim", c.latent_dim);
  c.channels = cfg.get<std::vector<int64_t>>(kPrefix + "channels", c.channels);
  c.kl_weight = cfg.get<double>(kPrefix + "kl_weight", c.kl_weight);
  c.mask_source = mask_source_from_string(
      cfg.get<std::string>(kPrefix + "mask_source", cfg.get<std::string>("content_mask", to_string(c.mask_source))));
  c.train = nets::TrainOptions::from_config(cfg, "content_vae", c.train);
  c.validate();
  return c;
}

torch::Tensor content_weighted_loss(const torch::Tensor& frame, const torch::Tensor& recon, const torch::Tensor& mask) {
  return nets::masked_abs_loss(recon, frame, mask);
}

ContentVaeImpl::ContentVaeImpl(ContentVaeConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  encoder_ = register_module(
      "encoder", nets::FrameEncoder(cfg_.image_channels, cfg_.height, cfg_.width, cfg_.channels, 2 * cfg_.latent_dim));
  decoder_ = register_module(
      "decoder", nets::FrameDecoder(cfg_.latent_dim, cfg_.image_channels, cfg_.height, cfg_.width, cfg_.channels));
}

std::pair<torch::Tensor, torch::Tensor> ContentVaeImpl::encode(const torch::Tensor& frames) {
  if (frames.dim() != 4 || frames.size(1) != cfg_.image_channels || frames.size(2) != cfg_.height ||
      frames.size(3) != cfg_.width) {
    throw DimensionError("content VAE expects (B," + std::to_string(cfg_.image_channels) + "," +
                         std::to_string(cfg_.height) + "," + std::to_string(cfg_.width) + ") frames");
  }
  auto parts = encoder_->forward(frames).chunk(2, 1);
  return {parts[0], parts[1]};
}

torch::Tensor ContentVaeImpl::decode(const torch::Tensor& latent) {
  if (latent.dim() != 2 || latent.size(1) != cfg_.latent_dim) {
    throw DimensionError("content VAE expects (B," + std::to_string(cfg_.latent_dim) + ") latents");
  }
  return torch::sigmoid(decoder_->forward(latent));
}

ContentVae make_content_vae(const ContentVaeConfig& cfg) {
  ContentVae model{nullptr};
  nets::with_seeded_init(cfg.train.seed, [&] { model = ContentVae(cfg); });
  return model;
}

std::pair<LatentCode, LatentCode> encode_content(ContentVae& model, const VideoTensor& frame) {
  if (frame.frames() != 1) throw DimensionError("encode_content takes a single frame");
  torch::NoGradGuard no_grad;
  auto [mean, logvar] = model->encode(nets::frame_to_tensor(frame).unsqueeze(0));
  auto to_code = [](const torch::Tensor& t) {
    auto c = t.squeeze(0).contiguous();
    return LatentCode(LatentKind::content, std::vector<float>(c.data_ptr<float>(), c.data_ptr<float>() + c.numel()));
  };
  return {to_code(mean), to_code(logvar)};
}

VideoTensor decode_content(ContentVae& model, const LatentCode& latent) {
  latent.require(LatentKind::content, static_cast<size_t>(model->config().latent_dim));
  torch::NoGradGuard no_grad;
  return nets::tensor_to_frame(model->decode(torch::tensor(latent.values()).unsqueeze(0)).squeeze(0));
}

std::vector<ContentSample> content_samples(const std::vector<Episode>& episodes, MaskSource source) {
  std::vector<ContentSample> out;
  for (const auto& ep : episodes) {
    const auto& mask = source == MaskSource::refined ? ep.masks : ep.motion;
    if (!mask) {
      throw IoError("episode " + ep.name + " has no " + (source == MaskSource::refined ? "masks/" : "motion/") +
                    " video; run `preprocess` first");
    }
    out.push_back({ep.video.frame(0), mask->frame(0)});
  }
  return out;
}

ContentTrainResult train_content_vae(const std::vector<ContentSample>& samples, const ContentVaeConfig& cfg,
                                     nets::LossLog* log) {
  cfg.validate();
  if (samples.empty()) throw ValidationError("train_content_vae needs at least one frame");
  const auto [frames, masks] = stack_samples(samples);
  ContentTrainResult result{make_content_vae(cfg), {}};
  auto& model = result.model;
  torch::optim::Adam opt(model->parameters(), torch::optim::AdamOptions(cfg.train.learning_rate));
  nets::BatchSampler sampler(samples.size(), static_cast<size_t>(cfg.train.batch_size), cfg.train.seed);
  auto gen = nets::make_generator(cfg.train.seed + 1);
  model->train();
  for (long step = 1; step <= cfg.train.steps; ++step) {
    const auto idx = sampler.next();
    const auto sel = torch::tensor(std::vector<int64_t>(idx.begin(), idx.end()));
    const auto x = frames.index_select(0, sel);
    const auto m = masks.index_select(0, sel);
    auto [mean, logvar] = model->encode(x);
    const auto z = cfg.kl_weight > 0.0 ? nets::reparameterize(mean, logvar, gen) : mean;
    const auto cw = content_weighted_loss(x, model->decode(z), m);
    const auto kl = nets::kl_divergence(mean, logvar);
    const auto total = cfg.kl_weight > 0.0 ? cw + cfg.kl_weight * kl : cw;
    const std::array<double, 3> row{cw.item<double>(), kl.item<double>(), total.item<double>()};
    nets::require_finite(row[2], "content VAE loss", step);
    opt.zero_grad();
    total.backward();
    opt.step();
    result.curve.push_back(row);
    if (log != nullptr) log->append({step, {row.begin(), row.end()}});
  }
  model->eval();
  return result;
}

double content_reconstruction_loss(ContentVae& model, const std::vector<ContentSample>& samples) {
  if (samples.empty()) return 0.0;
  torch::NoGradGuard no_grad;
  const auto [frames, masks] = stack_samples(samples);
  auto [mean, logvar] = model->encode(frames);
  return content_weighted_loss(frames, model->decode(mean), masks).item<double>();
}

void save_content_vae(const ContentVae& model, const std::filesystem::path& dir, long step) {
  CheckpointMeta meta;
  meta.model_type = ModelType::content_vae;
  meta.step = step;
  meta.config = model->config().to_flat();
  nets::save_checkpoint(*model, dir, meta);
}

ContentVae load_content_vae(const std::filesystem::path& dir) {
  const auto meta = read_checkpoint_meta(dir, ModelType::content_vae);
  auto model = make_content_vae(ContentVaeConfig::from_config(FlatConfig(meta.config)));
  nets::load_checkpoint(*model, dir, ModelType::content_vae);
  model->eval();
  return model;
}

}  // namespace trackgen::content

#include "trackgen/generator/pipeline.hpp"

#include "trackgen/core/checkpoint.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/nets/blocks.hpp"
#include "trackgen/nets/tensor.hpp"
#include "trackgen/preprocess/masks.hpp"

namespace trackgen::generator {

std::string to_string(GenerateMode mode) {
  return mode == GenerateMode::controlled ? "controlled" : "unconditional";
}

GenerateMode generate_mode_from_string(const std::string& name) {
  if (name == "controlled") return GenerateMode::controlled;
  if (name == "unconditional") return GenerateMode::unconditional;
  throw ValidationError("mode must be 'controlled' or 'unconditional', got '" + name + "'");
}

Pipeline::Pipeline(motion::MotionVae mvae, content::ContentVae cvae, Generator gen, long trained_steps)
    : mvae_(std::move(mvae)), cvae_(std::move(cvae)), gen_(std::move(gen)), trained_steps_(trained_steps) {
  gen_->config().require_compatible(mvae_->config(), cvae_->config());
  mvae_->eval();
  cvae_->eval();
  gen_->eval();
}

Pipeline Pipeline::load(const std::filesystem::path& dir) {
  auto gen = load_generator(dir);
  const auto type = std::filesystem::exists(checkpoint_meta_path(dir, ModelType::generator)) ? ModelType::generator
                                                                                              : ModelType::decoder;
  const auto meta = read_checkpoint_meta(dir, type);
  return Pipeline(motion::load_motion_vae(dir), content::load_content_vae(dir), std::move(gen), meta.step);
}

VideoTensor Pipeline::generate(const GenerateRequest& request) const {
  const auto& cfg = gen_->config();
  torch::NoGradGuard no_grad;
  auto rng = nets::make_generator(request.seed);
  torch::Tensor motion;
  torch::Tensor content;
  if (request.mode == GenerateMode::controlled) {
    if (!request.content) throw ValidationError("content: a content reference frame is required in controlled mode");
    if (!request.tracks) throw ValidationError("tracks: box tracks are required in controlled mode");
    const auto& frame = *request.content;
    if (frame.frames() != 1 || frame.height() != cfg.height || frame.width() != cfg.width ||
        frame.channels() != cfg.image_channels) {
      throw DimensionError("content: expected a " + std::to_string(cfg.width) + "x" + std::to_string(cfg.height) +
                           " image with " + std::to_string(cfg.image_channels) + " channels");
    }
    const auto& tracks = *request.tracks;
    if (tracks.num_frames != cfg.frames) {
      throw ValidationError("tracks.num_frames is " + std::to_string(tracks.num_frames) + ", model generates " +
                            std::to_string(cfg.frames) + " frames");
    }
    if (tracks.width != cfg.width || tracks.height != cfg.height) {
      throw ValidationError("tracks width/height must be " + std::to_string(cfg.width) + "x" +
                            std::to_string(cfg.height));
    }
    const auto m = preprocess::rasterize_tracks(tracks, static_cast<int>(cfg.frames), static_cast<int>(cfg.height),
                                                static_cast<int>(cfg.width));
    motion = mvae_->encode(nets::binary_to_tensor(m).unsqueeze(0)).first;
    content = cvae_->encode(nets::frame_to_tensor(frame).unsqueeze(0)).first;
  } else {
    motion = torch::randn({1, cfg.motion_dim}, rng);
    content = torch::randn({1, cfg.content_dim}, rng);
  }
  const auto noise = torch::randn({1, cfg.noise_dim}, rng);
  return nets::tensor_to_video(gen_->forward(motion, content, noise).squeeze(0));
}

}  // namespace trackgen::generator

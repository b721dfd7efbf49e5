#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "trackgen/content/vae.hpp"
#include "trackgen/core/tracks.hpp"
#include "trackgen/core/video.hpp"
#include "trackgen/generator/generator.hpp"
#include "trackgen/motion/vae.hpp"

namespace trackgen::generator {

enum class GenerateMode { controlled, unconditional };

std::string to_string(GenerateMode mode);
/// Throws ValidationError for anything but "controlled" / "unconditional".
GenerateMode generate_mode_from_string(const std::string& name);

struct GenerateRequest {
  GenerateMode mode = GenerateMode::controlled;
  /// Content reference frame; required in controlled mode.
  std::optional<VideoTensor> content;
  /// Box tracks; required in controlled mode.
  std::optional<BoxTrackSet> tracks;
  uint64_t seed = 0;
};

/// Motion VAE + content VAE + generator loaded from one model directory.
///
/// Controlled mode rasterizes the tracks, encodes them and the content frame
/// (posterior means), decodes and refines with z ~ N(0, I) drawn from `seed`.
/// Unconditional mode draws the motion latent, the content latent and z from
/// N(0, I) in that order. Output depends only on the weights and the request.
class Pipeline {
 public:
  Pipeline(motion::MotionVae mvae, content::ContentVae cvae, Generator gen, long trained_steps = 0);

  /// Reads motion_vae, content_vae and decoder/generator checkpoints from `dir`.
  static Pipeline load(const std::filesystem::path& dir);

  /// Throws ValidationError for incomplete or inconsistent requests.
  VideoTensor generate(const GenerateRequest& request) const;

  const GeneratorConfig& config() const { return gen_->config(); }
  long trained_steps() const { return trained_steps_; }

 private:
  mutable motion::MotionVae mvae_;
  mutable content::ContentVae cvae_;
  mutable Generator gen_;
  long trained_steps_ = 0;
};

}  // namespace trackgen::generator

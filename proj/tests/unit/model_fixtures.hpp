#pragma once

#include <filesystem>

#include "trackgen/adversarial/gan.hpp"
#include "trackgen/content/vae.hpp"
#include "trackgen/generator/generator.hpp"
#include "trackgen/motion/vae.hpp"
#include "trackgen/synth/world.hpp"

namespace trackgen::testing {

// 4 x 16 x 16 stand-ins for the desk-scale models so tests stay fast.
inline constexpr int kFrames = 4;
inline constexpr int kSize = 16;

inline motion::MotionVaeConfig tiny_motion_config() {
  motion::MotionVaeConfig c;
  c.frames = kFrames;
  c.height = kSize;
  c.width = kSize;
  c.latent_dim = 8;
  c.channels = {4, 8};
  c.train = {20, 2, 1e-2, 3, 5};
  return c;
}

inline content::ContentVaeConfig tiny_content_config() {
  content::ContentVaeConfig c;
  c.height = kSize;
  c.width = kSize;
  c.latent_dim = 8;
  c.channels = {4, 8};
  c.train = {20, 4, 1e-2, 3, 5};
  return c;
}

inline generator::GeneratorConfig tiny_generator_config() {
  generator::GeneratorConfig c;
  c.frames = kFrames;
  c.height = kSize;
  c.width = kSize;
  c.motion_dim = 8;
  c.content_dim = 8;
  c.noise_dim = 4;
  c.decoder_channels = {4, 8};
  c.sr_hidden = 4;
  c.train = {10, 2, 1e-2, 3, 5};
  return c;
}

inline adversarial::GanConfig tiny_gan_config() {
  adversarial::GanConfig c;
  c.critic.channels = {4, 8};
  c.critic.critic_steps = 2;
  c.train = {3, 2, 1e-4, 3, 2};
  return c;
}

inline synth::WorldConfig tiny_world() {
  synth::WorldConfig w;
  w.frames = kFrames;
  w.height = kSize;
  w.width = kSize;
  w.sprite_size = 5;
  w.velocity_range = 1;
  return w;
}

/// Untrained but complete model directory: motion VAE, content VAE, generator.
inline void write_tiny_model(const std::filesystem::path& dir, uint64_t seed = 0) {
  auto m = tiny_motion_config();
  m.train.seed = seed;
  auto c = tiny_content_config();
  c.train.seed = seed;
  auto g = tiny_generator_config();
  g.train.seed = seed;
  motion::save_motion_vae(motion::make_motion_vae(m), dir, 0);
  content::save_content_vae(content::make_content_vae(c), dir, 0);
  generator::save_generator(generator::make_generator(g), dir, 7);
}

}  // namespace trackgen::testing

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trackgen/core/config.hpp"

namespace trackgen::cli {

/// Settings layered as: config file, then `--set key=value`, then dedicated flags.
struct ConfigSource {
  std::filesystem::path file;
  std::vector<std::string> overrides;

  FlatConfig resolve() const;
};

struct SynthArgs {
  ConfigSource config;
  long count = 8;
  std::filesystem::path out;
  std::optional<uint64_t> seed;
};

struct PreprocessArgs {
  ConfigSource config;
  std::filesystem::path data;
  bool train_background = false;
  std::filesystem::path background;
};

enum class Stage { motion_vae, content_vae, decoder, gan };

struct TrainArgs {
  Stage stage = Stage::motion_vae;
  ConfigSource config;
  std::filesystem::path data;
  std::filesystem::path out;
  std::optional<long> steps;
  std::optional<uint64_t> seed;
  long limit = 0;
};

struct GenerateArgs {
  std::filesystem::path model;
  std::string mode = "controlled";
  std::filesystem::path content;
  std::filesystem::path tracks;
  uint64_t seed = 0;
  std::filesystem::path out;
};

struct EvalFidArgs {
  std::filesystem::path model;
  std::filesystem::path protocol;
  std::filesystem::path data;
  std::filesystem::path features;
  std::filesystem::path out;
  long limit = 0;
};

struct EvalAdherenceArgs {
  std::filesystem::path generated;
  std::filesystem::path tracks;
  std::filesystem::path background;
};

struct ServeArgs {
  std::filesystem::path models_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
};

int run_synth(const SynthArgs& args);
int run_preprocess(const PreprocessArgs& args);
int run_train(const TrainArgs& args);
int run_generate(const GenerateArgs& args);
int run_eval_fid(const EvalFidArgs& args);
int run_eval_adherence(const EvalAdherenceArgs& args);
int run_serve(const ServeArgs& args);

}  // namespace trackgen::cli

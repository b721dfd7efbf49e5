#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "trackgen/core/config.hpp"

namespace trackgen::nets {

/// Optimizer/loop settings shared by every trainer. Config keys are
/// `<prefix>.steps`, `<prefix>.batch_size`, ...
struct TrainOptions {
  long steps = 1000;
  long batch_size = 8;
  double learning_rate = 1e-3;
  uint64_t seed = 0;
  long log_every = 50;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainOptions from_config(const FlatConfig& cfg, const std::string& prefix, TrainOptions defaults);
};

/// One logged training step.
struct LossRecord {
  long step = 0;
  std::vector<double> values;
};

/// Appends rows to a CSV with a fixed header.
class LossLog {
 public:
  LossLog() = default;
  LossLog(const std::filesystem::path& path, std::vector<std::string> columns);
  void append(const LossRecord& record);
  bool is_open() const { return out_.is_open(); }

 private:
  std::ofstream out_;
  size_t columns_ = 0;
};

/// Throws TrainingError when value is NaN/Inf.
void require_finite(double value, const std::string& what, long step);

/// Epoch-shuffled minibatch indices, deterministic in the seed.
class BatchSampler {
 public:
  BatchSampler(size_t dataset_size, size_t batch_size, uint64_t seed);
  std::vector<size_t> next();

 private:
  size_t size_;
  size_t batch_;
  std::mt19937_64 rng_;
  std::vector<size_t> order_;
  size_t cursor_ = 0;
};

/// Mean over the last `window` entries (or all, if fewer).
double trailing_mean(const std::vector<double>& values, size_t window);

}  // namespace trackgen::nets

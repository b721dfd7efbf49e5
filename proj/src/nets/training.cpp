#include "trackgen/nets/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trackgen/core/error.hpp"

namespace trackgen::nets {

void TrainOptions::validate() const {
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (log_every < 1) throw ConfigError("log_every must be >= 1");
}

nlohmann::json TrainOptions::to_json() const {
  return {{"steps", steps},
          {"batch_size", batch_size},
          {"learning_rate", learning_rate},
          {"seed", seed},
          {"log_every", log_every}};
}

TrainOptions TrainOptions::from_config(const FlatConfig& cfg, const std::string& prefix, TrainOptions d) {
  TrainOptions o;
  o.steps = cfg.get<long>(prefix + ".steps", d.steps);
  o.batch_size = cfg.get<long>(prefix + ".batch_size", d.batch_size);
  o.learning_rate = cfg.get<double>(prefix + ".learning_rate", d.learning_rate);
  o.seed = cfg.get<uint64_t>(prefix + ".seed", cfg.get<uint64_t>("seed", d.seed));
  o.log_every = cfg.get<long>(prefix + ".log_every", d.log_every);
  o.validate();
  return o;
}

LossLog::LossLog(const std::filesystem::path& path, std::vector<std::string> columns)
    : out_(path, std::ios::trunc), columns_(columns.size()) {
  if (!out_) throw IoError("cannot write loss log " + path.string());
  out_ << "step";
  for (const auto& c : columns) out_ << ',' << c;
  out_ << '\n';
}

void LossLog::append(const LossRecord& record) {
  if (!out_.is_open()) return;
  out_ << record.step;
  for (size_t i = 0; i < columns_; ++i) out_ << ',' << (i < record.values.size() ? record.values[i] : 0.0);
  out_ << '\n';
  out_.flush();
}

void require_finite(double value, const std::string& what, long step) {
  if (!std::isfinite(value)) throw TrainingError(what + " became non-finite", step);
}

BatchSampler::BatchSampler(size_t dataset_size, size_t batch_size, uint64_t seed)
    : size_(dataset_size), batch_(batch_size), rng_(seed) {
  if (size_ == 0) throw ValidationError("cannot train on an empty dataset");
  order_.resize(size_);
  std::iota(order_.begin(), order_.end(), size_t{0});
  std::shuffle(order_.begin(), order_.end(), rng_);
}

std::vector<size_t> BatchSampler::next() {
  std::vector<size_t> out;
  out.reserve(batch_);
  while (out.size() < std::min(batch_, size_)) {
    if (cursor_ == size_) {
      std::shuffle(order_.begin(), order_.end(), rng_);
      cursor_ = 0;
    }
    out.push_back(order_[cursor_++]);
  }
  return out;
}

double trailing_mean(const std::vector<double>& values, size_t window) {
  if (values.empty()) return 0.0;
  const size_t n = std::min(window, values.size());
  return std::accumulate(values.end() - static_cast<long>(n), values.end(), 0.0) / static_cast<double>(n);
}

}  // namespace trackgen::nets

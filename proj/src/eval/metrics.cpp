#include "trackgen/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "trackgen/core/error.hpp"
#include "trackgen/eval/assignment.hpp"
#include "trackgen/kernels/parallel.hpp"
#include "trackgen/synth/world.hpp"

namespace trackgen::eval {

Gaussian fit_gaussian(const Eigen::MatrixXd& samples) {
  const auto n = samples.rows();
  const auto d = samples.cols();
  if (n == 0 || d == 0) throw ValidationError("cannot fit a Gaussian to an empty feature set");
  if (n < d + 1) {
    spdlog::warn("feature set has {} samples for dimension {}; covariance is rank-deficient and relies on jitter", n,
                 d);
  }
  Gaussian g;
  g.mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - g.mean.transpose();
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  g.covariance = (centered.transpose() * centered) / denom;
  return g;
}

namespace {

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double frechet_distance(const Gaussian& a, const Gaussian& b, double jitter) {
  if (a.mean.size() != b.mean.size()) throw DimensionError("FID feature dimensions differ");
  const auto d = a.mean.size();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd sa = a.covariance + jitter * eye;
  const Eigen::MatrixXd sb = b.covariance + jitter * eye;
  const Eigen::MatrixXd root_a = symmetric_sqrt(sa);
  const Eigen::MatrixXd inner = root_a * sb * root_a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (inner + inner.transpose()), Eigen::EigenvaluesOnly);
  const double tr_cross = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double mean_term = (a.mean - b.mean).squaredNorm();
  return std::max(0.0, mean_term + sa.trace() + sb.trace() - 2.0 * tr_cross);
}

double fid(const Eigen::MatrixXd& features_a, const Eigen::MatrixXd& features_b) {
  return frechet_distance(fit_gaussian(features_a), fit_gaussian(features_b));
}

BootstrapSummary bootstrap_ci(const std::vector<double>& scores, int resamples, double level, uint64_t seed) {
  if (scores.empty()) throw ValidationError("bootstrap_ci needs at least one score");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0,1)");
  if (resamples < 100) throw ValidationError("bootstrap_ci needs at least 100 resamples");

  BootstrapSummary s;
  const auto n = static_cast<double>(scores.size());
  s.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  for (double x : scores) s.variance += (x - s.mean) * (x - s.mean);
  s.variance /= n;
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  s.best = *lo_it;
  s.worst = *hi_it;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, scores.size() - 1);
  std::vector<double> means(static_cast<size_t>(resamples));
  for (auto& m : means) {
    double acc = 0.0;
    for (size_t i = 0; i < scores.size(); ++i) acc += scores[pick(rng)];
    m = acc / n;
  }
  std::sort(means.begin(), means.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    const auto i = static_cast<size_t>(std::floor(pos));
    const size_t j = std::min(i + 1, means.size() - 1);
    return means[i] + (pos - static_cast<double>(i)) * (means[j] - means[i]);
  };
  const double tail = 0.5 * (1.0 - level);
  // A percentile interval can miss the sample mean for very skewed or very
  // narrow settings; widen it to contain the mean.
  s.lo = std::min(quantile(tail), s.mean);
  s.hi = std::max(quantile(1.0 - tail), s.mean);
  return s;
}

nlohmann::json EvalReport::to_json() const {
  return {{"scores", scores},
          {"mean", summary.mean},
          {"variance", summary.variance},
          {"best", summary.best},
          {"worst", summary.worst},
          {"ci", {summary.lo, summary.hi}},
          {"protocol", protocol}};
}

double motion_adherence(const VideoTensor& generated, const BoxTrackSet& commanded, const VideoTensor& background) {
  if (commanded.num_frames != generated.frames()) {
    throw ValidationError("commanded tracks have " + std::to_string(commanded.num_frames) + " frames, video has " +
                          std::to_string(generated.frames()));
  }
  if (background.frames() != 1 || background.height() != generated.height() ||
      background.width() != generated.width() || background.channels() != generated.channels()) {
    throw DimensionError("motion_adherence: background frame does not match the video");
  }
  const int h = static_cast<int>(generated.height());
  const int w = static_cast<int>(generated.width());
  std::vector<uint8_t> fg(static_cast<size_t>(h * w));
  double total = 0.0;
  long count = 0;
  bool any_detection = false;
  for (int t = 0; t < commanded.num_frames; ++t) {
    kernels::parallel::threshold_difference(generated.frame_data(t), background.data(), generated.channels(),
                                            synth::kDetectionThreshold, fg);
    const auto detected = synth::detect_frame(fg, h, w);
    const auto wanted = commanded.boxes_at(t);
    any_detection = any_detection || !detected.empty();
    count += static_cast<long>(wanted.size());
    if (wanted.empty() || detected.empty()) continue;
    // Square cost matrix: padding rows/columns cost 1 (IoU 0).
    const size_t k = std::max(wanted.size(), detected.size());
    std::vector<std::vector<double>> cost(k, std::vector<double>(k, 1.0));
    for (size_t i = 0; i < wanted.size(); ++i) {
      for (size_t j = 0; j < detected.size(); ++j) cost[i][j] = 1.0 - iou(wanted[i], detected[j]);
    }
    const auto match = solve_assignment(cost);
    for (size_t i = 0; i < wanted.size(); ++i) {
      const auto j = static_cast<size_t>(match[i]);
      if (j < detected.size()) total += iou(wanted[i], detected[j]);
    }
  }
  if (count == 0) return any_detection ? 0.0 : 1.0;
  return total / static_cast<double>(count);
}

}  // namespace trackgen::eval

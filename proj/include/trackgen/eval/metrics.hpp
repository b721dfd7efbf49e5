#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "trackgen/core/tracks.hpp"
#include "trackgen/core/video.hpp"

namespace trackgen::eval {

/// Mean and (unbiased) covariance of a sample set, one sample per row.
struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Throws ValidationError for an empty set. Sets with fewer than d+1 rows get
/// a warning; the jitter added by frechet_distance keeps them usable.
Gaussian fit_gaussian(const Eigen::MatrixXd& samples);

inline constexpr double kCovarianceJitter = 1e-6;

/// ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a^1/2 S_b S_a^1/2)^1/2), with
/// `jitter` added to both covariance diagonals.
double frechet_distance(const Gaussian& a, const Gaussian& b, double jitter = kCovarianceJitter);

/// Frechet distance between Gaussians fitted to two feature sets.
double fid(const Eigen::MatrixXd& features_a, const Eigen::MatrixXd& features_b);

struct BootstrapSummary {
  double mean = 0.0;
  /// Population variance of the scores.
  double variance = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double best = 0.0;
  double worst = 0.0;
};

/// Percentile bootstrap over resampled means; best/worst are min/max of the
/// raw scores (lower is better, as for FID).
BootstrapSummary bootstrap_ci(const std::vector<double>& scores, int resamples, double level, uint64_t seed);

/// Table-style evaluation report.
struct EvalReport {
  std::vector<double> scores;
  BootstrapSummary summary;
  nlohmann::json protocol = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// Mean IoU between commanded boxes and oracle detections in `generated`.
/// Each frame's commanded boxes are matched one-to-one to detected boxes by
/// maximum total IoU; unmatched commanded boxes score 0. With no commanded
/// boxes at all the score is 1 when nothing is detected and 0 otherwise.
double motion_adherence(const VideoTensor& generated, const BoxTrackSet& commanded, const VideoTensor& background);

}  // namespace trackgen::eval

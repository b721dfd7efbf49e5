#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/eval/assignment.hpp"
#include "trackgen/eval/metrics.hpp"
#include "trackgen/synth/world.hpp"

using namespace trackgen;
using namespace trackgen::eval;

namespace {

Eigen::MatrixXd gaussian_samples(std::mt19937_64& rng, int n, const Eigen::VectorXd& mean,
                                 const Eigen::VectorXd& stddev) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd out(n, mean.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < mean.size(); ++j) out(i, j) = mean(j) + stddev(j) * z(rng);
  }
  return out;
}

}  // namespace

TEST_CASE("FID of a set with itself is zero and FID is symmetric") {
  std::mt19937_64 rng(51);
  const auto a = gaussian_samples(rng, 500, Eigen::VectorXd::Zero(6), Eigen::VectorXd::Ones(6));
  const auto b = gaussian_samples(rng, 500, Eigen::VectorXd::Constant(6, 0.3), Eigen::VectorXd::Constant(6, 2.0));
  CHECK(std::abs(fid(a, a)) <= 1e-6);
  CHECK(std::abs(fid(a, b) - fid(b, a)) <= 1e-6);
  CHECK_THROWS_AS(fid(Eigen::MatrixXd(0, 6), a), ValidationError);
}

TEST_CASE("Frechet distance of known Gaussians") {
  Gaussian a{Eigen::Vector2d(0, 0), Eigen::Matrix2d::Identity()};
  Gaussian b{Eigen::Vector2d(3, 4), Eigen::Matrix2d::Identity() * 4.0};
  // 25 + 2 * (1 + 4 - 2 * 2)
  CHECK(frechet_distance(a, b, 0.0) == doctest::Approx(27.0).epsilon(1e-9));
}

TEST_CASE("sampled FID approaches the closed form") {
  std::mt19937_64 rng(52);
  const Eigen::Vector4d mu_a(0, 0, 0, 0), mu_b(2, 2, 2, 2);
  const Eigen::Vector4d sd_a(1, 1, 1, 1), sd_b(2, 2, 2, 2);
  // 16 + 4 * (1 + 4 - 2 * 2)
  const double exact = 20.0;
  const double got = fid(gaussian_samples(rng, 10000, mu_a, sd_a), gaussian_samples(rng, 10000, mu_b, sd_b));
  CHECK(std::abs(got - exact) / exact < 0.02);
}

TEST_CASE("a pure mean shift tends to the squared shift") {
  std::mt19937_64 rng(53);
  const Eigen::Vector3d shift(1.0, -0.5, 0.25);
  const auto a = gaussian_samples(rng, 20000, Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones());
  Eigen::MatrixXd b = a;
  b.rowwise() += shift.transpose();
  CHECK(fid(a, b) == doctest::Approx(shift.squaredNorm()).epsilon(1e-6));
}

TEST_CASE("bootstrap summaries") {
  const auto flat = bootstrap_ci({2.5, 2.5, 2.5}, 1000, 0.95, 1);
  CHECK(flat.mean == 2.5);
  CHECK(flat.variance == 0.0);
  CHECK(flat.lo == 2.5);
  CHECK(flat.hi == 2.5);

  const auto s = bootstrap_ci({1.0, 2.0, 3.0}, 10000, 0.95, 7);
  CHECK(s.lo <= 2.0);
  CHECK(s.hi >= 2.0);
  CHECK(s.variance == doctest::Approx(2.0 / 3.0));
  CHECK(s.best == 1.0);
  CHECK(s.worst == 3.0);
  const auto again = bootstrap_ci({1.0, 2.0, 3.0}, 10000, 0.95, 7);
  CHECK(again.lo == s.lo);
  CHECK(again.hi == s.hi);

  const auto single = bootstrap_ci({4.0}, 100, 0.9, 0);
  CHECK(single.variance == 0.0);
  CHECK(single.lo == single.hi);

  CHECK_THROWS_AS(bootstrap_ci({1.0}, 1000, 1.0, 0), ValidationError);
  CHECK_THROWS_AS(bootstrap_ci({}, 1000, 0.9, 0), ValidationError);
}

TEST_CASE("report JSON carries the table fields") {
  EvalReport r;
  r.scores = {1.0, 3.0};
  r.summary = bootstrap_ci(r.scores, 200, 0.95, 0);
  const auto j = r.to_json();
  for (const char* key : {"scores", "mean", "variance", "best", "worst", "ci", "protocol"}) CHECK(j.contains(key));
}

TEST_CASE("assignment maximizes the matched total") {
  const std::vector<std::vector<double>> cost{{-0.9, -0.8}, {-0.85, -0.1}};
  const auto a = solve_assignment(cost);
  CHECK(a == std::vector<int>{1, 0});
  const auto wide = solve_assignment({{1.0, 0.0, 5.0}});
  CHECK(wide == std::vector<int>{1});
}

TEST_CASE("motion adherence on synthetic episodes") {
  synth::WorldConfig cfg;
  cfg.sprite_size = 10;
  cfg.velocity_range = 0;
  const synth::SpriteSpec sprite{.x = 20, .y = 20, .vx = 0, .vy = 0};
  const auto ep = synth::render_episode(cfg, std::span(&sprite, 1));
  CHECK(motion_adherence(ep.video, ep.tracks, ep.background) == 1.0);

  std::vector<float> bg_frames;
  for (int t = 0; t < cfg.frames; ++t) bg_frames.insert(bg_frames.end(), ep.background.data().begin(), ep.background.data().end());
  const VideoTensor empty({cfg.frames, cfg.height, cfg.width, 3}, bg_frames);
  CHECK(motion_adherence(empty, ep.tracks, ep.background) == 0.0);

  auto shifted = ep.tracks;
  for (auto& b : shifted.objects[0].boxes) {
    b->x0 += 5;
    b->x1 += 5;
  }
  CHECK(motion_adherence(ep.video, shifted, ep.background) == doctest::Approx(50.0 / 150.0));

  const BoxTrackSet none{cfg.frames, cfg.width, cfg.height, {}};
  CHECK(motion_adherence(empty, none, ep.background) == 1.0);
  CHECK(motion_adherence(ep.video, none, ep.background) == 0.0);
}

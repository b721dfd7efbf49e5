#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "trackgen/content/loss.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/motion/weights.hpp"

using namespace trackgen;
using namespace trackgen::motion;

namespace {

double masked_sum(const BalanceWeights& w, const BinaryVideo& fg, int want) {
  double s = 0.0;
  for (size_t i = 0; i < w.matrix.values.size(); ++i) {
    if (fg.data()[i] == want) s += w.matrix.values[i];
  }
  return s;
}

}  // namespace

TEST_CASE("balance weights on the 2x2 example") {
  const BinaryVideo m(1, 2, 2, {1, 0, 0, 0});
  const auto w = compute_balance_weights(m, m, 0.0);
  CHECK(w.background == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(w.foreground == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(masked_sum(w, m, 1) == doctest::Approx(masked_sum(w, m, 0)));
}

TEST_CASE("half foreground gives uniform weights") {
  const BinaryVideo m(1, 2, 2, {1, 1, 0, 0});
  const auto w = compute_balance_weights(m, m, 0.0);
  CHECK(w.foreground == 0.5);
  CHECK(w.background == 0.5);
}

TEST_CASE("epsilon keeps weights positive on empty masks") {
  const auto z = BinaryVideo::zeros(1, 64, 64);
  const auto w = compute_balance_weights(z, z, 1.0);
  CHECK(w.background == doctest::Approx(1.0 / 8192.0));
  CHECK(w.foreground == doctest::Approx(1.0 + 1.0 / 8192.0));
  for (double v : w.matrix.values) CHECK(v == w.background);
}

TEST_CASE("the two scalar weights sum to 1 + eps/|M|") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testing::random_binary_video(rng, 3, 5, 7);
    const auto r = testing::random_binary_video(rng, 3, 5, 7, 0.5);
    const auto w = compute_balance_weights(m, r, 1.0);
    CHECK(w.foreground + w.background == doctest::Approx(1.0 + 1.0 / 105.0).epsilon(1e-14));
  }
}

TEST_CASE("balance weights reject shape mismatches") {
  CHECK_THROWS_AS(compute_balance_weights(BinaryVideo::zeros(1, 2, 2), BinaryVideo::zeros(1, 2, 3), 1.0),
                  DimensionError);
}

TEST_CASE("change weights mark XOR pixels after the first frame") {
  std::vector<uint8_t> still(3 * 4 * 4, 0);
  for (int t = 0; t < 3; ++t) still[static_cast<size_t>(t * 16 + 5)] = 1;
  const auto zero = compute_diff_weights(BinaryVideo(3, 4, 4, still), 2.0);
  for (double v : zero.values) CHECK(v == 0.0);

  std::vector<uint8_t> blink(2 * 2 * 2, 0);
  blink[3] = 1;
  const auto w = compute_diff_weights(BinaryVideo(2, 2, 2, blink), 1.5);
  for (int i = 0; i < 4; ++i) CHECK(w.values[static_cast<size_t>(i)] == 0.0);
  CHECK(w.at(1, 1, 1) == 1.5);
  CHECK(w.at(1, 0, 0) == 0.0);
}

TEST_CASE("a box moving one pixel marks the vacated and covered columns") {
  const int n = 2, h = 6, wd = 8;
  std::vector<uint8_t> d(static_cast<size_t>(n * h * wd), 0);
  for (int y = 1; y < 4; ++y) {
    for (int x = 1; x < 4; ++x) d[static_cast<size_t>(y * wd + x)] = 1;
    for (int x = 2; x < 5; ++x) d[static_cast<size_t>(h * wd + y * wd + x)] = 1;
  }
  const auto w = compute_diff_weights(BinaryVideo(n, h, wd, d), 2.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < wd; ++x) {
      const bool edge = y >= 1 && y < 4 && (x == 1 || x == 4);
      CHECK(w.at(1, y, x) == (edge ? 2.0 : 0.0));
    }
  }
}

TEST_CASE("content loss on the 2x2 example is a full-pixel mean") {
  const VideoTensor frame({1, 2, 2, 1}, {1.0f, 0.3f, 0.3f, 0.3f});
  const VideoTensor recon({1, 2, 2, 1}, {0.2f, 0.0f, 1.0f, 0.7f});
  const BinaryVideo mask(1, 2, 2, {1, 0, 0, 0});
  CHECK(std::abs(content::content_weighted_loss(frame, recon, mask) - 0.2) < 1e-9);
}

TEST_CASE("content loss ignores pixels outside the mask") {
  std::mt19937_64 rng(41);
  const VideoShape shape{1, 8, 8, 3};
  const auto frame = testing::random_video(rng, shape);
  const auto recon = testing::random_video(rng, shape);
  const auto mask = testing::random_binary_video(rng, 1, 8, 8, 0.5);
  const double base = content::content_weighted_loss(frame, recon, mask);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<float> d(recon.data().begin(), recon.data().end());
    for (int p = 0; p < 64; ++p) {
      if (mask.data()[static_cast<size_t>(p)] == 0) d[static_cast<size_t>(p * 3 + trial % 3)] = float(trial) / 20.0f;
    }
    CHECK(content::content_weighted_loss(frame, VideoTensor(shape, d), mask) == base);
  }
  CHECK_THROWS_AS(content::content_weighted_loss(frame, recon, BinaryVideo::zeros(1, 8, 7)), DimensionError);
}

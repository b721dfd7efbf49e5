#include <doctest.h>

#include <torch/torch.h>

#include <functional>

#include "trackgen/content/vae.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/generator/generator.hpp"
#include "trackgen/motion/loss.hpp"
#include "trackgen/nets/abs_loss.hpp"

using namespace trackgen;

namespace {

using LossFn = std::function<torch::Tensor(const torch::Tensor&)>;

/// Largest relative error between autograd and central differences.
double gradient_error(const LossFn& loss, torch::Tensor x, double h = 1e-6) {
  x = x.detach().clone().set_requires_grad(true);
  loss(x).backward();
  const auto analytic = x.grad().detach().flatten();
  auto flat = x.detach().clone().flatten();
  double worst = 0.0;
  const double scale = std::max(1e-12, analytic.abs().max().item<double>());
  for (int64_t i = 0; i < flat.numel(); ++i) {
    const double v = flat[i].item<double>();
    flat[i] = v + h;
    const double up = loss(flat.view(x.sizes())).item<double>();
    flat[i] = v - h;
    const double down = loss(flat.view(x.sizes())).item<double>();
    flat[i] = v;
    const double numeric = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(numeric - analytic[i].item<double>()) / scale);
  }
  return worst;
}

/// Values in (0,1) kept away from 0.5 and the binary targets so no central
/// difference crosses a kink or a binarization threshold.
torch::Tensor safe_uniform(at::IntArrayRef sizes) {
  auto u = torch::rand(sizes, torch::kFloat64);
  return torch::where(u < 0.5, 0.05 + 0.4 * u, 0.55 + 0.4 * (u - 0.5) / 0.5);
}

}  // namespace

TEST_CASE("motion weighted loss gradient matches finite differences") {
  torch::manual_seed(1);
  const auto target = (torch::rand({4, 8, 8}, torch::kFloat64) < 0.3).to(torch::kFloat64);
  const auto recon = safe_uniform({4, 8, 8});
  CHECK(gradient_error([&](const torch::Tensor& r) { return motion::motion_weighted_loss(target, r); }, recon) <
        1e-3);
}

TEST_CASE("content loss gradient matches finite differences") {
  torch::manual_seed(2);
  const auto frame = safe_uniform({4, 3, 8, 8});
  const auto mask = (torch::rand({4, 8, 8}) < 0.5).to(torch::kFloat64);
  CHECK(gradient_error([&](const torch::Tensor& r) { return content::content_weighted_loss(frame, r, mask); },
                       safe_uniform({4, 3, 8, 8})) < 1e-3);
}

TEST_CASE("decoder loss gradient matches finite differences") {
  torch::manual_seed(3);
  const auto target = safe_uniform({1, 3, 4, 8, 8});
  CHECK(gradient_error([&](const torch::Tensor& r) { return generator::decoder_reconstruction_loss(r, target); },
                       safe_uniform({1, 3, 4, 8, 8})) < 1e-3);
}

TEST_CASE("weights only scale the gradient") {
  const auto pred = torch::tensor({0.2, 0.9}, torch::kFloat64).set_requires_grad(true);
  const auto target = torch::tensor({1.0, 0.0}, torch::kFloat64);
  const auto w = torch::tensor({3.0, 0.5}, torch::kFloat64);
  nets::weighted_abs_loss(pred, target, w).backward();
  CHECK(pred.grad()[0].item<double>() == doctest::Approx(-1.5));
  CHECK(pred.grad()[1].item<double>() == doctest::Approx(0.25));
  CHECK_THROWS_AS(nets::weighted_abs_loss(pred, target, torch::ones({3}, torch::kFloat64)), DimensionError);
}

#include "trackgen/motion/weights.hpp"

#include "trackgen/core/error.hpp"
#include "trackgen/kernels/parallel.hpp"

namespace trackgen::motion {

BalanceWeights compute_balance_weights(const BinaryVideo& target, const BinaryVideo& recon, double epsilon) {
  if (target.shape() != recon.shape()) throw DimensionError("balance weights: target and recon shapes differ");
  if (epsilon < 0.0) throw ValidationError("epsilon must be >= 0");
  BalanceWeights w;
  w.matrix = {target.frames(), target.height(), target.width(), std::vector<double>(static_cast<size_t>(target.size()))};
  const auto s = kernels::parallel::balance_weights(target.data(), recon.data(), epsilon, w.matrix.values);
  w.foreground = s.foreground;
  w.background = s.background;
  return w;
}

WeightMatrix compute_diff_weights(const BinaryVideo& target, double lambda) {
  if (lambda < 0.0) throw ValidationError("lambda must be >= 0");
  WeightMatrix w{target.frames(), target.height(), target.width(), std::vector<double>(static_cast<size_t>(target.size()))};
  kernels::parallel::diff_weights({target.frames(), target.height(), target.width()}, target.data(), lambda, w.values);
  return w;
}

}  // namespace trackgen::motion

#include "trackgen/core/latent.hpp"

#include <cmath>

#include "trackgen/core/error.hpp"

namespace trackgen {

std::string to_string(LatentKind kind) {
  switch (kind) {
    case LatentKind::motion: return "motion";
    case LatentKind::content: return "content";
    case LatentKind::noise: return "noise";
  }
  return "unknown";
}

LatentCode::LatentCode(LatentKind kind, std::vector<float> values) : kind_(kind), values_(std::move(values)) {
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError(to_string(kind_) + " latent element " + std::to_string(i) + " is not finite");
    }
  }
}

LatentCode LatentCode::zeros(LatentKind kind, size_t size) { return LatentCode(kind, std::vector<float>(size, 0.0f)); }

void LatentCode::require(LatentKind kind, size_t size) const {
  if (kind_ != kind) throw DimensionError("expected a " + to_string(kind) + " latent, got " + to_string(kind_));
  if (values_.size() != size) {
    throw DimensionError(to_string(kind) + " latent has length " + std::to_string(values_.size()) + ", model expects " +
                         std::to_string(size));
  }
}

}  // namespace trackgen

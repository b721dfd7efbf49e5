#pragma once

#include <string>
#include <vector>

namespace trackgen {

enum class LatentKind { motion, content, noise };

std::string to_string(LatentKind kind);

/// Fixed-length latent vector with finite entries.
class LatentCode {
 public:
  LatentCode() = default;
  /// Throws ValidationError on NaN/Inf.
  LatentCode(LatentKind kind, std::vector<float> values);
  static LatentCode zeros(LatentKind kind, size_t size);

  LatentKind kind() const { return kind_; }
  const std::vector<float>& values() const { return values_; }
  size_t size() const { return values_.size(); }
  /// Throws DimensionError unless kind and length match.
  void require(LatentKind kind, size_t size) const;

  bool operator==(const LatentCode&) const = default;

 private:
  LatentKind kind_ = LatentKind::noise;
  std::vector<float> values_;
};

}  // namespace trackgen

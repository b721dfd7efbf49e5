#pragma once

#include <filesystem>

#include <torch/torch.h>

#include "trackgen/core/checkpoint.hpp"

namespace trackgen::nets {

/// Writes `<dir>/<type>.pt` and its JSON sidecar, each atomically. Fills in
/// config_hash, created_at and format_version.
void save_checkpoint(const torch::nn::Module& module, const std::filesystem::path& dir, CheckpointMeta meta);

/// Loads weights into an already-constructed module after checking the
/// sidecar's model_type.
CheckpointMeta load_checkpoint(torch::nn::Module& module, const std::filesystem::path& dir, ModelType type);

}  // namespace trackgen::nets

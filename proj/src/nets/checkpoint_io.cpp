#include "trackgen/nets/checkpoint_io.hpp"

#include <unistd.h>

#include "trackgen/core/error.hpp"
#include "trackgen/core/fileutil.hpp"

namespace trackgen::nets {

namespace fs = std::filesystem;

void save_checkpoint(const torch::nn::Module& module, const fs::path& dir, CheckpointMeta meta) {
  ensure_directory(dir);
  meta.config_hash = config_hash(meta.config);
  meta.created_at = utc_timestamp();
  meta.format_version = kCheckpointFormatVersion;
  const fs::path weights = checkpoint_weights_path(dir, meta.model_type);
  const fs::path tmp = weights.string() + ".tmp." + std::to_string(::getpid());
  torch::serialize::OutputArchive archive;
  module.save(archive);
  archive.save_to(tmp.string());
  std::error_code ec;
  fs::rename(tmp, weights, ec);
  if (ec) throw IoError("cannot write " + weights.string());
  write_json_atomic(checkpoint_meta_path(dir, meta.model_type), meta_to_json(meta));
}

CheckpointMeta load_checkpoint(torch::nn::Module& module, const fs::path& dir, ModelType type) {
  CheckpointMeta meta = read_checkpoint_meta(dir, type);
  const fs::path weights = checkpoint_weights_path(dir, type);
  if (!fs::exists(weights)) throw IoError("missing weights file " + weights.string());
  torch::serialize::InputArchive archive;
  try {
    archive.load_from(weights.string());
    module.load(archive);
  } catch (const c10::Error& e) {
    throw FormatError("cannot load " + weights.string() + ": " + e.what_without_backtrace());
  }
  return meta;
}

}  // namespace trackgen::nets

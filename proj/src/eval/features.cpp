#include "trackgen/eval/features.hpp"

#include "trackgen/core/error.hpp"
#include "trackgen/nets/tensor.hpp"

namespace trackgen::eval {

namespace {

constexpr int64_t kEmbedChunk = 64;

}  // namespace

Eigen::MatrixXd FeatureExtractor::frame_features(const std::vector<VideoTensor>& videos) {
  std::vector<torch::Tensor> frames;
  for (const auto& v : videos) frames.push_back(nets::video_to_tensor(v).permute({1, 0, 2, 3}));
  if (frames.empty()) return Eigen::MatrixXd(0, dim());
  const auto all = torch::cat(frames);
  torch::NoGradGuard no_grad;
  std::vector<torch::Tensor> parts;
  for (int64_t i = 0; i < all.size(0); i += kEmbedChunk) {
    parts.push_back(embed(all.slice(0, i, std::min(i + kEmbedChunk, all.size(0)))));
  }
  const auto feats = torch::cat(parts).to(torch::kDouble).contiguous();
  if (feats.dim() != 2 || feats.size(1) != dim()) throw DimensionError(name() + " returned features of the wrong size");
  Eigen::MatrixXd out(feats.size(0), feats.size(1));
  const double* p = feats.data_ptr<double>();
  for (int64_t r = 0; r < out.rows(); ++r) {
    for (int64_t c = 0; c < out.cols(); ++c) out(r, c) = p[r * out.cols() + c];
  }
  return out;
}

AeFeatureExtractor::AeFeatureExtractor(content::ContentVae model) : model_(std::move(model)) { model_->eval(); }

int64_t AeFeatureExtractor::dim() const { return model_->config().latent_dim; }

torch::Tensor AeFeatureExtractor::embed(const torch::Tensor& frames) { return model_->encode(frames).first; }

ScriptedFeatureExtractor::ScriptedFeatureExtractor(torch::jit::Module module, int64_t channels, int64_t height,
                                                   int64_t width)
    : module_(std::move(module)) {
  module_.eval();
  torch::NoGradGuard no_grad;
  const auto probe = module_.forward({torch::zeros({1, channels, height, width})}).toTensor();
  if (probe.dim() != 2 || probe.size(0) != 1) {
    throw DimensionError("feature module must map (B,C,H,W) to (B,d)");
  }
  dim_ = probe.size(1);
}

ScriptedFeatureExtractor ScriptedFeatureExtractor::load(const std::filesystem::path& path, int64_t channels,
                                                        int64_t height, int64_t width) {
  try {
    return ScriptedFeatureExtractor(torch::jit::load(path.string()), channels, height, width);
  } catch (const c10::Error& e) {
    throw IoError("cannot load feature module " + path.string() + ": " + e.what_without_backtrace());
  }
}

torch::Tensor ScriptedFeatureExtractor::embed(const torch::Tensor& frames) {
  return module_.forward({frames}).toTensor();
}

void EvalProtocol::validate() const {
  if (num_sets < 1 || videos_per_set < 1) throw ValidationError("protocol needs num_sets >= 1 and videos_per_set >= 1");
  if (resamples < 100) throw ValidationError("protocol resamples must be >= 100");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("protocol level must lie in (0,1)");
}

nlohmann::json EvalProtocol::to_json() const {
  return {{"num_sets", num_sets},   {"videos_per_set", videos_per_set},
          {"mode", generator::to_string(mode)}, {"seed", seed},
          {"resamples", resamples}, {"level", level}};
}

EvalProtocol EvalProtocol::from_json(const nlohmann::json& j) {
  EvalProtocol p;
  try {
    p.num_sets = j.value("num_sets", p.num_sets);
    p.videos_per_set = j.value("videos_per_set", p.videos_per_set);
    p.mode = generator::generate_mode_from_string(j.value("mode", generator::to_string(p.mode)));
    p.seed = j.value("seed", p.seed);
    p.resamples = j.value("resamples", p.resamples);
    p.level = j.value("level", p.level);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed protocol: ") + e.what());
  }
  p.validate();
  return p;
}

EvalReport evaluate_model(const generator::Pipeline& pipeline, const std::vector<Episode>& reference,
                          FeatureExtractor& extractor, const EvalProtocol& protocol) {
  protocol.validate();
  if (reference.empty()) throw ValidationError("evaluation needs at least one reference episode");
  std::vector<VideoTensor> ref_videos;
  for (const auto& ep : reference) ref_videos.push_back(ep.video);
  const auto ref_features = extractor.frame_features(ref_videos);

  EvalReport report;
  report.protocol = protocol.to_json();
  report.protocol["extractor"] = extractor.name();
  report.protocol["reference_videos"] = reference.size();
  for (int s = 0; s < protocol.num_sets; ++s) {
    std::vector<VideoTensor> set;
    for (int j = 0; j < protocol.videos_per_set; ++j) {
      const auto k = static_cast<size_t>(s) * static_cast<size_t>(protocol.videos_per_set) + static_cast<size_t>(j);
      generator::GenerateRequest req;
      req.mode = protocol.mode;
      req.seed = protocol.seed + k;
      if (protocol.mode == generator::GenerateMode::controlled) {
        const auto& ep = reference[k % reference.size()];
        req.content = ep.video.frame(0);
        req.tracks = ep.tracks;
      }
      set.push_back(pipeline.generate(req));
    }
    report.scores.push_back(fid(extractor.frame_features(set), ref_features));
  }
  report.summary = bootstrap_ci(report.scores, protocol.resamples, protocol.level, protocol.seed);
  return report;
}

}  // namespace trackgen::eval

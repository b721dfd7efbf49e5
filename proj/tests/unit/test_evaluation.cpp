#include <doctest.h>

#include <torch/torch.h>

#include "helpers.hpp"
#include "model_fixtures.hpp"
#include "trackgen/core/dataset.hpp"
#include "trackgen/core/error.hpp"
#include "trackgen/eval/features.hpp"
#include "trackgen/generator/pipeline.hpp"

using namespace trackgen;
using namespace trackgen::eval;

namespace {

std::vector<Episode> reference_episodes(int count) {
  std::vector<Episode> out;
  for (int i = 0; i < count; ++i) {
    const auto ep = synth::generate_episode(testing::tiny_world(), static_cast<uint64_t>(100 + i));
    Episode e;
    e.video = ep.video;
    e.tracks = ep.tracks;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

TEST_CASE("AE features give one row per frame") {
  AeFeatureExtractor extractor(content::make_content_vae(testing::tiny_content_config()));
  CHECK(extractor.dim() == 8);
  const auto eps = reference_episodes(2);
  const auto f = extractor.frame_features({eps[0].video, eps[1].video});
  CHECK(f.rows() == 2 * testing::kFrames);
  CHECK(f.cols() == 8);
}

TEST_CASE("scripted extractors report unreadable files") {
  CHECK_THROWS_AS(ScriptedFeatureExtractor::load("/nonexistent/model.pt", 3, 16, 16), IoError);
}

TEST_CASE("evaluation protocol round-trips and validates") {
  EvalProtocol p;
  p.num_sets = 2;
  p.mode = generator::GenerateMode::controlled;
  const auto back = EvalProtocol::from_json(p.to_json());
  CHECK(back.num_sets == 2);
  CHECK(back.mode == generator::GenerateMode::controlled);
  CHECK_THROWS_AS(EvalProtocol::from_json({{"num_sets", 0}}), ValidationError);
  CHECK_THROWS_AS(EvalProtocol::from_json({{"level", 1.0}}), ValidationError);
  CHECK_THROWS_AS(EvalProtocol::from_json({{"num_sets", "five"}}), FormatError);
}

TEST_CASE("evaluate_model reports one score per set") {
  const auto dir = testing::scratch_dir("eval_model");
  testing::write_tiny_model(dir);
  const auto pipeline = generator::Pipeline::load(dir);
  AeFeatureExtractor extractor(content::load_content_vae(dir));
  const auto reference = reference_episodes(4);

  EvalProtocol p;
  p.num_sets = 3;
  p.videos_per_set = 2;
  p.resamples = 200;
  const auto report = evaluate_model(pipeline, reference, extractor, p);
  CHECK(report.scores.size() == 3);
  CHECK(report.summary.lo <= report.summary.mean);
  CHECK(report.summary.mean <= report.summary.hi);
  CHECK(report.protocol["extractor"] == "trained_ae_features");
  const auto again = evaluate_model(pipeline, reference, extractor, p);
  CHECK(again.scores == report.scores);

  p.num_sets = 1;
  p.mode = generator::GenerateMode::controlled;
  const auto one = evaluate_model(pipeline, reference, extractor, p);
  CHECK(one.summary.variance == 0.0);
  CHECK(one.summary.lo == one.summary.hi);
}

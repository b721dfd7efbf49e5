#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "trackgen/core/error.hpp"

namespace {

using namespace trackgen;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int report(bool json_errors, const char* kind, const std::string& message, int code) {
  if (json_errors) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
  } else {
    std::cerr << "error: " << message << "\n";
  }
  return code;
}

void add_config_flags(CLI::App* cmd, cli::ConfigSource& src) {
  cmd->add_option("--config", src.file, "Flat key/value JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", src.overrides, "Override one config key: key=value (value parsed as JSON when possible)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trackgen: controllable sprite-video generation from box tracks"};
  app.require_subcommand(1);
  bool json_errors = false;
  app.add_flag("--json-errors", json_errors, "Print errors as one JSON object on stderr");

  cli::SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic sprite-world dataset");
  add_config_flags(synth_cmd, synth.config);
  synth_cmd->add_option("--count", synth.count, "Number of episodes")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--out", synth.out, "Output dataset directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "World seed (overrides config)");

  cli::PreprocessArgs prep;
  auto* prep_cmd = app.add_subcommand("preprocess", "Write motion/ and masks/ for every episode of a dataset");
  add_config_flags(prep_cmd, prep.config);
  prep_cmd->add_option("--data", prep.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  prep_cmd->add_flag("--train-background", prep.train_background,
                     "Train the background autoencoder on the dataset first (saved to <data>/background_ae)");
  prep_cmd->add_option("--background", prep.background,
                       "Use this clean background PNG instead of the background autoencoder")
      ->check(CLI::ExistingFile);

  cli::TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train one model stage");
  train_cmd->require_subcommand(1);
  const std::vector<std::pair<std::string, cli::Stage>> stages = {{"motion-vae", cli::Stage::motion_vae},
                                                                  {"content-vae", cli::Stage::content_vae},
                                                                  {"decoder", cli::Stage::decoder},
                                                                  {"gan", cli::Stage::gan}};
  for (const auto& [name, stage] : stages) {
    auto* cmd = train_cmd->add_subcommand(name, "Train the " + name + " stage");
    add_config_flags(cmd, train.config);
    cmd->add_option("--data", train.data, "Preprocessed dataset directory")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--out", train.out, "Model directory (checkpoints and loss CSV)")->required();
    cmd->add_option("--steps", train.steps, "Training steps (overrides config)");
    cmd->add_option("--seed", train.seed, "Training seed (overrides config)");
    cmd->add_option("--limit", train.limit, "Use only the first N episodes (0 = all)");
    cmd->callback([&train, stage = stage] { train.stage = stage; });
  }

  cli::GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Generate a video");
  gen_cmd->add_option("--model", gen.model, "Model directory")->required()->check(CLI::ExistingDirectory);
  gen_cmd->add_option("--mode", gen.mode, "controlled or unconditional")
      ->check(CLI::IsMember({"controlled", "unconditional"}));
  gen_cmd->add_option("--content", gen.content, "Content reference PNG (controlled mode)");
  gen_cmd->add_option("--tracks", gen.tracks, "tracks.json (controlled mode)");
  gen_cmd->add_option("--seed", gen.seed, "Sampling seed");
  gen_cmd->add_option("--out", gen.out, "Output directory for PNG frames")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate generated videos");
  eval_cmd->require_subcommand(1);
  cli::EvalFidArgs fid;
  auto* fid_cmd = eval_cmd->add_subcommand("fid", "Set-based FID with bootstrap confidence interval");
  fid_cmd->add_option("--model", fid.model, "Model directory")->required()->check(CLI::ExistingDirectory);
  fid_cmd->add_option("--protocol", fid.protocol, "Protocol JSON {num_sets, videos_per_set, mode, seed, ...}")
      ->check(CLI::ExistingFile);
  fid_cmd->add_option("--data", fid.data, "Reference dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  fid_cmd->add_option("--features", fid.features,
                      "TorchScript feature module; default uses the model's content encoder")
      ->check(CLI::ExistingFile);
  fid_cmd->add_option("--out", fid.out, "Also write the report JSON here");
  fid_cmd->add_option("--limit", fid.limit, "Use only the first N reference episodes (0 = all)");
  cli::EvalAdherenceArgs adh;
  auto* adh_cmd = eval_cmd->add_subcommand("adherence", "Mean IoU between commanded tracks and detected objects");
  adh_cmd->add_option("--generated", adh.generated, "Directory of generated PNG frames")
      ->required()
      ->check(CLI::ExistingDirectory);
  adh_cmd->add_option("--tracks", adh.tracks, "Commanded tracks.json")->required()->check(CLI::ExistingFile);
  adh_cmd->add_option("--background", adh.background,
                      "Clean background PNG (default: background.png up to three directories above --generated)")
      ->check(CLI::ExistingFile);

  cli::ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP generation service");
  serve_cmd->add_option("--models-dir", serve.models_dir, "Directory of model directories")->required();
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(json_errors, "usage", e.what(), kExitValidation);
  }

  try {
    if (synth_cmd->parsed()) return cli::run_synth(synth);
    if (prep_cmd->parsed()) return cli::run_preprocess(prep);
    if (train_cmd->parsed()) return cli::run_train(train);
    if (gen_cmd->parsed()) return cli::run_generate(gen);
    if (fid_cmd->parsed()) return cli::run_eval_fid(fid);
    if (adh_cmd->parsed()) return cli::run_eval_adherence(adh);
    if (serve_cmd->parsed()) return cli::run_serve(serve);
  } catch (const ValidationError& e) {
    return report(json_errors, e.kind(), e.what(), kExitValidation);
  } catch (const Error& e) {
    return report(json_errors, e.kind(), e.what(), kExitRuntime);
  } catch (const std::exception& e) {
    return report(json_errors, "error", e.what(), kExitRuntime);
  }
  return 0;
}

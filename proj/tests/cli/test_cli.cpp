#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "trackgen_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result run(const std::string& args) {
  const auto dir = work_dir();
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = "cd '" + dir.string() + "' && '" TRACKGEN_CLI "' " + args + " >'" + out.string() +
                          "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

size_t count_pngs(const fs::path& dir) {
  size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".png" && fs::file_size(e.path()) > 0) ++n;
  }
  return n;
}

// Short training run shared by the end-to-end cases.
const fs::path& trained_world() {
  static const fs::path root = [] {
    const std::string steps =
        " --set background_ae.steps=20 --set motion_vae.steps=3 --set content_vae.steps=3"
        " --set decoder.steps=3 --set gan.steps=2";
    REQUIRE(run("synth --count 8 --out data --seed 3").code == 0);
    REQUIRE(run("preprocess --data data --train-background" + steps).code == 0);
    for (const char* stage : {"motion-vae", "content-vae", "decoder", "gan"}) {
      const auto r = run(std::string("train ") + stage + " --data data --out model" + steps);
      INFO(r.err);
      REQUIRE(r.code == 0);
    }
    return work_dir();
  }();
  return root;
}

}  // namespace

TEST_CASE("every subcommand documents its flags") {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
      {"synth", {"--count", "--out", "--seed", "--config", "--set"}},
      {"preprocess", {"--data", "--train-background", "--background", "--config", "--set"}},
      {"train motion-vae", {"--data", "--out", "--steps", "--seed", "--limit", "--config", "--set"}},
      {"train content-vae", {"--data", "--out", "--steps", "--seed", "--limit"}},
      {"train decoder", {"--data", "--out", "--steps", "--seed", "--limit"}},
      {"train gan", {"--data", "--out", "--steps", "--seed", "--limit"}},
      {"generate", {"--model", "--mode", "--content", "--tracks", "--seed", "--out"}},
      {"eval fid", {"--model", "--protocol", "--data", "--features", "--out", "--limit"}},
      {"eval adherence", {"--generated", "--tracks", "--background"}},
      {"serve", {"--models-dir", "--host", "--port"}},
  };
  for (const auto& [cmd, flags] : cases) {
    const auto r = run(cmd + " --help");
    INFO(cmd);
    CHECK(r.code == 0);
    for (const auto& flag : flags) {
      INFO(flag);
      CHECK(r.out.find(flag) != std::string::npos);
    }
  }
  const auto top = run("--help");
  CHECK(top.code == 0);
  CHECK(top.out.find("--json-errors") != std::string::npos);
}

TEST_CASE("usage and validation errors exit with 1") {
  CHECK(run("").code == 1);
  CHECK(run("synth").code == 1);
  CHECK(run("no-such-command").code == 1);

  fs::create_directories(work_dir() / "empty_model");
  const auto r = run("generate --model empty_model --mode controlled --out g");
  CHECK(r.code == 1);
  CHECK(r.err.find("--content") != std::string::npos);
}

TEST_CASE("runtime errors exit with 2 and can be reported as JSON") {
  fs::create_directories(work_dir() / "empty_model");
  const auto plain = run("generate --model empty_model --mode unconditional --out g");
  CHECK(plain.code == 2);
  CHECK(plain.err.rfind("error: ", 0) == 0);

  const auto json = run("--json-errors generate --model empty_model --mode unconditional --out g");
  CHECK(json.code == 2);
  const auto parsed = nlohmann::json::parse(json.err);
  CHECK(parsed.at("exit_code") == 2);
  CHECK(parsed.contains("error"));
  CHECK(parsed.contains("message"));
}

TEST_CASE("validation errors as JSON name the missing input") {
  fs::create_directories(work_dir() / "empty_model");
  const auto r = run("--json-errors generate --model empty_model --mode controlled --content x.png --out g");
  CHECK(r.code == 1);
  const auto parsed = nlohmann::json::parse(r.err);
  CHECK(parsed.at("exit_code") == 1);
  CHECK(parsed.at("message").get<std::string>().find("--tracks") != std::string::npos);
}

TEST_CASE("synth, preprocess, train and generate run end to end") {
  const auto& root = trained_world();
  CHECK(fs::exists(root / "data/ep_0000/tracks.json"));
  CHECK(fs::exists(root / "data/background.png"));
  for (const char* csv : {"motion_vae_loss.csv", "content_vae_loss.csv", "decoder_loss.csv", "gan_loss.csv"}) {
    INFO(csv);
    CHECK(fs::exists(root / "model" / csv));
  }

  REQUIRE(run("generate --model model --mode unconditional --seed 1 --out uncond").code == 0);
  CHECK(count_pngs(root / "uncond") > 0);

  const auto r = run(
      "generate --model model --mode controlled --content data/ep_0000/frames/0000.png"
      " --tracks data/ep_0001/tracks.json --seed 2 --out controlled");
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(count_pngs(root / "controlled") == count_pngs(root / "uncond"));
}

TEST_CASE("adherence of a ground-truth episode is 1") {
  trained_world();
  const auto r = run("eval adherence --generated data/ep_0002/frames --tracks data/ep_0002/tracks.json");
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(1.0));
}

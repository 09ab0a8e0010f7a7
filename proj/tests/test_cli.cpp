#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "dynsc/dataset.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::string kCli = DYNSC_CLI_PATH;

int run(const std::string& args, const std::string& log = "/dev/null") {
  std::string cmd = kCli + " " + args + " > " + log + " 2>&1";
  return std::system(cmd.c_str());
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dynsc-cli-test-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

json load_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  int n = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

TEST_CASE("generate / answer / eval round-trip through the CLI") {
  TempDir tmp;
  fs::path ds = tmp.path / "ds";
  REQUIRE(run("generate -o " + ds.string() + " -n 4 --seed 77") == 0);

  // layout: scenes/, questions.jsonl, manifest.json
  CHECK(fs::exists(ds / "questions.jsonl"));
  json manifest = load_json(ds / "manifest.json");
  CHECK(manifest.contains("files"));
  CHECK(manifest.contains("seed"));
  int n_scenes = 0;
  for (const auto& e : fs::directory_iterator(ds / "scenes")) {
    CHECK(e.path().extension() == ".json");
    json scene = load_json(e.path());
    CHECK(scene.contains("trajectories"));
    CHECK(scene.contains("counterfactuals"));
    ++n_scenes;
  }
  CHECK(n_scenes == 4);
  // every emitted file is listed with its content hash
  for (const auto& [name, h] : manifest["files"].items()) {
    CHECK(fs::exists(ds / name));
    CHECK(h.get<std::string>().size() == 64);
  }

  fs::path answers = tmp.path / "answers.jsonl";
  REQUIRE(run("answer -d " + ds.string() + " --states gt -o " +
              answers.string()) == 0);
  CHECK(count_lines(answers) == count_lines(ds / "questions.jsonl"));

  fs::path eval_log = tmp.path / "eval.txt";
  REQUIRE(run("eval -d " + ds.string() + " -a " + answers.string(),
              eval_log.string()) == 0);
  std::ifstream in(eval_log);
  std::stringstream ss;
  ss << in.rdbuf();
  json report = json::parse(ss.str().substr(0, ss.str().find("\n}") + 2));
  CHECK(report["overall"]["accuracy"] == 1.0);

  // ground-truth answering must be perfect: --min-overall gates the exit code
  CHECK(run("eval -d " + ds.string() + " -a " + answers.string() +
            " --min-overall 1.0") == 0);
}

TEST_CASE("estimate produces consumable estimates and a manifest") {
  TempDir tmp;
  fs::path ds = tmp.path / "ds";
  REQUIRE(run("generate -o " + ds.string() + " -n 2 --seed 5") == 0);
  fs::path est = tmp.path / "est";
  REQUIRE(run("estimate -d " + ds.string() + " -o " + est.string() +
              " --noise-seed 3") == 0);
  CHECK(fs::exists(est / "manifest.json"));
  CHECK(fs::exists(est / "diagnostics.jsonl"));
  int n = 0;
  for (const auto& e : fs::directory_iterator(est / "estimates")) {
    json est_file = load_json(e.path());
    CHECK(est_file["scene"].contains("trajectories"));
    ++n;
  }
  CHECK(n == 2);

  fs::path answers = tmp.path / "answers-est.jsonl";
  REQUIRE(run("answer -d " + ds.string() + " --states estimated --estimates " +
              est.string() + " -o " + answers.string()) == 0);
  CHECK(count_lines(answers) == count_lines(ds / "questions.jsonl"));
}

TEST_CASE("resimulate replays a recorded counterfactual") {
  TempDir tmp;
  fs::path ds = tmp.path / "ds";
  REQUIRE(run("generate -o " + ds.string() + " -n 1 --seed 12") == 0);
  fs::path scene_path;
  for (const auto& e : fs::directory_iterator(ds / "scenes"))
    scene_path = e.path();
  json scene = load_json(scene_path);
  REQUIRE(!scene["counterfactuals"].empty());
  const auto& cf = scene["counterfactuals"][0];

  fs::path out = tmp.path / "resim.json";
  REQUIRE(run("resimulate -d " + ds.string() + " -s " +
                  scene["scene_id"].get<std::string>() + " --object " +
                  std::to_string(cf["object_id"].get<int>()) + " --property " +
                  cf["property"].get<std::string>() + " --value " +
                  cf["value"].get<std::string>(),
              out.string()) == 0);
  json resim = load_json(out);
  CHECK(resim["counterfactual_events"] == cf["events"]);
  CHECK(resim.contains("base_events"));
  CHECK(resim.contains("max_position_divergence"));
  CHECK(resim.contains("first_divergent_frame"));
}

TEST_CASE("parse subcommand converts question text to programs") {
  TempDir tmp;
  fs::path ds = tmp.path / "ds";
  REQUIRE(run("generate -o " + ds.string() + " -n 1 --seed 3") == 0);
  fs::path out = tmp.path / "parsed.jsonl";
  REQUIRE(run("parse --strict -i " + (ds / "questions.jsonl").string(),
              out.string()) == 0);
  CHECK(count_lines(out) == count_lines(ds / "questions.jsonl"));

  // off-template text fails with a nonzero exit under --strict
  fs::path bad = tmp.path / "bad.jsonl";
  std::ofstream(bad) << R"({"text": "how heavy is the moon?"})" << "\n";
  CHECK(run("parse --strict -i " + bad.string()) != 0);
}

TEST_CASE("usage errors exit nonzero") {
  CHECK(run("generate") != 0);        // missing required -o
  CHECK(run("frobnicate") != 0);      // unknown subcommand
  CHECK(run("answer -d /nonexistent -o /tmp/x.jsonl") != 0);
}

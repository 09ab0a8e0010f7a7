#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dynsc/dataset.hpp"
#include "dynsc/error.hpp"
#include "dynsc/parser.hpp"

using namespace dynsc;

namespace {

int run(int argc, char** argv) {
  CLI::App app{"Desk-scale 4D physics VQA dataset tool"};
  app.require_subcommand(1);

  // ---- generate ----
  GenerateOptions gen;
  auto* cmd_gen = app.add_subcommand("generate", "Generate scenes + questions");
  cmd_gen->add_option("-o,--out", gen.out_dir, "Output directory")->required();
  cmd_gen->add_option("--preset", gen.preset, "desk (100 scenes) or full (1200)");
  cmd_gen->add_option("-n,--scenes", gen.n_scenes, "Override scene count");
  cmd_gen->add_option("--seed", gen.seed, "Base seed");
  cmd_gen->add_option("--factual", gen.mix.factual, "Factual questions/scene");
  cmd_gen->add_option("--predictive", gen.mix.predictive,
                      "Predictive questions/scene");
  cmd_gen->add_option("--counterfactual", gen.mix.counterfactual,
                      "Counterfactual questions/scene");
  cmd_gen->add_option("--workers", gen.workers, "Worker threads (env DYNSC_WORKERS)");

  // ---- estimate ----
  EstimateOptions est;
  auto* cmd_est = app.add_subcommand("estimate", "Track scenes from noisy observations");
  cmd_est->add_option("-d,--dataset", est.dataset_dir, "Dataset directory")->required();
  cmd_est->add_option("-o,--out", est.out_dir, "Output directory")->required();
  cmd_est->add_option("--sigma-obs", est.noise.sigma_obs, "Observation noise (m)");
  cmd_est->add_option("--sigma-rot", est.noise.sigma_rot, "Yaw noise (rad)");
  cmd_est->add_option("--dropout", est.noise.p_drop, "Per object-frame dropout");
  cmd_est->add_option("--noise-seed", est.noise.seed, "Noise seed");
  cmd_est->add_option("--sigma-prior-sq", est.est.sigma_prior_sq,
                      "Physics prior variance (m^2)");
  cmd_est->add_flag("--no-physics-prior", [&](std::int64_t) { est.physics_prior = false; },
                    "Observation-only baseline");
  cmd_est->add_option("--workers", est.workers, "Worker threads");

  // ---- answer ----
  AnswerOptions ans;
  auto* cmd_ans = app.add_subcommand("answer", "Execute question programs");
  cmd_ans->add_option("-d,--dataset", ans.dataset_dir, "Dataset directory")->required();
  cmd_ans->add_option("-o,--out", ans.out_path, "answers.jsonl path")->required();
  cmd_ans->add_option("--states", ans.states, "gt | estimated");
  cmd_ans->add_option("--estimates", ans.estimates_dir,
                      "Estimates directory (for --states estimated)");
  cmd_ans->add_option("--parser", ans.parser, "stored | nl");
  cmd_ans->add_option("--workers", ans.workers, "Worker threads");

  // ---- eval ----
  std::string eval_answers, eval_dataset;
  double min_overall = -1.0;
  auto* cmd_ev = app.add_subcommand("eval", "Score answers against ground truth");
  cmd_ev->add_option("-a,--answers", eval_answers, "answers.jsonl")->required();
  cmd_ev->add_option("-d,--dataset", eval_dataset, "Dataset directory")->required();
  cmd_ev->add_option("--min-overall", min_overall,
                     "CI threshold on overall accuracy (exit 1 below)");

  // ---- resimulate ----
  ResimulateOptions rs;
  auto* cmd_rs = app.add_subcommand("resimulate", "Counterfactual replay of one scene");
  cmd_rs->add_option("-d,--dataset", rs.dataset_dir, "Dataset directory")->required();
  cmd_rs->add_option("-s,--scene", rs.scene_id, "Scene id")->required();
  cmd_rs->add_option("--object", rs.object_id, "Object id")->required();
  cmd_rs->add_option("--property", rs.property,
                     "velocity_state | accelerating | floating")->required();
  cmd_rs->add_option("--value", rs.value, "New value")->required();

  // ---- parse ----
  std::string parse_in;
  bool parse_strict = false;
  auto* cmd_parse = app.add_subcommand("parse", "Parse question text JSONL to programs");
  cmd_parse->add_option("-i,--in", parse_in, "JSONL of {text} (default stdin)");
  cmd_parse->add_flag("--strict", parse_strict, "Nonzero exit on any parse failure");

  CLI11_PARSE(app, argc, argv);

  if (cmd_gen->parsed()) {
    json manifest = cmd_generate(gen);
    std::cout << manifest.dump(2) << std::endl;
    return 0;
  }
  if (cmd_est->parsed()) {
    json manifest = cmd_estimate(est);
    std::cout << manifest.dump(2) << std::endl;
    return 0;
  }
  if (cmd_ans->parsed()) {
    json summary = cmd_answer(ans);
    std::cout << summary.dump(2) << std::endl;
    return 0;
  }
  if (cmd_ev->parsed()) {
    EvalReport report = cmd_eval(eval_answers, eval_dataset);
    std::cout << eval_report_to_json(report).dump(2) << "\n"
              << eval_report_table(report);
    if (min_overall >= 0 && report.overall.accuracy() < min_overall) {
      std::cerr << "overall accuracy below threshold " << min_overall << "\n";
      return 1;
    }
    return 0;
  }
  if (cmd_rs->parsed()) {
    std::cout << cmd_resimulate(rs).dump(2) << std::endl;
    return 0;
  }
  if (cmd_parse->parsed()) {
    std::istream* in = &std::cin;
    std::ifstream file;
    if (!parse_in.empty()) {
      file.open(parse_in);
      if (!file) throw Error(ErrorKind::io_error, "cannot read " + parse_in);
      in = &file;
    }
    Parser parser;
    std::string line;
    bool any_failed = false;
    while (std::getline(*in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      json out;
      out["text"] = j.at("text");
      try {
        out["program"] = program_to_json(parser.parse(j.at("text").get<std::string>()));
      } catch (const Error& e) {
        out["error"] = std::string(e.what());
        any_failed = true;
      }
      std::cout << out.dump() << "\n";
    }
    return parse_strict && any_failed ? 1 : 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return e.kind() == ErrorKind::usage_error ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "dynsc/estimator.hpp"
#include "dynsc/generator.hpp"
#include "dynsc/json_io.hpp"
#include "dynsc/questions.hpp"

namespace dynsc {

// DYNSC_WORKERS env when requested == 0; always >= 1.
int worker_count(int requested = 0);

// Static chunking over [0, n); rethrows the lowest-index exception so
// failures are deterministic regardless of scheduling.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

struct GenerateOptions {
  std::string out_dir;
  std::string preset = "desk";  // desk: 100 scenes; full: 1000/100/100 split
  int n_scenes = 0;             // 0 = preset default
  std::uint64_t seed = 0;
  QuestionMix mix;
  int n_counterfactuals = 2;
  int workers = 0;
};

// Writes scenes/, questions.jsonl and manifest.json; returns the manifest.
json cmd_generate(const GenerateOptions& opts);

struct EstimateOptions {
  std::string dataset_dir;
  std::string out_dir;
  NoiseModel noise;
  EstimatorConfig est;
  bool physics_prior = true;  // false: observation-only baseline
  int workers = 0;
};

// Writes estimates/<scene>.json + diagnostics.jsonl + manifest.json.
json cmd_estimate(const EstimateOptions& opts);

struct AnswerOptions {
  std::string dataset_dir;
  std::string estimates_dir;      // required for states == "estimated"
  std::string states = "gt";      // gt | estimated
  std::string parser = "stored";  // stored | nl (grammar parse of the text)
  std::string out_path;
  int workers = 0;
};

// Writes one {question_id, predicted, error} line per question.
json cmd_answer(const AnswerOptions& opts);

struct TypeAccuracy {
  int total = 0;
  int correct = 0;
  double accuracy() const { return total ? double(correct) / total : 1.0; }
};

struct EvalReport {
  TypeAccuracy overall;
  TypeAccuracy factual, predictive, counterfactual;
  // factual sub-types, Table-1 style columns
  TypeAccuracy velocity, acceleration, collision, attribute;
  int wrong_answer = 0;
  int unique_violation = 0;
  int unanswerable = 0;
  int parse_failure = 0;
  int internal_error = 0;
};

EvalReport cmd_eval(const std::string& answers_path,
                    const std::string& dataset_dir);
json eval_report_to_json(const EvalReport& r);
std::string eval_report_table(const EvalReport& r);

struct ResimulateOptions {
  std::string dataset_dir;
  std::string scene_id;
  int object_id = 0;
  std::string property;  // velocity_state | accelerating | floating
  std::string value;
};

// Base vs counterfactual event lists plus a per-frame divergence summary.
json cmd_resimulate(const ResimulateOptions& opts);

// git describe of the build, or "untracked".
std::string build_version();

}  // namespace dynsc

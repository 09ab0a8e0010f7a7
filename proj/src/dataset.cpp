#include "dynsc/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "dynsc/error.hpp"
#include "dynsc/executor.hpp"
#include "dynsc/parser.hpp"
#include "dynsc/rng.hpp"
#include "dynsc/sha256.hpp"

namespace fs = std::filesystem;

namespace dynsc {

std::string build_version() {
#ifdef DYNSC_GIT_DESCRIBE
  return DYNSC_GIT_DESCRIBE;
#else
  return "untracked";
#endif
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DYNSC_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::min(worker_count(workers), std::max(n, 1));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::optional<std::pair<int, std::exception_ptr>> first_error;
  auto work = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(err_mutex);
        if (!first_error || i < first_error->first)
          first_error = {i, std::current_exception()};
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error->second);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::io_error, "short write to " + path);
}

namespace {

std::string scene_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene-%06d", index);
  return buf;
}

// Sorted scene ids from the dataset manifest.
std::vector<std::string> dataset_scene_ids(const std::string& dir) {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir + "/scenes"))
    ids.push_back(entry.path().stem().string());
  std::sort(ids.begin(), ids.end());
  if (ids.empty())
    throw Error(ErrorKind::io_error, "no scenes under " + dir);
  return ids;
}

SceneAnnotation load_annotation(const std::string& path) {
  return annotation_from_json(json::parse(read_file(path)));
}

json event_list_json(const std::vector<CollisionEvent>& events) {
  json j = json::array();
  for (const auto& e : events) j.push_back(to_json(e));
  return j;
}

}  // namespace

json cmd_generate(const GenerateOptions& opts) {
  if (opts.preset != "desk" && opts.preset != "full")
    throw Error(ErrorKind::usage_error, "unknown preset: " + opts.preset);
  int n = opts.n_scenes > 0 ? opts.n_scenes : (opts.preset == "desk" ? 100 : 1200);

  GeneratorConfig gen;
  std::vector<std::string> scene_files(n);
  std::vector<std::vector<Question>> per_scene(n);
  parallel_for(n, opts.workers, [&](int i) {
    std::uint64_t seed_i = Rng::derive(opts.seed, static_cast<std::uint64_t>(i));
    SceneAnnotation ann;
    try {
      ann = generate_annotation(gen, scene_name(i), seed_i,
                                opts.n_counterfactuals);
      per_scene[i] = generate_questions(ann, opts.mix, seed_i);
    } catch (const Error& e) {
      throw Error(e.kind(), scene_name(i) + " (seed " +
                                std::to_string(seed_i) + "): " + e.what());
    }
    scene_files[i] = to_json(ann).dump(2) + "\n";
  });

  std::vector<Question> questions;
  for (auto& qs : per_scene)
    for (auto& q : qs) questions.push_back(std::move(q));
  questions = balance_answers(std::move(questions), Rng::derive(opts.seed, 0xba7a));

  std::map<std::string, std::string> hashes;
  for (int i = 0; i < n; ++i) {
    std::string rel = "scenes/" + scene_name(i) + ".json";
    write_file(opts.out_dir + "/" + rel, scene_files[i]);
    hashes[rel] = sha256_hex(scene_files[i]);
  }
  std::ostringstream qout;
  int n_factual = 0, n_predictive = 0, n_counterfactual = 0;
  for (const auto& q : questions) {
    qout << question_to_json(q).dump() << "\n";
    if (q.type == QuestionType::factual) ++n_factual;
    if (q.type == QuestionType::predictive) ++n_predictive;
    if (q.type == QuestionType::counterfactual) ++n_counterfactual;
  }
  write_file(opts.out_dir + "/questions.jsonl", qout.str());
  hashes["questions.jsonl"] = sha256_hex(qout.str());

  json manifest;
  manifest["tool_version"] = build_version();
  manifest["preset"] = opts.preset;
  manifest["seed"] = opts.seed;
  manifest["n_scenes"] = n;
  manifest["mix"] = {{"factual", opts.mix.factual},
                     {"predictive", opts.mix.predictive},
                     {"counterfactual", opts.mix.counterfactual}};
  manifest["question_counts"] = {{"factual", n_factual},
                                 {"predictive", n_predictive},
                                 {"counterfactual", n_counterfactual}};
  if (opts.preset == "full" && n == 1200)
    manifest["splits"] = {{"train", {0, 1000}},
                          {"val", {1000, 1100}},
                          {"test", {1100, 1200}}};
  manifest["generator"] = {{"min_objects", gen.min_objects},
                           {"max_objects", gen.max_objects},
                           {"arena_half", gen.arena_half},
                           {"plane_z", {gen.plane_z_min, gen.plane_z_max}},
                           {"orientation_noise_deg", gen.orientation_noise_deg},
                           {"initial_speeds",
                            {gen.initial_speeds[0], gen.initial_speeds[1],
                             gen.initial_speeds[2]}}};
  manifest["files"] = json::object();
  for (const auto& [path, hash] : hashes) manifest["files"][path] = hash;
  write_file(opts.out_dir + "/manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

json cmd_estimate(const EstimateOptions& opts) {
  auto ids = dataset_scene_ids(opts.dataset_dir);
  int n = static_cast<int>(ids.size());

  EstimatorConfig est = opts.est;
  if (!opts.physics_prior) {  // obs-only baseline: no prior, no refit
    est.sigma_prior_sq = 1e12;
    est.physics_refine = false;
  }

  std::vector<std::string> est_files(n);
  std::vector<json> diag_lines(n);
  parallel_for(n, opts.workers, [&](int i) {
    SceneAnnotation ann =
        load_annotation(opts.dataset_dir + "/scenes/" + ids[i] + ".json");
    NoiseModel noise = opts.noise;
    noise.seed = Rng::derive(opts.noise.seed, static_cast<std::uint64_t>(i));
    json diag;
    diag["scene_id"] = ids[i];
    try {
      ObservationSequence obs = synthesize_observations(ann, noise);
      EstimatedScene tracked = track_scene(obs, est);
      TrackDiagnostics td = evaluate_track(tracked, ann);
      diag["position_rmse"] = td.position_rmse;
      diag["collision_precision"] = td.collision_precision;
      diag["collision_recall"] = td.collision_recall;
      diag["collision_f1"] = td.collision_f1;
      json out;
      out["scene"] = to_json(tracked.annotation);
      out["diagnostics"] = diag;
      est_files[i] = out.dump(2) + "\n";
    } catch (const Error& e) {
      // per-scene tracking failures are recorded, the run continues
      diag["error"] = std::string(e.what());
    }
    diag_lines[i] = std::move(diag);
  });

  std::map<std::string, std::string> hashes;
  std::ostringstream dout;
  double rmse_sum = 0, f1_sum = 0;
  int ok = 0;
  for (int i = 0; i < n; ++i) {
    if (!est_files[i].empty()) {
      std::string rel = "estimates/" + ids[i] + ".json";
      write_file(opts.out_dir + "/" + rel, est_files[i]);
      hashes[rel] = sha256_hex(est_files[i]);
      rmse_sum += diag_lines[i]["position_rmse"].get<double>();
      f1_sum += diag_lines[i]["collision_f1"].get<double>();
      ++ok;
    }
    dout << diag_lines[i].dump() << "\n";
  }
  write_file(opts.out_dir + "/diagnostics.jsonl", dout.str());
  hashes["diagnostics.jsonl"] = sha256_hex(dout.str());

  json manifest;
  manifest["tool_version"] = build_version();
  // content-addressed so byte-identical runs from different directories
  // produce byte-identical manifests
  manifest["dataset_manifest_sha256"] =
      sha256_hex(read_file(opts.dataset_dir + "/manifest.json"));
  manifest["noise"] = {{"sigma_obs", opts.noise.sigma_obs},
                       {"sigma_rot", opts.noise.sigma_rot},
                       {"p_drop", opts.noise.p_drop},
                       {"seed", opts.noise.seed}};
  manifest["estimator"] = {{"sigma_prior_sq", est.sigma_prior_sq},
                           {"sigma_obs_sq", est.sigma_obs_sq},
                           {"window", est.window},
                           {"physics_prior", opts.physics_prior}};
  manifest["scenes_tracked"] = ok;
  manifest["scenes_failed"] = n - ok;
  manifest["mean_position_rmse"] = ok ? rmse_sum / ok : 0.0;
  manifest["mean_collision_f1"] = ok ? f1_sum / ok : 0.0;
  manifest["files"] = json::object();
  for (const auto& [path, hash] : hashes) manifest["files"][path] = hash;
  write_file(opts.out_dir + "/manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

namespace {

std::string error_class(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::unanswerable: return "unanswerable";
    case ErrorKind::unique_violation: return "unique-violation";
    case ErrorKind::parse_error: return "parse-failure";
    default: return "internal";
  }
}

std::vector<Question> load_questions(const std::string& dataset_dir) {
  std::istringstream in(read_file(dataset_dir + "/questions.jsonl"));
  std::vector<Question> questions;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    questions.push_back(question_from_json(json::parse(line)));
  }
  return questions;
}

}  // namespace

json cmd_answer(const AnswerOptions& opts) {
  if (opts.states != "gt" && opts.states != "estimated")
    throw Error(ErrorKind::usage_error, "states must be gt or estimated");
  if (opts.parser != "stored" && opts.parser != "nl")
    throw Error(ErrorKind::usage_error, "parser must be stored or nl");
  if (opts.states == "estimated" && opts.estimates_dir.empty())
    throw Error(ErrorKind::usage_error, "--estimates required for estimated states");

  std::vector<Question> questions = load_questions(opts.dataset_dir);

  // group question indices per scene so each worker builds contexts once
  std::map<std::string, std::vector<size_t>> by_scene;
  for (size_t i = 0; i < questions.size(); ++i)
    by_scene[questions[i].scene_id].push_back(i);
  std::vector<std::pair<std::string, std::vector<size_t>>> groups(
      by_scene.begin(), by_scene.end());

  Parser parser;
  std::vector<json> lines(questions.size());
  parallel_for(static_cast<int>(groups.size()), opts.workers, [&](int g) {
    const auto& [scene_id, idxs] = groups[g];
    SceneAnnotation ann;
    if (opts.states == "gt") {
      ann = load_annotation(opts.dataset_dir + "/scenes/" + scene_id + ".json");
    } else {
      json est = json::parse(
          read_file(opts.estimates_dir + "/estimates/" + scene_id + ".json"));
      ann = annotation_from_json(est.at("scene"));
    }
    std::map<int, ExecContext> contexts;  // horizon -> context
    for (size_t qi : idxs) {
      const Question& q = questions[qi];
      json line;
      line["question_id"] = q.question_id;
      line["scene_id"] = q.scene_id;
      try {
        auto it = contexts.find(q.observed_frames);
        if (it == contexts.end())
          it = contexts
                   .emplace(q.observed_frames,
                            opts.states == "gt"
                                ? ExecContext::from_ground_truth(
                                      ann, q.observed_frames)
                                : ExecContext::from_estimated(
                                      ann, q.observed_frames))
                   .first;
        Program program =
            opts.parser == "stored" ? q.program : parser.parse(q.text);
        line["predicted"] = execute(program, it->second).answer;
        line["error"] = "ok";
      } catch (const Error& e) {
        line["predicted"] = "";
        line["error"] = error_class(e);
        line["error_detail"] = std::string(e.what());
      }
      lines[qi] = std::move(line);
    }
  });

  std::ostringstream out;
  for (const auto& l : lines) out << l.dump() << "\n";
  write_file(opts.out_path, out.str());

  json summary;
  summary["tool_version"] = build_version();
  summary["states"] = opts.states;
  summary["parser"] = opts.parser;
  summary["n_questions"] = questions.size();
  summary["sha256"] = sha256_hex(out.str());
  return summary;
}

namespace {

// Table-1 style factual sub-type from the template id.
std::string factual_subtype(const std::string& template_id) {
  if (template_id.find("velocity") != std::string::npos ||
      template_id.find("static") != std::string::npos ||
      template_id.find("direction") != std::string::npos ||
      template_id.find("faster") != std::string::npos ||
      template_id.find("slower") != std::string::npos)
    return "velocity";
  if (template_id.find("accelerating") != std::string::npos ||
      template_id.find("floating") != std::string::npos)
    return "acceleration";
  if (template_id.find("collision") != std::string::npos ||
      template_id.find("partner") != std::string::npos)
    return "collision";
  return "attribute";
}

}  // namespace

EvalReport cmd_eval(const std::string& answers_path,
                    const std::string& dataset_dir) {
  std::vector<Question> questions = load_questions(dataset_dir);
  std::map<std::string, const Question*> by_id;
  for (const auto& q : questions) by_id[q.question_id] = &q;

  EvalReport r;
  std::istringstream in(read_file(answers_path));
  std::string line;
  int seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    auto it = by_id.find(j.at("question_id").get<std::string>());
    if (it == by_id.end())
      throw Error(ErrorKind::io_error,
                  "answer for unknown question " +
                      j.at("question_id").get<std::string>());
    const Question& q = *it->second;
    ++seen;
    std::string err = j.at("error").get<std::string>();
    bool correct = err == "ok" && j.at("predicted").get<std::string>() == q.answer;
    auto count = [&](TypeAccuracy& acc) {
      ++acc.total;
      if (correct) ++acc.correct;
    };
    count(r.overall);
    switch (q.type) {
      case QuestionType::factual: count(r.factual); break;
      case QuestionType::predictive: count(r.predictive); break;
      case QuestionType::counterfactual: count(r.counterfactual); break;
    }
    if (q.type == QuestionType::factual) {
      std::string sub = factual_subtype(q.template_id);
      if (sub == "velocity") count(r.velocity);
      else if (sub == "acceleration") count(r.acceleration);
      else if (sub == "collision") count(r.collision);
      else count(r.attribute);
    }
    if (err == "ok" && !correct) ++r.wrong_answer;
    else if (err == "unique-violation") ++r.unique_violation;
    else if (err == "unanswerable") ++r.unanswerable;
    else if (err == "parse-failure") ++r.parse_failure;
    else if (err != "ok") ++r.internal_error;
  }
  if (seen != static_cast<int>(questions.size()))
    throw Error(ErrorKind::io_error, "answers cover " + std::to_string(seen) +
                                         " of " +
                                         std::to_string(questions.size()) +
                                         " questions");
  return r;
}

json eval_report_to_json(const EvalReport& r) {
  auto acc = [](const TypeAccuracy& a) {
    return json{{"total", a.total}, {"correct", a.correct},
                {"accuracy", a.accuracy()}};
  };
  json j;
  j["overall"] = acc(r.overall);
  j["per_type"] = {{"factual", acc(r.factual)},
                   {"predictive", acc(r.predictive)},
                   {"counterfactual", acc(r.counterfactual)}};
  j["factual_subtypes"] = {{"velocity", acc(r.velocity)},
                           {"acceleration", acc(r.acceleration)},
                           {"collision", acc(r.collision)},
                           {"attribute", acc(r.attribute)}};
  j["errors"] = {{"wrong-answer", r.wrong_answer},
                 {"unique-violation", r.unique_violation},
                 {"unanswerable", r.unanswerable},
                 {"parse-failure", r.parse_failure},
                 {"internal", r.internal_error}};
  return j;
}

std::string eval_report_table(const EvalReport& r) {
  std::ostringstream out;
  auto row = [&](const std::string& name, const TypeAccuracy& a) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  %-16s %6d/%-6d  %6.2f%%\n", name.c_str(),
                  a.correct, a.total, 100.0 * a.accuracy());
    out << buf;
  };
  out << "overall\n";
  row("all", r.overall);
  out << "per type\n";
  row("factual", r.factual);
  row("predictive", r.predictive);
  row("counterfactual", r.counterfactual);
  out << "factual sub-types\n";
  row("velocity", r.velocity);
  row("acceleration", r.acceleration);
  row("collision", r.collision);
  row("attribute", r.attribute);
  out << "errors: wrong-answer=" << r.wrong_answer
      << " unique-violation=" << r.unique_violation
      << " unanswerable=" << r.unanswerable
      << " parse-failure=" << r.parse_failure
      << " internal=" << r.internal_error << "\n";
  return out.str();
}

json cmd_resimulate(const ResimulateOptions& opts) {
  SceneAnnotation ann = load_annotation(opts.dataset_dir + "/scenes/" +
                                        opts.scene_id + ".json");
  WorldState base = initial_world(ann);
  WorldState modified =
      apply_modification(base, opts.object_id, opts.property, opts.value);
  SimResult cf = simulate(modified, ann.config);

  auto contains = [](const std::vector<CollisionEvent>& events,
                     const CollisionEvent& e) {
    return std::find(events.begin(), events.end(), e) != events.end();
  };
  std::vector<CollisionEvent> only_base, only_cf;
  for (const auto& e : ann.collisions)
    if (!contains(cf.collisions, e)) only_base.push_back(e);
  for (const auto& e : cf.collisions)
    if (!contains(ann.collisions, e)) only_cf.push_back(e);

  double max_div = 0.0;
  int first_divergent = -1;
  for (int f = 0; f < ann.config.n_frames; ++f) {
    double frame_div = 0.0;
    for (size_t i = 0; i < ann.objects.size(); ++i) {
      Vec3 d = cf.trajectories[i].states[f].position -
               ann.trajectories[i].states[f].position;
      frame_div = std::max(frame_div, d.norm());
    }
    if (frame_div > 1e-9 && first_divergent < 0) first_divergent = f;
    max_div = std::max(max_div, frame_div);
  }

  json j;
  j["scene_id"] = opts.scene_id;
  j["modification"] = {{"object_id", opts.object_id},
                       {"property", opts.property},
                       {"value", opts.value}};
  j["base_events"] = event_list_json(ann.collisions);
  j["counterfactual_events"] = event_list_json(cf.collisions);
  j["events_removed"] = event_list_json(only_base);
  j["events_added"] = event_list_json(only_cf);
  j["max_position_divergence"] = max_div;
  j["first_divergent_frame"] = first_divergent;
  return j;
}

}  // namespace dynsc

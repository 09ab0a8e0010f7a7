#include "dynsc/questions.hpp"

#include <algorithm>
#include <set>

#include "dynsc/error.hpp"
#include "dynsc/executor.hpp"
#include "dynsc/json_io.hpp"
#include "dynsc/rng.hpp"

namespace dynsc {

// Generated from data/templates.json at build time.
extern const char* kDefaultTemplatesJson;

std::string to_string(QuestionType t) {
  switch (t) {
    case QuestionType::factual: return "factual";
    case QuestionType::predictive: return "predictive";
    case QuestionType::counterfactual: return "counterfactual";
  }
  throw Error(ErrorKind::domain_error, "bad question type");
}

QuestionType question_type_from_string(const std::string& s) {
  if (s == "factual") return QuestionType::factual;
  if (s == "predictive") return QuestionType::predictive;
  if (s == "counterfactual") return QuestionType::counterfactual;
  throw Error(ErrorKind::domain_error, "bad question type: " + s);
}

std::vector<Template> templates_from_json(const nlohmann::ordered_json& j) {
  std::vector<Template> out;
  for (const auto& tj : j) {
    Template t;
    t.id = tj.at("id").get<std::string>();
    t.type = question_type_from_string(tj.at("type").get<std::string>());
    t.pattern = tj.at("pattern").get<std::string>();
    t.skeleton = tj.at("program");
    out.push_back(std::move(t));
  }
  return out;
}

const std::vector<Template>& default_templates() {
  static const std::vector<Template> templates =
      templates_from_json(nlohmann::ordered_json::parse(kDefaultTemplatesJson));
  return templates;
}

namespace {

const std::map<std::string, std::string>& cfmod_surfaces() {
  static const std::map<std::string, std::string> m = {
      {"counterfactual_static", "initially static"},
      {"counterfactual_moving_slow", "initially moving slowly"},
      {"counterfactual_moving_fast", "initially moving fast"},
      {"counterfactual_accelerating", "accelerating from the start"},
      {"counterfactual_floating", "floating from the start"},
  };
  return m;
}

}  // namespace

std::string slot_surface(const std::string& slot,
                         const nlohmann::ordered_json& value) {
  if (slot.rfind("vstate", 0) == 0) {
    std::string v = value.get<std::string>();
    if (v == "fast") return "fast";
    if (v == "slow") return "slowly";
    throw Error(ErrorKind::template_error, "bad vstate value: " + v);
  }
  if (slot.rfind("anchor", 0) == 0) {
    if (value.is_string()) {
      std::string v = value.get<std::string>();
      if (v == "begin") return "at the beginning";
      if (v == "end") return "at the end";
      throw Error(ErrorKind::template_error, "bad anchor value: " + v);
    }
    return "when it collides with the " +
           value.at("color").get<std::string>() + " " +
           value.at("shape").get<std::string>();
  }
  if (slot.rfind("cfmod", 0) == 0) {
    auto it = cfmod_surfaces().find(value.get<std::string>());
    if (it == cfmod_surfaces().end())
      throw Error(ErrorKind::template_error, "bad cfmod value");
    return it->second;
  }
  return value.get<std::string>();  // colors, shapes: verbatim
}

std::string render_text(const Template& t, const Binding& binding) {
  std::string out;
  const std::string& p = t.pattern;
  for (size_t i = 0; i < p.size();) {
    if (p[i] != '{') {
      out += p[i++];
      continue;
    }
    size_t close = p.find('}', i);
    if (close == std::string::npos)
      throw Error(ErrorKind::template_error, "unclosed slot in pattern");
    std::string slot = p.substr(i + 1, close - i - 1);
    auto it = binding.find(slot);
    if (it == binding.end())
      throw Error(ErrorKind::template_error, "unbound slot: " + slot);
    out += slot_surface(slot, it->second);
    i = close + 1;
  }
  return out;
}

namespace {

nlohmann::ordered_json substitute(const nlohmann::ordered_json& v,
                                  const Binding& binding) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (!s.empty() && s[0] == '$') {
      auto it = binding.find(s.substr(1));
      if (it == binding.end())
        throw Error(ErrorKind::template_error, "unbound slot: " + s.substr(1));
      return it->second;
    }
    return v;
  }
  if (v.is_object()) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (auto it = v.begin(); it != v.end(); ++it)
      out[it.key()] = substitute(it.value(), binding);
    return out;
  }
  return v;
}

}  // namespace

Program instantiate(const Template& t, const Binding& binding) {
  nlohmann::ordered_json prog = nlohmann::ordered_json::array();
  for (const auto& callj : t.skeleton) {
    nlohmann::ordered_json call = nlohmann::ordered_json::object();
    std::string op = callj.at("op").get<std::string>();
    if (op == "$cfop") {
      auto it = binding.find("cfmod");
      if (it == binding.end())
        throw Error(ErrorKind::template_error, "unbound slot: cfmod");
      op = it->second.get<std::string>();
    }
    call["op"] = op;
    if (callj.contains("args")) call["args"] = substitute(callj.at("args"), binding);
    prog.push_back(std::move(call));
  }
  Program p = program_from_json(prog);
  type_check(p);
  return p;
}

nlohmann::ordered_json question_to_json(const Question& q) {
  nlohmann::ordered_json j;
  j["scene_id"] = q.scene_id;
  j["question_id"] = q.question_id;
  j["template_id"] = q.template_id;
  j["type"] = to_string(q.type);
  j["text"] = q.text;
  j["program"] = program_to_json(q.program);
  j["answer"] = q.answer;
  j["observed_frames"] = q.observed_frames;
  return j;
}

Question question_from_json(const nlohmann::ordered_json& j) {
  Question q;
  q.scene_id = j.at("scene_id").get<std::string>();
  q.question_id = j.at("question_id").get<std::string>();
  q.template_id = j.value("template_id", std::string());
  q.type = question_type_from_string(j.at("type").get<std::string>());
  q.text = j.at("text").get<std::string>();
  q.program = program_from_json(j.at("program"));
  q.answer = j.at("answer").get<std::string>();
  q.observed_frames = j.at("observed_frames").get<int>();
  return q;
}

namespace {

bool has_slot(const Template& t, const std::string& slot) {
  return t.pattern.find("{" + slot + "}") != std::string::npos;
}

// Counterfactual modifications that actually change the initial condition.
std::vector<std::string> applicable_cfmods(const SceneAnnotation& ann, int id) {
  const SceneObject& obj = ann.object_by_id(id);
  double speed0 = ann.trajectory_by_id(id).states[0].velocity.norm();
  VelocityState vs = velocity_state_of(speed0);
  std::vector<std::string> mods;
  if (vs != VelocityState::static_) mods.push_back("counterfactual_static");
  if (vs != VelocityState::slow) mods.push_back("counterfactual_moving_slow");
  if (vs != VelocityState::fast) mods.push_back("counterfactual_moving_fast");
  if (obj.force.engine_accel == 0.0)
    mods.push_back("counterfactual_accelerating");
  if (obj.spec.shape.klass == VehicleClass::plane &&
      obj.force.floating_force_per_mass == 0.0)
    mods.push_back("counterfactual_floating");
  return mods;
}

struct Candidate {
  Binding binding;
  // descriptor of the bound primary object, to spread questions over objects
  std::string subject;
};

std::vector<Candidate> enumerate_bindings(const Template& t,
                                          const SceneAnnotation& ann) {
  std::vector<Candidate> out;
  const auto& objs = ann.objects;

  auto anchors_for = [&](int id) {
    std::vector<nlohmann::ordered_json> anchors = {"begin", "end"};
    // comparison templates leave the collision anchor ambiguous ("it")
    if (has_slot(t, "color2") && t.type == QuestionType::factual &&
        t.id.find("collision") == std::string::npos)
      return anchors;
    std::set<int> partners;
    for (const auto& e : ann.collisions) {
      if (e.a == id) partners.insert(e.b);
      if (e.b == id) partners.insert(e.a);
    }
    for (int pid : partners) {
      const auto& p = ann.object_by_id(pid).spec;
      anchors.push_back({{"anchor", "partner"},
                         {"color", to_string(p.color)},
                         {"shape", p.shape.subtype}});
    }
    return anchors;
  };

  for (const auto& o1 : objs) {
    Binding base;
    if (has_slot(t, "color1")) base["color1"] = to_string(o1.spec.color);
    if (has_slot(t, "shape1")) base["shape1"] = o1.spec.shape.subtype;
    if (!has_slot(t, "color1") && has_slot(t, "shape1")) {
      // "What color is the {shape1}?": the bare shape must be unique
      int n = 0;
      for (const auto& o : objs)
        if (o.spec.shape.subtype == o1.spec.shape.subtype) ++n;
      if (n != 1) continue;
    }
    if (has_slot(t, "color1") && !has_slot(t, "shape1")) {
      int n = 0;
      for (const auto& o : objs)
        if (o.spec.color == o1.spec.color) ++n;
      if (n != 1) continue;
    }

    std::vector<Binding> expanded = {base};
    auto expand = [&](const std::string& slot,
                      const std::vector<nlohmann::ordered_json>& values) {
      if (!has_slot(t, slot) && !(slot == "cfmod" && has_slot(t, "cfmod")))
        return;
      std::vector<Binding> next;
      for (const auto& b : expanded)
        for (const auto& v : values) {
          Binding nb = b;
          nb[slot] = v;
          next.push_back(std::move(nb));
        }
      expanded = std::move(next);
    };

    if (has_slot(t, "color2")) {
      std::vector<Binding> next;
      for (const auto& b : expanded)
        for (const auto& o2 : objs) {
          if (o2.spec.id == o1.spec.id) continue;
          Binding nb = b;
          nb["color2"] = to_string(o2.spec.color);
          nb["shape2"] = o2.spec.shape.subtype;
          next.push_back(std::move(nb));
        }
      expanded = std::move(next);
    }
    if (has_slot(t, "vstate"))
      expand("vstate", {std::string("slow"), std::string("fast")});
    if (has_slot(t, "anchor")) expand("anchor", anchors_for(o1.spec.id));
    if (has_slot(t, "cfmod")) {
      std::vector<nlohmann::ordered_json> mods;
      for (const auto& m : applicable_cfmods(ann, o1.spec.id)) mods.push_back(m);
      if (mods.empty()) continue;
      expand("cfmod", mods);
    }

    for (auto& b : expanded) out.push_back({std::move(b), o1.spec.descriptor()});
  }
  return out;
}

}  // namespace

std::vector<Question> generate_questions(const SceneAnnotation& annotation,
                                         const QuestionMix& mix,
                                         std::uint64_t seed) {
  ExecContext full = ExecContext::from_ground_truth(annotation,
                                                    annotation.config.n_frames);
  ExecContext observed =
      ExecContext::from_ground_truth(annotation, kPredictiveHorizon);

  // Answer every satisfiable candidate, bucketed by template.
  struct Bucket {
    const Template* tmpl;
    std::vector<Question> candidates;
  };
  std::vector<Bucket> buckets;
  Rng rng(Rng::derive(seed, 0x7e57));
  for (const auto& t : default_templates()) {
    Bucket bucket{&t, {}};
    for (const auto& cand : enumerate_bindings(t, annotation)) {
      Question q;
      q.scene_id = annotation.scene_id;
      q.template_id = t.id;
      q.type = t.type;
      q.observed_frames = t.type == QuestionType::predictive
                              ? kPredictiveHorizon
                              : annotation.config.n_frames;
      try {
        q.program = instantiate(t, cand.binding);
        q.text = render_text(t, cand.binding);
        const ExecContext& ctx =
            t.type == QuestionType::predictive ? observed : full;
        q.answer = execute(q.program, ctx).answer;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::unanswerable ||
            e.kind() == ErrorKind::unique_violation)
          continue;  // unsatisfiable binding on this scene
        throw;
      }
      if (!in_answer_vocabulary(q.answer)) continue;
      bucket.candidates.push_back(std::move(q));
    }
    // Seeded shuffle so the round-robin draw below is unbiased but stable.
    for (size_t i = bucket.candidates.size(); i > 1; --i)
      std::swap(bucket.candidates[i - 1],
                bucket.candidates[rng.below(static_cast<std::uint64_t>(i))]);
    buckets.push_back(std::move(bucket));
  }

  // Round-robin across templates of each type until the mix is filled,
  // preferring the minority boolean answer within each template so the raw
  // draw is already close to balanced.
  std::vector<Question> out;
  std::set<std::string> seen_text;
  auto draw = [&](QuestionType type, int want) {
    int taken = 0;
    bool progress = true;
    // rotate the template order per scene so a small mix still covers all
    // templates across a dataset
    size_t rot = rng.below(buckets.size());
    while (taken < want && progress) {
      progress = false;
      for (size_t k = 0; k < buckets.size() && taken < want; ++k) {
        size_t bi = (k + rot) % buckets.size();
        if (buckets[bi].tmpl->type != type) continue;
        auto& cands = buckets[bi].candidates;
        // A seeded coin decides the preferred boolean answer. Preference is
        // per draw, not per scene, so the dataset-wide distribution lands
        // near 50/50 wherever both answers are achievable.
        std::string prefer = rng.below(2) == 0 ? "true" : "false";
        int pick = -1, fallback = -1;
        for (size_t k = 0; k < cands.size(); ++k) {
          if (seen_text.count(cands[k].text)) continue;
          if (fallback < 0) fallback = static_cast<int>(k);
          if (cands[k].answer == prefer) {
            pick = static_cast<int>(k);
            break;
          }
        }
        if (pick < 0) pick = fallback;
        if (pick < 0) continue;  // bucket exhausted
        Question q = std::move(cands[pick]);
        cands.erase(cands.begin() + pick);
        seen_text.insert(q.text);
        out.push_back(std::move(q));
        ++taken;
        progress = true;
      }
    }
  };
  draw(QuestionType::factual, mix.factual);
  draw(QuestionType::predictive, mix.predictive);
  draw(QuestionType::counterfactual, mix.counterfactual);

  if (out.empty())
    throw Error(ErrorKind::generation_failure,
                "scene " + annotation.scene_id + " yields no questions");
  for (size_t i = 0; i < out.size(); ++i)
    out[i].question_id = annotation.scene_id + "-q" + std::to_string(i);
  return out;
}

std::vector<Question> balance_answers(std::vector<Question> questions,
                                      std::uint64_t seed) {
  std::map<std::string, std::vector<size_t>> true_idx, false_idx;
  for (size_t i = 0; i < questions.size(); ++i) {
    if (questions[i].answer == "true")
      true_idx[questions[i].template_id].push_back(i);
    else if (questions[i].answer == "false")
      false_idx[questions[i].template_id].push_back(i);
  }

  std::set<size_t> drop;
  Rng rng(Rng::derive(seed, 0xba1a));
  std::set<std::string> ids;
  for (const auto& [id, _] : true_idx) ids.insert(id);
  for (const auto& [id, _] : false_idx) ids.insert(id);
  for (const auto& id : ids) {
    auto& maj = true_idx[id].size() >= false_idx[id].size() ? true_idx[id]
                                                            : false_idx[id];
    auto& min = true_idx[id].size() >= false_idx[id].size() ? false_idx[id]
                                                            : true_idx[id];
    if (min.empty()) continue;  // unachievable without emptying the template
    size_t cap = (min.size() * 3 + 1) / 2;  // 60/40
    while (maj.size() > cap) {
      size_t k = rng.below(maj.size());
      drop.insert(maj[k]);
      maj.erase(maj.begin() + static_cast<long>(k));
    }
  }

  std::vector<Question> out;
  for (size_t i = 0; i < questions.size(); ++i)
    if (!drop.count(i)) out.push_back(std::move(questions[i]));
  return out;
}

}  // namespace dynsc

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dynsc/program.hpp"
#include "dynsc/scene.hpp"

namespace dynsc {

enum class QuestionType { factual, predictive, counterfactual };

std::string to_string(QuestionType t);
QuestionType question_type_from_string(const std::string& s);

// A text pattern with {slot} placeholders plus a program skeleton whose
// "$slot" strings are filled from a binding. Templates are data; the default
// set is compiled in from data/templates.json.
struct Template {
  std::string id;
  QuestionType type;
  std::string pattern;
  nlohmann::ordered_json skeleton;  // program JSON with $slot placeholders
};

const std::vector<Template>& default_templates();
std::vector<Template> templates_from_json(const nlohmann::ordered_json& j);

// Slot name -> semantic value. Colors/shapes/attrs are plain strings,
// "vstate" is "fast"/"slow", "anchor" is "begin"/"end"/partner object,
// "cfmod" is the counterfactual opcode name.
using Binding = std::map<std::string, nlohmann::ordered_json>;

// Surface realization of one slot value ("slow" -> "slowly", "begin" ->
// "at the beginning", ...). Inverted by the parser.
std::string slot_surface(const std::string& slot,
                         const nlohmann::ordered_json& value);

std::string render_text(const Template& t, const Binding& binding);
Program instantiate(const Template& t, const Binding& binding);

struct Question {
  std::string scene_id;
  std::string question_id;
  std::string template_id;
  QuestionType type = QuestionType::factual;
  std::string text;
  Program program;
  std::string answer;
  int observed_frames = 0;  // 120 factual/counterfactual, 30 predictive
};

nlohmann::ordered_json question_to_json(const Question& q);
Question question_from_json(const nlohmann::ordered_json& j);

struct QuestionMix {
  int factual = 8;
  int predictive = 3;
  int counterfactual = 1;
};

inline constexpr int kPredictiveHorizon = 30;

// Enumerates satisfiable bindings per template, answers them on ground truth
// and samples up to the requested mix. Throws generation_failure when the
// scene yields no questions at all.
std::vector<Question> generate_questions(const SceneAnnotation& annotation,
                                         const QuestionMix& mix,
                                         std::uint64_t seed);

// Per template id, subsamples the majority boolean answer toward 60/40.
std::vector<Question> balance_answers(std::vector<Question> questions,
                                      std::uint64_t seed);

}  // namespace dynsc

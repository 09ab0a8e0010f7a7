#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "dynsc/error.hpp"
#include "dynsc/generator.hpp"
#include "dynsc/parser.hpp"
#include "dynsc/questions.hpp"

using namespace dynsc;

namespace {

std::vector<Question> sample_questions(std::uint64_t seed) {
  SceneAnnotation a =
      generate_annotation(GeneratorConfig{}, "scene-q", seed);
  return generate_questions(a, QuestionMix{}, seed + 1000);
}

}  // namespace

TEST_CASE("the default template set compiles from the embedded data") {
  const auto& ts = default_templates();
  CHECK(ts.size() == 16);
  std::set<std::string> ids;
  int factual = 0, predictive = 0, counterfactual = 0;
  for (const auto& t : ts) {
    ids.insert(t.id);
    switch (t.type) {
      case QuestionType::factual: ++factual; break;
      case QuestionType::predictive: ++predictive; break;
      case QuestionType::counterfactual: ++counterfactual; break;
    }
    CHECK(!t.pattern.empty());
    CHECK(t.skeleton.is_array());
  }
  CHECK(ids.size() == ts.size());
  CHECK(factual == 12);
  CHECK(predictive == 2);
  CHECK(counterfactual == 2);
}

TEST_CASE("question mix respects per-type quotas") {
  for (std::uint64_t seed : {2ull, 13ull, 31ull}) {
    auto qs = sample_questions(seed);
    std::map<QuestionType, int> counts;
    std::set<std::string> ids;
    for (const auto& q : qs) {
      counts[q.type]++;
      ids.insert(q.question_id);
      CHECK(in_answer_vocabulary(q.answer));
    }
    CHECK(ids.size() == qs.size());
    QuestionMix mix;
    CHECK(counts[QuestionType::factual] <= mix.factual);
    CHECK(counts[QuestionType::predictive] <= mix.predictive);
    CHECK(counts[QuestionType::counterfactual] <= mix.counterfactual);
    CHECK(counts[QuestionType::factual] >= 1);
  }
}

TEST_CASE("every generated question parses back to its stored program") {
  Parser parser;
  for (std::uint64_t seed : {2ull, 13ull, 31ull, 58ull}) {
    for (const auto& q : sample_questions(seed)) {
      ParsedQuestion p = parser.parse_question(q.text);
      REQUIRE(p.tmpl != nullptr);
      CHECK(p.tmpl->id == q.template_id);
      CHECK(p.program == q.program);
      CHECK(parser.unparse(p.program) == q.text);
    }
  }
}

TEST_CASE("off-template inputs always fail to parse") {
  Parser parser;
  const char* bad[] = {
      "",
      "hello world",
      "Is the red suv moving quickly at the beginning?",
      "Is the red suv moving fast?",  // missing anchor
      "Is the reddish suv moving fast at the beginning?",
      "What is the mass of the red suv?",
      "Is the red suv moving fast at the beginning",  // also fine with '?'
      "Does the red suv collide with the blue jet at the end?",
      "If the red suv were static, would it collide with the blue jet",
  };
  for (const char* text : bad) {
    // the tokenizer strips punctuation, so the missing '?' variant must
    // still match; re-add it to keep this list strictly off-template
    std::string t = text;
    if (t == "Is the red suv moving fast at the beginning" ||
        t == "If the red suv were static, would it collide with the blue jet")
      continue;
    CHECK_THROWS_AS(parser.parse(t), Error);
  }
  // near-miss: valid template words but a token outside the slot vocabulary
  CHECK_THROWS_AS(parser.parse("Is the red rocket moving fast at the end?"),
                  Error);
}

TEST_CASE("punctuation and case differences do not defeat the parser") {
  Parser parser;
  auto qs = sample_questions(2);
  REQUIRE(!qs.empty());
  std::string text = qs[0].text;
  std::string shouty;
  for (char c : text) shouty += std::toupper((unsigned char)c);
  CHECK(parser.parse(shouty) == qs[0].program);
}

TEST_CASE("slot surfaces cover the closed vocabularies") {
  CHECK(slot_surface("vstate", "slow") == "slowly");
  CHECK(slot_surface("vstate", "fast") == "fast");
  CHECK(slot_surface("anchor", "begin") == "at the beginning");
  CHECK(slot_surface("anchor", "end") == "at the end");
}

TEST_CASE("question JSON round-trips") {
  for (const auto& q : sample_questions(13)) {
    Question r = question_from_json(question_to_json(q));
    CHECK(r.question_id == q.question_id);
    CHECK(r.text == q.text);
    CHECK(r.program == q.program);
    CHECK(r.answer == q.answer);
    CHECK(r.type == q.type);
    CHECK(r.observed_frames == q.observed_frames);
  }
}

TEST_CASE("balance_answers subsamples but never invents questions") {
  std::vector<Question> pool;
  for (std::uint64_t seed : {2ull, 13ull, 31ull, 58ull, 77ull}) {
    auto qs = sample_questions(seed);
    pool.insert(pool.end(), qs.begin(), qs.end());
  }
  std::set<std::string> ids;
  for (const auto& q : pool) ids.insert(q.question_id);
  auto balanced = balance_answers(pool, 9);
  CHECK(balanced.size() <= pool.size());
  for (const auto& q : balanced) CHECK(ids.count(q.question_id) == 1);
}

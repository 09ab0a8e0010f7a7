#pragma once

#include <string>
#include <vector>

#include "dynsc/program.hpp"
#include "dynsc/questions.hpp"

namespace dynsc {

// Lowercases, strips punctuation, splits on whitespace.
std::vector<std::string> tokenize_question(const std::string& text);

struct ParsedQuestion {
  const Template* tmpl = nullptr;
  Binding binding;
  Program program;
};

// Deterministic template-grammar parser; total on generated questions and
// always errors off-template.
class Parser {
 public:
  explicit Parser(std::vector<Template> templates);
  Parser();  // default_templates()

  // Throws parse_error (no match, ambiguous match) with a nearest-template
  // diagnostic.
  ParsedQuestion parse_question(const std::string& text) const;
  Program parse(const std::string& text) const;

  // Inverse of render_text: structurally matches the program against the
  // template skeletons. Throws parse_error when no template matches.
  std::string unparse(const Program& program) const;

 private:
  struct CompiledTemplate {
    Template tmpl;
    // literal word or "{slot}" marker, in pattern order
    std::vector<std::string> tokens;
  };
  std::vector<CompiledTemplate> compiled_;
};

}  // namespace dynsc

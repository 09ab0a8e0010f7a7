#include "dynsc/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "dynsc/error.hpp"

namespace dynsc {

std::vector<std::string> tokenize_question(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

namespace {

using Tokens = std::vector<std::string>;

bool is_color_word(const std::string& s) {
  for (Color c : all_colors())
    if (to_string(c) == s) return true;
  return false;
}

bool is_subtype_name(const std::string& s) {
  for (const auto& info : subtype_registry())
    if (info.name == s) return true;
  return false;
}

std::string join(const Tokens& toks, size_t from, size_t n) {
  std::string out;
  for (size_t i = from; i < from + n; ++i) {
    if (i > from) out += ' ';
    out += toks[i];
  }
  return out;
}

// One way a slot can consume tokens, longest candidates first.
struct SlotMatch {
  size_t consumed;
  nlohmann::ordered_json value;
};

std::vector<SlotMatch> match_slot(const std::string& slot, const Tokens& toks,
                                  size_t at) {
  std::vector<SlotMatch> out;
  size_t left = toks.size() - at;
  if (slot.rfind("color", 0) == 0) {
    if (left >= 1 && is_color_word(toks[at])) out.push_back({1, toks[at]});
    return out;
  }
  if (slot.rfind("shape", 0) == 0) {
    // greedy: "mountain bike" before "bike"
    for (size_t n = std::min<size_t>(3, left); n >= 1; --n) {
      std::string name = join(toks, at, n);
      if (is_subtype_name(name)) out.push_back({n, name});
    }
    return out;
  }
  if (slot.rfind("vstate", 0) == 0) {
    if (left >= 1 && toks[at] == "fast") out.push_back({1, "fast"});
    if (left >= 1 && toks[at] == "slowly") out.push_back({1, "slow"});
    return out;
  }
  if (slot.rfind("cfmod", 0) == 0) {
    static const std::vector<std::pair<Tokens, std::string>> phrases = {
        {{"accelerating", "from", "the", "start"}, "counterfactual_accelerating"},
        {{"floating", "from", "the", "start"}, "counterfactual_floating"},
        {{"initially", "moving", "slowly"}, "counterfactual_moving_slow"},
        {{"initially", "moving", "fast"}, "counterfactual_moving_fast"},
        {{"initially", "static"}, "counterfactual_static"},
    };
    for (const auto& [phrase, op] : phrases) {
      if (left < phrase.size()) continue;
      if (std::equal(phrase.begin(), phrase.end(), toks.begin() + at))
        out.push_back({phrase.size(), op});
    }
    return out;
  }
  if (slot.rfind("anchor", 0) == 0) {
    static const Tokens begin = {"at", "the", "beginning"};
    static const Tokens end = {"at", "the", "end"};
    static const Tokens partner = {"when", "it", "collides", "with", "the"};
    if (left >= 3 && std::equal(begin.begin(), begin.end(), toks.begin() + at))
      out.push_back({3, "begin"});
    if (left >= 3 && std::equal(end.begin(), end.end(), toks.begin() + at))
      out.push_back({3, "end"});
    if (left >= 7 &&
        std::equal(partner.begin(), partner.end(), toks.begin() + at) &&
        is_color_word(toks[at + 5])) {
      for (size_t n = std::min<size_t>(3, left - 6); n >= 1; --n) {
        std::string name = join(toks, at + 6, n);
        if (is_subtype_name(name))
          out.push_back({6 + n,
                         {{"anchor", "partner"},
                          {"color", toks[at + 5]},
                          {"shape", name}}});
      }
    }
    return out;
  }
  throw Error(ErrorKind::template_error, "unknown slot type: " + slot);
}

// Recursive descent with backtracking. Tracks the deepest text position
// reached for the nearest-template diagnostic.
bool match_from(const std::vector<std::string>& pattern, size_t pi,
                const Tokens& toks, size_t ti, Binding& binding,
                size_t& deepest) {
  deepest = std::max(deepest, ti);
  if (pi == pattern.size()) return ti == toks.size();
  const std::string& p = pattern[pi];
  if (p.front() == '{') {
    std::string slot = p.substr(1, p.size() - 2);
    for (const auto& m : match_slot(slot, toks, ti)) {
      binding[slot] = m.value;
      if (match_from(pattern, pi + 1, toks, ti + m.consumed, binding, deepest))
        return true;
      binding.erase(slot);
    }
    return false;
  }
  if (ti < toks.size() && toks[ti] == p)
    return match_from(pattern, pi + 1, toks, ti + 1, binding, deepest);
  return false;
}

}  // namespace

Parser::Parser(std::vector<Template> templates) {
  for (auto& t : templates) {
    CompiledTemplate ct;
    std::istringstream ss(t.pattern);
    std::string word;
    while (ss >> word) {
      if (word.front() == '{') {
        ct.tokens.push_back(word.substr(0, word.find('}') + 1));
        continue;
      }
      for (const auto& tok : tokenize_question(word)) ct.tokens.push_back(tok);
    }
    ct.tmpl = std::move(t);
    for (const auto& other : compiled_)
      if (other.tokens == ct.tokens)
        throw Error(ErrorKind::template_error,
                    "ambiguous templates: " + other.tmpl.id + " / " + ct.tmpl.id);
    compiled_.push_back(std::move(ct));
  }
}

Parser::Parser() : Parser(default_templates()) {}

ParsedQuestion Parser::parse_question(const std::string& text) const {
  Tokens toks = tokenize_question(text);
  std::vector<ParsedQuestion> matches;
  const CompiledTemplate* nearest = nullptr;
  size_t nearest_depth = 0;
  for (const auto& ct : compiled_) {
    Binding binding;
    size_t deepest = 0;
    if (match_from(ct.tokens, 0, toks, 0, binding, deepest)) {
      ParsedQuestion pq;
      pq.tmpl = &ct.tmpl;
      pq.binding = std::move(binding);
      matches.push_back(std::move(pq));
    } else if (!nearest || deepest > nearest_depth) {
      nearest = &ct;
      nearest_depth = deepest;
    }
  }
  if (matches.empty()) {
    std::string hint = nearest ? "; nearest template: " + nearest->tmpl.id +
                                     " (diverged after " +
                                     std::to_string(nearest_depth) + " tokens)"
                               : "";
    throw Error(ErrorKind::parse_error, "no template matches \"" + text + "\"" + hint);
  }
  if (matches.size() > 1)
    throw Error(ErrorKind::parse_error,
                "ambiguous question: " + matches[0].tmpl->id + " / " +
                    matches[1].tmpl->id);
  matches[0].program = instantiate(*matches[0].tmpl, matches[0].binding);
  return std::move(matches[0]);
}

Program Parser::parse(const std::string& text) const {
  return parse_question(text).program;
}

namespace {

bool capture(const std::string& slot, const nlohmann::ordered_json& actual,
             Binding& binding) {
  // domain checks keep hand-built off-template programs out
  if (slot.rfind("color", 0) == 0 &&
      !(actual.is_string() && is_color_word(actual.get<std::string>())))
    return false;
  if (slot.rfind("shape", 0) == 0 &&
      !(actual.is_string() && is_subtype_name(actual.get<std::string>())))
    return false;
  if (slot.rfind("vstate", 0) == 0 &&
      !(actual.is_string() &&
        (actual == "fast" || actual == "slow")))
    return false;
  if (slot.rfind("anchor", 0) == 0) {
    bool ok = (actual.is_string() && (actual == "begin" || actual == "end")) ||
              (actual.is_object() && actual.value("anchor", "") == "partner" &&
               actual.contains("color") && actual.contains("shape"));
    if (!ok) return false;
  }
  auto it = binding.find(slot);
  if (it != binding.end()) return it->second == actual;
  binding[slot] = actual;
  return true;
}

bool args_match(const nlohmann::ordered_json& expected,
                const nlohmann::ordered_json& actual, Binding& binding) {
  if (expected.is_string()) {
    std::string s = expected.get<std::string>();
    if (!s.empty() && s[0] == '$') return capture(s.substr(1), actual, binding);
    return actual == expected;
  }
  if (expected.is_object()) {
    if (!actual.is_object() || actual.size() != expected.size()) return false;
    for (auto it = expected.begin(); it != expected.end(); ++it) {
      if (!actual.contains(it.key())) return false;
      if (!args_match(it.value(), actual.at(it.key()), binding)) return false;
    }
    return true;
  }
  return actual == expected;
}

bool program_matches(const Template& t, const Program& program,
                     Binding& binding) {
  if (program.size() != t.skeleton.size()) return false;
  for (size_t i = 0; i < program.size(); ++i) {
    const auto& callj = t.skeleton[i];
    std::string op = callj.at("op").get<std::string>();
    std::string actual_op = to_string(program[i].op);
    if (op == "$cfop") {
      if (actual_op.rfind("counterfactual", 0) != 0) return false;
      if (!capture("cfmod", actual_op, binding)) return false;
    } else if (op != actual_op) {
      return false;
    }
    nlohmann::ordered_json expected_args =
        callj.contains("args") ? callj.at("args")
                               : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json actual_args = program[i].args;
    if (expected_args.is_null() != actual_args.is_null()) return false;
    if (!expected_args.is_null() &&
        !args_match(expected_args, actual_args, binding))
      return false;
  }
  return true;
}

}  // namespace

std::string Parser::unparse(const Program& program) const {
  for (const auto& ct : compiled_) {
    Binding binding;
    if (program_matches(ct.tmpl, program, binding))
      return render_text(ct.tmpl, binding);
  }
  throw Error(ErrorKind::parse_error, "program matches no template");
}

}  // namespace dynsc

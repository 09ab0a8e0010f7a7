#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dynsc {

enum class OpCode {
  // input
  objects,
  events,
  future_events,
  // object filters
  filter_attributes,
  filter_static,
  filter_moving_velocity,
  filter_accelerating,
  filter_floating,
  // queries
  query_attributes,
  is_static,
  query_moving_velocity,
  query_moving_direction,
  is_accelerating,
  is_floating,
  get_frame,
  come_in_frame,
  // event ops
  filter_collision,
  get_all_col_partners,
  // comparisons
  faster_velocity,
  slower_velocity,
  // counterfactual
  counterfactual_static,
  counterfactual_moving_slow,
  counterfactual_moving_fast,
  counterfactual_accelerating,
  counterfactual_floating,
  // set ops
  unique,
  exist,
  // terminal comparison against a constant token
  equal_to,
};

std::string to_string(OpCode op);
OpCode opcode_from_string(const std::string& s);

struct OpCall {
  OpCode op;
  nlohmann::ordered_json args;  // may be null

  bool operator==(const OpCall& o) const { return op == o.op && args == o.args; }
};

using Program = std::vector<OpCall>;

nlohmann::ordered_json program_to_json(const Program& p);
Program program_from_json(const nlohmann::ordered_json& j);

// Stack value categories used by the static checker and the executor.
enum class ValType { object, object_set, event, event_set, frame, boolean, token };

// Simulates the stack; throws type_error on arity or type mismatch.
// Returns the result type of the full program.
ValType type_check(const Program& p);

}  // namespace dynsc

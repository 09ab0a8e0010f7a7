#include "dynsc/program.hpp"

#include <array>
#include <utility>

#include "dynsc/error.hpp"

namespace dynsc {

namespace {

const std::pair<OpCode, const char*> kOpNames[] = {
    {OpCode::objects, "objects"},
    {OpCode::events, "events"},
    {OpCode::future_events, "future_events"},
    {OpCode::filter_attributes, "filter_attributes"},
    {OpCode::filter_static, "filter_static"},
    {OpCode::filter_moving_velocity, "filter_moving_velocity"},
    {OpCode::filter_accelerating, "filter_accelerating"},
    {OpCode::filter_floating, "filter_floating"},
    {OpCode::query_attributes, "query_attributes"},
    {OpCode::is_static, "is_static"},
    {OpCode::query_moving_velocity, "query_moving_velocity"},
    {OpCode::query_moving_direction, "query_moving_direction"},
    {OpCode::is_accelerating, "is_accelerating"},
    {OpCode::is_floating, "is_floating"},
    {OpCode::get_frame, "get_frame"},
    {OpCode::come_in_frame, "come_in_frame"},
    {OpCode::filter_collision, "filter_collision"},
    {OpCode::get_all_col_partners, "get_all_col_partners"},
    {OpCode::faster_velocity, "faster_velocity"},
    {OpCode::slower_velocity, "slower_velocity"},
    {OpCode::counterfactual_static, "counterfactual_static"},
    {OpCode::counterfactual_moving_slow, "counterfactual_moving_slow"},
    {OpCode::counterfactual_moving_fast, "counterfactual_moving_fast"},
    {OpCode::counterfactual_accelerating, "counterfactual_accelerating"},
    {OpCode::counterfactual_floating, "counterfactual_floating"},
    {OpCode::unique, "unique"},
    {OpCode::exist, "exist"},
    {OpCode::equal_to, "equal_to"},
};

}  // namespace

std::string to_string(OpCode op) {
  for (const auto& [code, name] : kOpNames)
    if (code == op) return name;
  throw Error(ErrorKind::type_error, "bad opcode");
}

OpCode opcode_from_string(const std::string& s) {
  for (const auto& [code, name] : kOpNames)
    if (s == name) return code;
  throw Error(ErrorKind::parse_error, "unknown operation: " + s);
}

nlohmann::ordered_json program_to_json(const Program& p) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& call : p) {
    nlohmann::ordered_json j{{"op", to_string(call.op)}};
    if (!call.args.is_null()) j["args"] = call.args;
    out.push_back(std::move(j));
  }
  return out;
}

Program program_from_json(const nlohmann::ordered_json& j) {
  Program p;
  for (const auto& entry : j) {
    OpCall call;
    call.op = opcode_from_string(entry.at("op").get<std::string>());
    if (entry.contains("args")) call.args = entry.at("args");
    p.push_back(std::move(call));
  }
  return p;
}

namespace {

bool has_frame_arg(const OpCall& call) {
  return !call.args.is_null() && call.args.contains("frame");
}

struct Sig {
  std::vector<ValType> inputs;  // popped by type; same-typed deeper = earlier
  ValType output;
};

Sig signature(const OpCall& call) {
  using V = ValType;
  auto frame_input = [&](std::vector<V> base) {
    // Frame anchors normally live in args; without one the op pops a FrameID.
    if (!has_frame_arg(call)) base.push_back(V::frame);
    return base;
  };
  switch (call.op) {
    case OpCode::objects: return {{}, V::object_set};
    case OpCode::events: return {{}, V::event_set};
    case OpCode::future_events: return {{}, V::event_set};
    case OpCode::filter_attributes: return {{V::object_set}, V::object_set};
    case OpCode::filter_static:
    case OpCode::filter_moving_velocity:
    case OpCode::filter_accelerating:
    case OpCode::filter_floating:
      return {frame_input({V::object_set}), V::object_set};
    case OpCode::query_attributes: return {{V::object}, V::token};
    case OpCode::is_static:
    case OpCode::is_accelerating:
    case OpCode::is_floating:
      return {frame_input({V::object}), V::boolean};
    case OpCode::query_moving_velocity:
    case OpCode::query_moving_direction:
      return {frame_input({V::object}), V::token};
    case OpCode::get_frame: return {{V::event}, V::frame};
    case OpCode::come_in_frame: return {{V::object}, V::frame};
    case OpCode::filter_collision: return {{V::event_set, V::object}, V::event_set};
    case OpCode::get_all_col_partners:
      return {{V::event_set, V::object}, V::object_set};
    case OpCode::faster_velocity:
    case OpCode::slower_velocity:
      return {frame_input({V::object, V::object}), V::boolean};
    case OpCode::counterfactual_static:
    case OpCode::counterfactual_moving_slow:
    case OpCode::counterfactual_moving_fast:
    case OpCode::counterfactual_accelerating:
    case OpCode::counterfactual_floating:
      return {{V::object}, V::event_set};
    case OpCode::unique: return {{V::object_set}, V::object};  // or events
    case OpCode::exist: return {{V::object_set}, V::boolean};  // or events
    case OpCode::equal_to: return {{V::token}, V::boolean};
  }
  throw Error(ErrorKind::type_error, "bad opcode");
}

}  // namespace

ValType type_check(const Program& p) {
  if (p.empty()) throw Error(ErrorKind::type_error, "empty program");
  std::vector<ValType> stack;
  for (const auto& call : p) {
    Sig sig = signature(call);
    if (stack.size() < sig.inputs.size())
      throw Error(ErrorKind::type_error,
                  "stack underflow at " + to_string(call.op));
    std::vector<ValType> popped(stack.end() - sig.inputs.size(), stack.end());
    stack.resize(stack.size() - sig.inputs.size());

    // unique / exist accept object or event sets; equal_to accepts any
    // token-valued input.
    if (call.op == OpCode::unique || call.op == OpCode::exist) {
      if (popped[0] != ValType::object_set && popped[0] != ValType::event_set)
        throw Error(ErrorKind::type_error, to_string(call.op) + " needs a set");
      stack.push_back(call.op == OpCode::exist
                          ? ValType::boolean
                          : (popped[0] == ValType::object_set ? ValType::object
                                                              : ValType::event));
      continue;
    }
    if (call.op == OpCode::equal_to) {
      if (popped[0] != ValType::token && popped[0] != ValType::boolean &&
          popped[0] != ValType::frame)
        throw Error(ErrorKind::type_error, "equal_to needs a comparable value");
      stack.push_back(ValType::boolean);
      continue;
    }

    // Type-directed matching: every declared input type must be covered.
    std::vector<ValType> need = sig.inputs;
    for (ValType t : popped) {
      auto it = std::find(need.begin(), need.end(), t);
      if (it == need.end())
        throw Error(ErrorKind::type_error,
                    "type mismatch at " + to_string(call.op));
      need.erase(it);
    }
    stack.push_back(sig.output);
  }
  if (stack.size() != 1)
    throw Error(ErrorKind::type_error, "program leaves " +
                                           std::to_string(stack.size()) +
                                           " values on the stack");
  return stack.back();
}

}  // namespace dynsc

#pragma once

#include <stdexcept>
#include <string>

namespace dynsc {

enum class ErrorKind {
  invalid_spec,
  domain_error,
  simulation_diverged,
  generation_failure,
  template_error,
  parse_error,
  type_error,
  unique_violation,
  unanswerable,
  tracking_error,
  io_error,
  usage_error,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dynsc

#pragma once

#include <stdexcept>
#include <string>

namespace flatbp {

enum class ErrorCode {
  invalid_cardinality,
  invalid_scope,
  invalid_config,
  duplicate_config,
  arity_mismatch,
  invalid_potential,
  index_out_of_range,
  configuration_error,
  budget_exceeded,
  infeasible_model,
  parse_error,
  unsupported_network,
  io_error,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception thrown by all library entry points. Carries a machine-checkable
/// code next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace flatbp

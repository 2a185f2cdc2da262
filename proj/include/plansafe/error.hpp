#ifndef PLANSAFE_ERROR_HPP
#define PLANSAFE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace plansafe {

// Error categories with stable CLI exit codes (see README, "Exit codes").
enum class ErrorCode {
  generic = 1,
  parse_error = 2,
  unsatisfiable_spec = 3,
  timeout = 4,
  dead_end = 5,
  state_cap_exceeded = 6,
  io_error = 7,
  invalid_action = 8,
  step_limit = 9,
  protocol_error = 10,
};

const char* error_code_name(ErrorCode c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

// Parse failures carry the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(ErrorCode::parse_error,
              message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline const char* error_code_name(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::generic: return "error";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::unsatisfiable_spec: return "unsatisfiable-spec";
    case ErrorCode::timeout: return "timeout";
    case ErrorCode::dead_end: return "dead-end";
    case ErrorCode::state_cap_exceeded: return "state-cap-exceeded";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::invalid_action: return "invalid-action";
    case ErrorCode::step_limit: return "step-limit";
    case ErrorCode::protocol_error: return "protocol-error";
  }
  return "error";
}

}  // namespace plansafe

#endif  // PLANSAFE_ERROR_HPP

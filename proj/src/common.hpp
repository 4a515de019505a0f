#pragma once

#include <stdexcept>
#include <string>

namespace cf {

enum class ErrorCode {
  parse,        // malformed input text
  invalid,      // contract violation (bad arity, bad state id, ...)
  budget,       // configured ceiling exceeded
  unreachable,  // requested state/coordinate not reachable
  check_failed, // a verification check failed
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

} // namespace cf

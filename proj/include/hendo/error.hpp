#pragma once

#include <stdexcept>
#include <string>

namespace hendo {

// All library failures are reported through this exception. `code` is a
// stable machine-readable tag (e.g. "ring-mismatch", "not-a-weight-function")
// so tests and the CLI can branch on it without parsing messages.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool ok, const std::string& code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace hendo

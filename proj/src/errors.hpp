#pragma once

#include <stdexcept>
#include <string>

namespace rapsa {

// Error taxonomy shared by the C++ core and the C API. Every exception thrown
// by the library derives from Error; the C wrapper maps Kind to a status code
// and keeps the message for rapsa_last_error_message().
class Error : public std::runtime_error {
 public:
  enum class Kind {
    invalid_argument,  // bad parameter value or combination
    config,            // malformed or inconsistent experiment configuration
    io,                // filesystem problems (open/read/write)
    parse,             // structurally broken input file
    diverged,          // iterate escaped (non-finite or objective blow-up)
    singular,          // rank-deficient linear system with no usable fallback
    precondition,      // analytical precondition violated (named in message)
    internal           // should-not-happen states
  };

  Error(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline Error invalid_argument_error(const std::string& msg) {
  return Error(Error::Kind::invalid_argument, msg);
}
inline Error config_error(const std::string& msg) {
  return Error(Error::Kind::config, msg);
}
inline Error io_error(const std::string& msg) {
  return Error(Error::Kind::io, msg);
}
inline Error parse_error(const std::string& msg) {
  return Error(Error::Kind::parse, msg);
}
inline Error divergence_error(const std::string& msg) {
  return Error(Error::Kind::diverged, msg);
}
inline Error singular_error(const std::string& msg) {
  return Error(Error::Kind::singular, msg);
}
inline Error precondition_error(const std::string& msg) {
  return Error(Error::Kind::precondition, msg);
}
inline Error internal_error(const std::string& msg) {
  return Error(Error::Kind::internal, msg);
}

}  // namespace rapsa

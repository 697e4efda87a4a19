#pragma once

#include <stdexcept>
#include <string>

namespace kawahara {

enum class ErrorKind {
  domain,        // argument outside the mathematical domain of a formula
  precondition,  // caller violated an operation's precondition
  refused,       // a certificate or check was declined, with a reason
  config,        // configuration text could not be turned into a RunConfig
  solver,        // a linear solve failed
  io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kawahara

#include "kawahara/error.hpp"

namespace kawahara {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::refused: return "refused";
    case ErrorKind::config: return "config";
    case ErrorKind::solver: return "solver";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace kawahara

#include "collapse/error.hpp"

namespace collapse {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::malformed_input: return "malformed input";
    case ErrorKind::empty_data: return "empty data";
    case ErrorKind::not_ready: return "not ready";
    case ErrorKind::invalid_parameter: return "invalid parameter";
    case ErrorKind::decode: return "decode error";
    case ErrorKind::not_found: return "not found";
    case ErrorKind::missing_source: return "missing source";
    case ErrorKind::not_enough_history: return "not enough history";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::config: return "config error";
    case ErrorKind::numerical_divergence: return "numerical divergence";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace collapse

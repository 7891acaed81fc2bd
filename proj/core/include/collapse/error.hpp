#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace collapse {

enum class ErrorKind {
  malformed_input,
  empty_data,
  not_ready,
  invalid_parameter,
  decode,
  not_found,
  missing_source,
  not_enough_history,
  io,
  config,
  numerical_divergence,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const char* what) {
  if (!cond) fail(kind, what);
}

}  // namespace collapse

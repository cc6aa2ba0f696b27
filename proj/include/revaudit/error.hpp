#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace revaudit {

enum class ErrorKind {
  parse,
  referential,
  validation,
  infeasible,
  rank_deficient,
  sample_size,
  no_data,
  missing_artifact,
  io,
  usage,
};

std::string_view to_string(ErrorKind kind);

// All library failures surface as this exception; kind() is stable and is
// what the CLI reports in its machine-readable error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace revaudit

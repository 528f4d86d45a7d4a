#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finslerq {

enum class ErrorKind {
  MalformedInput,
  DegenerateInput,
  InvalidStructure,
  OutOfDomain,
  ApproximationFailed,
  Precondition,
  ChartMismatch,
  Internal,
  Usage,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace finslerq

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tvdd {

// Bad arguments: mismatched sizes, invalid decompositions, bad configs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File access and format errors. Carries the byte offset where parsing
// failed, or -1 when the failure is not tied to a position.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what, std::int64_t offset = -1)
      : std::runtime_error(offset >= 0 ? what + " (at byte " + std::to_string(offset) + ")" : what),
        offset_(offset) {}

  std::int64_t offset() const noexcept { return offset_; }

 private:
  std::int64_t offset_;
};

// Non-finite energies or iterates.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tvdd

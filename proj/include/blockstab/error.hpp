#pragma once

#include <stdexcept>
#include <string>

namespace blockstab {

enum class ErrorKind {
  parse,
  invalid_argument,
  empty_network,
  undefined_value,
  invalid_dissimilarity,
  infeasible,
  singular_design,
  io,
};

/// Single exception type for the library; `kind()` distinguishes failure classes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace blockstab

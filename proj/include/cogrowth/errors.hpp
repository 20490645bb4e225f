#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cogrowth {

enum class ErrorKind {
  precondition,  // invalid input or violated operation precondition
  budget,        // enumeration / state budget exceeded
  verdict,       // a checked assertion failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::precondition, what) {}
};

/// Raised when an operation would exceed the enumeration budget. `required` is
/// the count the operation would have needed (0 when unknown).
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, std::uint64_t required)
      : Error(ErrorKind::budget, what), required_(required) {}
  std::uint64_t required() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

class VerdictError : public Error {
 public:
  explicit VerdictError(const std::string& what) : Error(ErrorKind::verdict, what) {}
};

/// Process exit code for an error kind: 2 precondition, 3 budget, 4 verdict.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::precondition: return 2;
    case ErrorKind::budget: return 3;
    case ErrorKind::verdict: return 4;
  }
  return 1;
}

/// Enumeration cap. Reads COGROWTH_LAB_BUDGET once; defaults to 2e7.
std::uint64_t default_budget();
/// Replaces the environment value process-wide; 0 restores it.
void set_budget_override(std::uint64_t budget);

}  // namespace cogrowth

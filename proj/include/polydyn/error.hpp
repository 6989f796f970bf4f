#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace polydyn {

enum class Errc {
  NotPrime,
  TooLarge,
  FieldMismatch,
  DivisionByZero,
  WidthMismatch,
  RingMismatch,
  ZeroPolynomial,
  ExponentOverflow,
  NonUniqueLeading,
  NonMonicLeading,
  DegreeCondition,
  VariableScope,
  ZeroA,
  CharTooSmall,
  IndexOutOfRange,
  TermBudgetExceeded,
  WrongSystemKind,
  StepBudgetExceeded,
  ZeroCoefficientVector,
  EnumerationCapExceeded,
  ConstantPolynomial,
  CapExceeded,
  ParseError,
  MissingField,
  InvalidArgument,
  Io,
};

std::string_view to_string(Errc code) noexcept;

// Budget errors map to CLI exit code 2, I/O to 3, everything else to 1.
bool is_budget_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::string location = {})
      : std::runtime_error(message), code_(code), location_(std::move(location)) {}

  Errc code() const noexcept { return code_; }
  // Where in an input the error was found, e.g. "config:3"; may be empty.
  const std::string& location() const noexcept { return location_; }

 private:
  Errc code_;
  std::string location_;
};

}  // namespace polydyn

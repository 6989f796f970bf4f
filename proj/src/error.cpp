#include "polydyn/error.hpp"

namespace polydyn {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotPrime: return "NotPrime";
    case Errc::TooLarge: return "TooLarge";
    case Errc::FieldMismatch: return "FieldMismatch";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::WidthMismatch: return "WidthMismatch";
    case Errc::RingMismatch: return "RingMismatch";
    case Errc::ZeroPolynomial: return "ZeroPolynomial";
    case Errc::ExponentOverflow: return "ExponentOverflow";
    case Errc::NonUniqueLeading: return "NonUniqueLeading";
    case Errc::NonMonicLeading: return "NonMonicLeading";
    case Errc::DegreeCondition: return "DegreeCondition";
    case Errc::VariableScope: return "VariableScope";
    case Errc::ZeroA: return "ZeroA";
    case Errc::CharTooSmall: return "CharTooSmall";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::TermBudgetExceeded: return "TermBudgetExceeded";
    case Errc::WrongSystemKind: return "WrongSystemKind";
    case Errc::StepBudgetExceeded: return "StepBudgetExceeded";
    case Errc::ZeroCoefficientVector: return "ZeroCoefficientVector";
    case Errc::EnumerationCapExceeded: return "EnumerationCapExceeded";
    case Errc::ConstantPolynomial: return "ConstantPolynomial";
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingField: return "MissingField";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

bool is_budget_error(Errc code) noexcept {
  return code == Errc::TermBudgetExceeded || code == Errc::StepBudgetExceeded ||
         code == Errc::EnumerationCapExceeded || code == Errc::CapExceeded;
}

}  // namespace polydyn

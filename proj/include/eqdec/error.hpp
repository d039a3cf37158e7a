#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eqdec {

enum class Errc {
  InvalidInput,
  ParseError,
  SumMismatch,
  NonDyadic,
  InfiniteInput,
  MarginalViolation,
  UnrepresentableSums,
  Mismatch,
  NotCompleteSection,
  NotAperiodic,
  NonDyadicValues,
  TableMismatch,
  NotInvariantOnA,
  AlreadyBelow,
  SaturationFails,
  NotInvariantClosed,
  NotContinuous,
  NotDenseBond,
  ConditionFails,
  NotT0,
  SyntaxError,
  UnboundVariable,
  ScaleUndefined,
  Internal,
};

inline std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::ParseError: return "ParseError";
    case Errc::SumMismatch: return "SumMismatch";
    case Errc::NonDyadic: return "NonDyadic";
    case Errc::InfiniteInput: return "InfiniteInput";
    case Errc::MarginalViolation: return "MarginalViolation";
    case Errc::UnrepresentableSums: return "UnrepresentableSums";
    case Errc::Mismatch: return "Mismatch";
    case Errc::NotCompleteSection: return "NotCompleteSection";
    case Errc::NotAperiodic: return "NotAperiodic";
    case Errc::NonDyadicValues: return "NonDyadicValues";
    case Errc::TableMismatch: return "TableMismatch";
    case Errc::NotInvariantOnA: return "NotInvariantOnA";
    case Errc::AlreadyBelow: return "AlreadyBelow";
    case Errc::SaturationFails: return "SaturationFails";
    case Errc::NotInvariantClosed: return "NotInvariantClosed";
    case Errc::NotContinuous: return "NotContinuous";
    case Errc::NotDenseBond: return "NotDenseBond";
    case Errc::ConditionFails: return "ConditionFails";
    case Errc::NotT0: return "NotT0";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::ScaleUndefined: return "ScaleUndefined";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the Errc codes so that
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace eqdec

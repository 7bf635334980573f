#pragma once

#include <stdexcept>
#include <string>

namespace unimod {

// Engine-wide outcome codes. Sound negatives (a proof that the requested
// object does not exist) are distinct from budget/undetermined outcomes
// (the engine gave up without deciding).
enum class Status {
  Ok = 0,
  NotUnimodular,
  NotMember,
  NotUnit,
  BoundExceeded,
  SearchBudgetExceeded,
  SplittingDegreeOverflow,
  SplittingPreconditionFailed,
  NonComaximalDenominators,
  ImagesDisagree,
  Refutation,
  Undetermined,
  ThresholdNotMet,
  StrategyInapplicable,
  TagPreconditionFailed,
  ParseError,
  HashMismatch,
  ReplayFailed,
  InternalError,
};

const char* status_name(Status s);

// CLI / C-API exit-code mapping:
//   0 success, 1 usage/parse, 2 sound negative, 3 undetermined/budget,
//   4 replay failure.
int status_exit_code(Status s);

// Hard contract violations (arity mismatches, malformed inputs, broken
// invariants). Everything that is a legitimate mathematical outcome is a
// Status value instead.
class Error : public std::runtime_error {
public:
  Error(Status s, const std::string& msg) : std::runtime_error(msg), status_(s) {}
  Status status() const { return status_; }

private:
  Status status_;
};

} // namespace unimod

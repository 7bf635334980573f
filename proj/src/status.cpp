#include "status.hpp"

namespace unimod {

const char* status_name(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::NotUnimodular: return "not-unimodular";
    case Status::NotMember: return "not-member";
    case Status::NotUnit: return "not-unit";
    case Status::BoundExceeded: return "bound-exceeded";
    case Status::SearchBudgetExceeded: return "search-budget-exceeded";
    case Status::SplittingDegreeOverflow: return "splitting-degree-overflow";
    case Status::SplittingPreconditionFailed: return "splitting-precondition-failed";
    case Status::NonComaximalDenominators: return "non-comaximal-denominators";
    case Status::ImagesDisagree: return "images-disagree";
    case Status::Refutation: return "refutation";
    case Status::Undetermined: return "undetermined";
    case Status::ThresholdNotMet: return "threshold-not-met";
    case Status::StrategyInapplicable: return "strategy-inapplicable";
    case Status::TagPreconditionFailed: return "tag-precondition-failed";
    case Status::ParseError: return "parse-error";
    case Status::HashMismatch: return "hash-mismatch";
    case Status::ReplayFailed: return "replay-failed";
    case Status::InternalError: return "internal-error";
  }
  return "unknown";
}

int status_exit_code(Status s) {
  switch (s) {
    case Status::Ok:
      return 0;
    case Status::NotUnimodular:
    case Status::NotMember:
    case Status::NotUnit:
    case Status::ImagesDisagree:
    case Status::Refutation:
      return 2;
    case Status::BoundExceeded:
    case Status::SearchBudgetExceeded:
    case Status::SplittingDegreeOverflow:
    case Status::SplittingPreconditionFailed:
    case Status::NonComaximalDenominators:
    case Status::Undetermined:
    case Status::ThresholdNotMet:
    case Status::StrategyInapplicable:
    case Status::TagPreconditionFailed:
      return 3;
    case Status::ParseError:
    case Status::HashMismatch:
      return 1;
    case Status::ReplayFailed:
      return 4;
    case Status::InternalError:
      return 1;
  }
  return 1;
}

} // namespace unimod

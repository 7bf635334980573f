#pragma once

#include <cstdint>

namespace unimod {

// Tunable budgets. Every search or escalation loop in the engine is bounded
// by one of these; exceeding a bound is reported, never silently retried.
struct Config {
  unsigned saturation_emax = 64;  // max exponent in h^e searches
  unsigned split_bound = 16;      // max localization power during word splitting
  unsigned search_budget = 1000;  // random draws in basic-element searches
  unsigned analytic_degree = 8;   // preimage search degree cap mod h
  unsigned lindel_points = 100;   // specialization points tried for Lindel data
  std::uint64_t seed = 0;
};

} // namespace unimod

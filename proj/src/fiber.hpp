#pragma once

#include "reduce.hpp"

namespace unimod {

// Transport an element between rings over the same variable table whose
// inverted slots correspond by polynomial equality. Fails when a positively
// used slot has no equal counterpart.
std::optional<RingElement> transport_by_slots(const RingElement& x, const RingPtr& target);
RingElement transport_by_slots_strict(const RingElement& x, const RingPtr& target);

// The cartesian square C -> C_f, C_g -> C_fg for nonzero f, g in C.
struct FiberSquare {
  RingPtr C, Cf, Cg, Cfg;
  Polynomial f, g;
  int f_slot_cf = -1, g_slot_cg = -1;   // slot of f in Cf / g in Cg
  int f_slot_cfg = -1, g_slot_cfg = -1; // slots in Cfg
};

FiberSquare make_square(const RingPtr& C, const Polynomial& f, const Polynomial& g);

// sigma1 over C_f (elementary, tag preserved) and sigma2 over C_g (a word on
// the fast paths, otherwise a matrix certificate with exact inverse), with
// (sigma2)_{fg} * (sigma1)_{fg} == sigma exactly.
struct SplitPair {
  ElementaryWord sigma1;
  std::optional<ElementaryWord> sigma2_word;
  RMatrix sigma2, sigma2_inv;
};

struct SplitResult {
  Status status = Status::InternalError;
  SplitPair pair;
  std::string message;
};

SplitResult split_elementary(const ElementaryWord& sigma, const FiberSquare& sq,
                             const Config& cfg);

// Glue vectors over C_f and C_g whose images agree in C_fg into a vector
// over C (comaximal denominator clearing).
struct PatchResult {
  Status status = Status::InternalError;
  RVector patched;
  std::string message;
};

PatchResult patch_unimodular(const RVector& u1, const RVector& u2,
                             const FiberSquare& sq, const Config& cfg);

// Bezout data alpha * f^a + beta * g^b == 1 in C.
struct Comaximality {
  RingElement alpha, beta;
  unsigned a = 0, b = 0;
};
std::optional<Comaximality> comaximal_powers(const RingPtr& C, const Polynomial& f,
                                             const Polynomial& g, unsigned a,
                                             unsigned b, const Config& cfg);

} // namespace unimod

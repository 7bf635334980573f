#pragma once

#include <optional>
#include <vector>

#include "poly.hpp"

namespace unimod {

// Cofactor witness for ideal membership after inverting h:
//   sum_i cofactors[i] * gens[i] == h^exponent * target, exactly.
// Plain membership has exponent 0 and h = 1.
struct MembershipCertificate {
  std::vector<Polynomial> cofactors;
  unsigned exponent = 0;
  Polynomial h;

  bool replays(const Polynomial& target, const std::vector<Polynomial>& gens) const;
};

struct DivisionResult {
  Polynomial remainder;
  std::vector<Polynomial> quotients; // one per divisor
};

// Multivariate division with the normal strategy: always reduce the leading
// reducible term by the first divisor whose leading term divides it.
DivisionResult divide(const Polynomial& p, const std::vector<Polynomial>& divisors,
                      const MonomialOrder& ord);

// Unique reduced Groebner basis (monic, autoreduced, sorted by decreasing
// leading term). Deterministic for fixed input.
std::vector<Polynomial> groebner_basis(const std::vector<Polynomial>& gens,
                                       const MonomialOrder& ord);

// Same basis plus a representation of each element in terms of the input
// generators: basis[i] == sum_j reps[i][j] * gens[j].
struct TrackedBasis {
  std::vector<Polynomial> basis;
  std::vector<std::vector<Polynomial>> reps;
  MonomialOrder ord;
};
TrackedBasis groebner_basis_tracked(const std::vector<Polynomial>& gens,
                                    const MonomialOrder& ord);

// Remainder of division by a Groebner basis; rejects non-autoreduced bases.
Polynomial normal_form(const Polynomial& p, const std::vector<Polynomial>& basis,
                       const MonomialOrder& ord);

// Exact membership of target in (gens); nullopt when target is not a member.
std::optional<MembershipCertificate>
membership_certificate(const Polynomial& target, const std::vector<Polynomial>& gens);

// Membership through a tracked basis computed once (amortized queries).
std::optional<MembershipCertificate>
membership_certificate(const Polynomial& target, const std::vector<Polynomial>& gens,
                       const TrackedBasis& tb);

enum class SaturationKind { Member, NotMember, BoundExceeded };

struct SaturationResult {
  SaturationKind kind;
  MembershipCertificate cert; // valid iff kind == Member
};

// Least e <= emax with h^e * target in (gens). Existence is decided by
// adjoining t and testing target in (gens, t*h - 1) under a block order with
// t dominant; the exponent search then runs against one tracked basis.
SaturationResult saturation_membership(const Polynomial& target,
                                       const std::vector<Polynomial>& gens,
                                       const Polynomial& h, unsigned emax);

} // namespace unimod

#pragma once

#include "words.hpp"

namespace unimod {

// Unimodularity of (v_1, ..., v_r): 1 lies in the ideal of numerators after
// inverting the product H of all inverted elements. The certificate carries
// both the polynomial-level cofactors (sum c_i * num_i == H^e) and derived
// ring-level cofactors with sum C_i * v_i == 1.
struct UnimodularCheck {
  Status status = Status::NotUnimodular; // Ok | NotUnimodular | BoundExceeded
  MembershipCertificate poly_cert;
  RVector cofactors;
};

UnimodularCheck is_unimodular(const RVector& v, const Config& cfg);

// A verified unimodular vector: entries plus the stored certificate.
struct UnimodularVector {
  RVector entries;
  UnimodularCheck cert;

  const RingPtr& ring() const { return entries[0].ring(); }
  int size() const { return static_cast<int>(entries.size()); }
};

UnimodularVector make_unimodular(const RVector& v, const Config& cfg); // throws on failure

// Transform a certificate along a word: if sum C_i v_i == 1 and v' = M v,
// then the row C M^{-1} certifies v'.
RVector transform_cofactors(const RVector& cofactors, const ElementaryWord& w);

// Exact division in the ring: a / b when representable, else nullopt.
std::optional<RingElement> ring_divexact(const RingElement& a, const RingElement& b);

// Cheap one-sided filter for rational rings: false means the vector is
// certainly not unimodular modulo a large prime (hence almost certainly not
// unimodular); true means the exact check is worth running. Always true for
// prime fields and on reduction mishaps.
bool unimodular_mod_probe(const RVector& v);

} // namespace unimod

#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "status.hpp"

namespace unimod {

// Coefficient field: Q with arbitrary-precision rationals, or F_p with a
// prime p < 2^31 so that products fit into 64-bit intermediates.
struct Field {
  enum class Kind { Q, Fp };
  Kind kind = Kind::Q;
  std::uint32_t p = 0;

  static Field rationals() { return Field{Kind::Q, 0}; }
  static Field prime(std::uint32_t p); // checks primality

  bool operator==(const Field& o) const { return kind == o.kind && p == o.p; }
  bool operator!=(const Field& o) const { return !(*this == o); }
  std::string to_string() const;
};

bool is_prime_u32(std::uint32_t n);

// An element of a fixed coefficient field. Rationals are kept in lowest
// terms with positive denominator (mpq canonical form); modular residues in
// [0, p). Mixed-field arithmetic is a hard error.
class Scalar {
public:
  Scalar() : field_(Field::rationals()) {}
  static Scalar zero(const Field& f);
  static Scalar one(const Field& f);
  static Scalar from_int(const Field& f, long long v);
  static Scalar from_mpq(const mpq_class& q); // field Q
  static Scalar from_fraction(const Field& f, long long num, long long den);

  const Field& field() const { return field_; }
  bool is_zero() const;
  bool is_one() const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const; // o must be nonzero
  Scalar operator-() const;
  Scalar inverse() const; // must be nonzero

  bool operator==(const Scalar& o) const;
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  // Canonical text: "3", "-3/2" over Q; "5" over F_p.
  std::string to_string() const;

  // Exposed for hashing and specialization checks.
  const mpq_class& rational() const { return q_; }
  std::uint32_t residue() const { return r_; }

private:
  explicit Scalar(const Field& f) : field_(f) {}
  void check_same(const Scalar& o) const;

  Field field_;
  mpq_class q_;        // used when kind == Q
  std::uint32_t r_ = 0; // used when kind == Fp
};

std::uint32_t fp_inverse(std::uint32_t a, std::uint32_t p);

} // namespace unimod

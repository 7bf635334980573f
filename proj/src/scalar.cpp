#include "scalar.hpp"

namespace unimod {

namespace {

std::uint64_t powmod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = (__uint128_t(r) * b) % m;
    b = (__uint128_t(b) * b) % m;
    e >>= 1;
  }
  return r;
}

bool miller_rabin(std::uint64_t n, std::uint64_t a) {
  if (n % a == 0) return n == a;
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) { d >>= 1; ++s; }
  std::uint64_t x = powmod_u64(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = (__uint128_t(x) * x) % n;
    if (x == n - 1) return true;
  }
  return false;
}

} // namespace

// Deterministic for n < 3,215,031,751 with bases 2, 3, 5, 7; covers p < 2^31.
bool is_prime_u32(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t a : {2u, 3u, 5u, 7u}) {
    if (n == a) return true;
    if (!miller_rabin(n, a)) return false;
  }
  return true;
}

Field Field::prime(std::uint32_t p) {
  if (p >= (1u << 31) || !is_prime_u32(p))
    throw Error(Status::ParseError, "field characteristic must be a prime < 2^31");
  return Field{Kind::Fp, p};
}

std::string Field::to_string() const {
  if (kind == Kind::Q) return "Q";
  return "F " + std::to_string(p);
}

std::uint32_t fp_inverse(std::uint32_t a, std::uint32_t p) {
  if (a == 0) throw Error(Status::InternalError, "inverse of zero residue");
  return static_cast<std::uint32_t>(powmod_u64(a, p - 2, p));
}

Scalar Scalar::zero(const Field& f) {
  Scalar s(f);
  return s;
}

Scalar Scalar::one(const Field& f) { return from_int(f, 1); }

Scalar Scalar::from_int(const Field& f, long long v) {
  Scalar s(f);
  if (f.kind == Field::Kind::Q) {
    s.q_ = mpq_class(static_cast<long>(v));
  } else {
    long long m = v % static_cast<long long>(f.p);
    if (m < 0) m += f.p;
    s.r_ = static_cast<std::uint32_t>(m);
  }
  return s;
}

Scalar Scalar::from_mpq(const mpq_class& q) {
  Scalar s(Field::rationals());
  s.q_ = q;
  s.q_.canonicalize();
  return s;
}

Scalar Scalar::from_fraction(const Field& f, long long num, long long den) {
  if (den == 0) throw Error(Status::ParseError, "zero denominator in coefficient");
  if (f.kind == Field::Kind::Q) {
    Scalar s(f);
    s.q_ = mpq_class(static_cast<long>(num), static_cast<long>(den));
    s.q_.canonicalize();
    return s;
  }
  Scalar n = from_int(f, num), d = from_int(f, den);
  if (d.is_zero()) throw Error(Status::ParseError, "coefficient denominator vanishes mod p");
  return n / d;
}

bool Scalar::is_zero() const {
  return field_.kind == Field::Kind::Q ? q_ == 0 : r_ == 0;
}

bool Scalar::is_one() const {
  return field_.kind == Field::Kind::Q ? q_ == 1 : r_ == 1;
}

void Scalar::check_same(const Scalar& o) const {
  if (field_ != o.field_)
    throw Error(Status::InternalError, "mixed coefficient fields");
}

Scalar Scalar::operator+(const Scalar& o) const {
  check_same(o);
  Scalar s(field_);
  if (field_.kind == Field::Kind::Q) {
    s.q_ = q_ + o.q_;
  } else {
    std::uint64_t t = std::uint64_t(r_) + o.r_;
    s.r_ = static_cast<std::uint32_t>(t >= field_.p ? t - field_.p : t);
  }
  return s;
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
  check_same(o);
  Scalar s(field_);
  if (field_.kind == Field::Kind::Q)
    s.q_ = q_ * o.q_;
  else
    s.r_ = static_cast<std::uint32_t>((std::uint64_t(r_) * o.r_) % field_.p);
  return s;
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.inverse(); }

Scalar Scalar::operator-() const {
  Scalar s(field_);
  if (field_.kind == Field::Kind::Q)
    s.q_ = -q_;
  else
    s.r_ = r_ == 0 ? 0 : field_.p - r_;
  return s;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw Error(Status::InternalError, "scalar inverse of zero");
  Scalar s(field_);
  if (field_.kind == Field::Kind::Q)
    s.q_ = 1 / q_;
  else
    s.r_ = fp_inverse(r_, field_.p);
  return s;
}

bool Scalar::operator==(const Scalar& o) const {
  if (field_ != o.field_) return false;
  return field_.kind == Field::Kind::Q ? q_ == o.q_ : r_ == o.r_;
}

std::string Scalar::to_string() const {
  if (field_.kind == Field::Kind::Q) return q_.get_str();
  return std::to_string(r_);
}

} // namespace unimod

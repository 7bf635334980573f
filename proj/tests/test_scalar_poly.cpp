#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "poly.hpp"
#include "rng.hpp"
#include "scalar.hpp"

using namespace unimod;

namespace {

Scalar rnd_scalar(Rng& rng, const Field& f) {
  if (f.kind == Field::Kind::Q)
    return Scalar::from_fraction(f, rng.range(-9, 9), rng.range(1, 7));
  return Scalar::from_int(f, rng.range(0, f.p - 1));
}

} // namespace

TEST_CASE("field construction checks primality") {
  CHECK_NOTHROW(Field::prime(7));
  CHECK_NOTHROW(Field::prime(2147483647)); // 2^31 - 1
  CHECK_THROWS_AS(Field::prime(6), Error);
  CHECK_THROWS_AS(Field::prime(1), Error);
  CHECK(is_prime_u32(2));
  CHECK(!is_prime_u32(0));
  CHECK(!is_prime_u32(3599)); // 59 * 61
}

TEST_CASE("rationals stay reduced with positive denominator") {
  Field q = Field::rationals();
  Scalar a = Scalar::from_fraction(q, 4, -6);
  CHECK(a.to_string() == "-2/3");
  Scalar b = Scalar::from_fraction(q, 1, 3);
  CHECK((a + b).to_string() == "-1/3");
  CHECK((a * b).to_string() == "-2/9");
  CHECK((a / a).is_one());
}

TEST_CASE("modular residues reduced into [0,p)") {
  Field f5 = Field::prime(5);
  Scalar a = Scalar::from_int(f5, -3);
  CHECK(a.to_string() == "2");
  CHECK((a + Scalar::from_int(f5, 3)).is_zero());
  CHECK((Scalar::from_int(f5, 2).inverse().to_string()) == "3");
}

TEST_CASE("field axioms hold on random samples") {
  for (Field f : {Field::rationals(), Field::prime(5), Field::prime(2147483629)}) {
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
      Scalar a = rnd_scalar(rng, f), b = rnd_scalar(rng, f), c = rnd_scalar(rng, f);
      CHECK((a + b) + c == a + (b + c));
      CHECK((a * b) * c == a * (b * c));
      CHECK(a + b == b + a);
      CHECK(a * b == b * a);
      CHECK(a * (b + c) == a * b + a * c);
      CHECK(a + Scalar::zero(f) == a);
      CHECK(a * Scalar::one(f) == a);
      CHECK((a - a).is_zero());
      if (!a.is_zero()) CHECK((a * a.inverse()).is_one());
    }
  }
}

TEST_CASE("polynomial arithmetic and structural equality") {
  Field q = Field::rationals();
  std::vector<std::string> vars{"X1", "Y1"};
  Polynomial x = Polynomial::variable(q, 2, 0);
  Polynomial y = Polynomial::variable(q, 2, 1);
  Polynomial p = x * x + y.scaled(Scalar::from_int(q, 2));
  CHECK(p.to_string(vars) == "X1^2 + 2*Y1");
  CHECK(p - p == Polynomial::zero(q, 2));
  CHECK((x + y) * (x - y) == x * x - y * y);
  CHECK(p.total_degree() == 2);
  CHECK(p.degree_in(1) == 1);
}

TEST_CASE("parser round-trips the shared syntax") {
  Field q = Field::rationals();
  std::vector<std::string> vars{"X1", "X2", "Y1"};
  for (const char* text : {"X1^2 + 2*Y1", "-3/2*X1*X2 + Y1 - 1", "0", "1", "X1*X1 - X1^2"}) {
    Polynomial p = parse_polynomial(text, q, vars);
    Polynomial again = parse_polynomial(p.to_string(vars), q, vars);
    CHECK(p == again);
  }
  CHECK(parse_polynomial("X1*X1 - X1^2", q, vars).is_zero());
  CHECK_THROWS_AS(parse_polynomial("W3", q, vars), Error);
  CHECK_THROWS_AS(parse_polynomial("t + 1", q, vars), Error);
  Field f7 = Field::prime(7);
  CHECK(parse_polynomial("10*Y1", f7, vars).to_string(vars) == "3*Y1");
  CHECK(parse_polynomial("1/2", f7, vars).to_string(vars) == "4");
}

TEST_CASE("monomial orders are total and multiplicative") {
  MonomialOrder drl = MonomialOrder::degrevlex();
  // X1^2 > X1*Y1 > Y1^2 under degrevlex with slot priority
  Expvec a{2, 0}, b{1, 1}, c{0, 2}, one{0, 0};
  CHECK(drl.greater(a, b));
  CHECK(drl.greater(b, c));
  CHECK(drl.greater(c, one));
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    Expvec u{int(rng.below(4)), int(rng.below(4)), int(rng.below(4))};
    Expvec v{int(rng.below(4)), int(rng.below(4)), int(rng.below(4))};
    Expvec w{int(rng.below(4)), int(rng.below(4)), int(rng.below(4))};
    int c1 = drl.cmp(u, v);
    CHECK(c1 == -drl.cmp(v, u));
    if (c1 > 0) CHECK(drl.cmp(expvec_add(u, w), expvec_add(v, w)) > 0);
    if (u != v) CHECK(c1 != 0);
  }
  // elimination block dominates everything else
  MonomialOrder elim = MonomialOrder::eliminate({2}, 3);
  CHECK(elim.greater(Expvec{0, 0, 1}, Expvec{9, 9, 0}));
}

TEST_CASE("exact division") {
  Field q = Field::rationals();
  std::vector<std::string> vars{"X1", "Y1"};
  Polynomial a = parse_polynomial("X1^2 - Y1^2", q, vars);
  Polynomial d = parse_polynomial("X1 - Y1", q, vars);
  auto quo = a.divexact(d);
  REQUIRE(quo.has_value());
  CHECK(*quo == parse_polynomial("X1 + Y1", q, vars));
  CHECK(!parse_polynomial("X1^2 + 1", q, vars).divexact(d).has_value());
}

TEST_CASE("substitution and partial evaluation") {
  Field q = Field::rationals();
  std::vector<std::string> vars{"Y1", "Y2"};
  Polynomial p = parse_polynomial("Y2 - 3", q, vars);
  std::map<int, Polynomial> shift{{1, parse_polynomial("Y2 + 3", q, vars)}};
  CHECK(p.substitute(shift) == parse_polynomial("Y2", q, vars));
  Polynomial r = parse_polynomial("Y1^2*Y2 + Y1", q, vars);
  Polynomial at = r.eval_partial({{0, Scalar::from_int(q, 2)}});
  CHECK(at == parse_polynomial("4*Y2 + 2", q, vars));
}

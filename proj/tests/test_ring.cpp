#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fiber.hpp"
#include "ring.hpp"
#include "rng.hpp"

using namespace unimod;

namespace {

const Config CFG{};

RingPtr laurent_q() {
  RingSpec s;
  s.field = Field::rationals();
  s.y_vars = {"Y1"};
  s.pairs = {{"T", "Y1"}};
  s.starred = true;
  return make_ring(s);
}

RingPtr sphere_ring() {
  RingSpec s;
  s.field = Field::rationals();
  s.base_vars = {"X", "Y", "Z"};
  s.base_inverted_text = {"X^2 + Y^2 + Z^2"};
  return make_ring(s);
}

RingElement rnd_elem(Rng& rng, const RingPtr& R) {
  Polynomial num(R->field, R->nvars());
  for (int t = 0; t < 3; ++t) {
    Expvec e(R->nvars(), 0);
    for (int v = 0; v < R->nvars(); ++v) e[v] = int(rng.below(3));
    num.add_term(e, Scalar::from_int(R->field, rng.range(-4, 4)));
  }
  Expvec den(R->slot_count(), 0);
  for (int s = 0; s < R->slot_count(); ++s) den[s] = int(rng.below(2));
  return RingElement(R, num, den);
}

} // namespace

TEST_CASE("ring construction: Laurent, plain polynomial, invalid forms") {
  RingPtr L = laurent_q();
  CHECK(L->n() == 1);
  CHECK(L->pairs[0].slot_poly == Polynomial::variable(L->field, 1, 0));

  RingSpec plain;
  plain.field = Field::rationals();
  plain.base_vars = {"X1", "X2", "X3"};
  RingPtr P = make_ring(plain);
  CHECK(P->slot_count() == 0);
  CHECK(P->dim_bound() == 3);

  RingSpec bad;
  bad.field = Field::rationals();
  bad.y_vars = {"Y1", "Y2"};
  bad.pairs = {{"T", "0*Y1 + 0*Y2 - 1"}};
  CHECK_THROWS_AS(make_ring(bad), Error);

  RingSpec dup;
  dup.field = Field::rationals();
  dup.base_vars = {"X1", "X1"};
  CHECK_THROWS_AS(make_ring(dup), Error);

  RingSpec zerof;
  zerof.field = Field::rationals();
  zerof.y_vars = {"Y1"};
  zerof.pairs = {{"0", "Y1"}};
  CHECK_THROWS_AS(make_ring(zerof), Error);
}

TEST_CASE("ring element arithmetic satisfies ring axioms") {
  RingPtr R = laurent_q();
  Rng rng(5);
  for (int i = 0; i < 60; ++i) {
    RingElement a = rnd_elem(rng, R), b = rnd_elem(rng, R), c = rnd_elem(rng, R);
    CHECK(((a + b) + c).equals(a + (b + c)));
    CHECK(((a * b) * c).equals(a * (b * c)));
    CHECK((a * (b + c)).equals(a * b + a * c));
    CHECK((a + b).equals(b + a));
    CHECK((a - a).is_zero());
    CHECK((a * RingElement::one(R)).equals(a));
    // equality is consistent with arithmetic
    if (a.equals(b)) {
      CHECK((a + c).equals(b + c));
      CHECK((a * c).equals(b * c));
    }
  }
}

TEST_CASE("element text round trip") {
  RingPtr R = laurent_q();
  RingElement x = parse_ring_element("Y1^2 + 1 / (Y1)^2", R);
  CHECK(x.den()[0] == 2);
  RingElement y = parse_ring_element(x.to_string(), R);
  CHECK(x.equals(y));
  // denominator must be an inverted element
  CHECK_THROWS_AS(parse_ring_element("1 / (Y1 + 1)", R), Error);
}

TEST_CASE("units: inverted elements, localized sums, and non-units") {
  RingPtr R = laurent_q();
  // f_1(l_1) = Y1 is a unit with exponent-1 inverse
  UnitResult u = is_unit(RingElement::from_poly(R, R->pairs[0].slot_poly), CFG);
  REQUIRE(u.status == Status::Ok);
  CHECK(u.inverse.den()[R->pair_slot(0)] == 1);

  RingPtr S = sphere_ring();
  std::vector<std::string> v = S->var_names;
  RingElement s = RingElement::from_poly(S, parse_polynomial("X^2 + Y^2 + Z^2", S->field, v));
  UnitResult us = is_unit(s, CFG);
  CHECK(us.status == Status::Ok);
  CHECK((s * us.inverse).is_one());

  RingSpec qx;
  qx.field = Field::rationals();
  qx.base_vars = {"X"};
  RingPtr QX = make_ring(qx);
  RingElement x = RingElement::from_poly(QX, Polynomial::variable(QX->field, 1, 0));
  CHECK(is_unit(x, CFG).status == Status::NotUnit);
  CHECK(is_unit(RingElement::zero(QX), CFG).status == Status::NotUnit);
}

TEST_CASE("every built ring passes the unit check on its inverted pairs") {
  RingSpec s;
  s.field = Field::prime(7);
  s.y_vars = {"Y1", "Y2"};
  s.pairs = {{"T^2 + 1", "Y1 + 2*Y2 - 3"}, {"T", "Y2"}};
  s.starred = true;
  RingPtr R = make_ring(s);
  for (int i = 0; i < R->n(); ++i) {
    UnitResult u = is_unit(RingElement::from_poly(R, R->pairs[i].slot_poly), CFG);
    CHECK(u.status == Status::Ok);
  }
}

TEST_CASE("normalize_linear_form: identity, scale, the (1,2) example, translation") {
  Field Q = Field::rationals();
  // identity case: l = Y2 already
  {
    RingSpec s;
    s.field = Q;
    s.y_vars = {"Y1", "Y2"};
    s.pairs = {{"T", "Y2"}};
    s.starred = true;
    NormalizeResult nr = normalize_linear_form(make_ring(s), 0);
    CHECK(nr.theta.empty());
    CHECK(nr.chain.steps.size() == 1); // explicit identity
  }
  // coefficient vector (1, 2): word E21(-1), E12(-1)
  {
    RingSpec s;
    s.field = Q;
    s.y_vars = {"Y1", "Y2"};
    s.pairs = {{"T", "Y1 + 2*Y2"}};
    s.starred = true;
    RingPtr R = make_ring(s);
    NormalizeResult nr = normalize_linear_form(R, 0);
    REQUIRE(nr.theta.size() == 2);
    CHECK(nr.theta[0].i == 1);
    CHECK(nr.theta[0].j == 0);
    CHECK(nr.theta[0].lambda == Scalar::from_int(Q, -1));
    CHECK(nr.theta[1].i == 0);
    CHECK(nr.theta[1].j == 1);
    CHECK(nr.theta[1].lambda == Scalar::from_int(Q, -1));
    // theta applied to l = Y1 + 2*Y2 gives Y2
    RingElement l = RingElement::from_poly(R, parse_polynomial("Y1 + 2*Y2", Q, R->var_names));
    RingElement img = nr.chain.fwd(l);
    CHECK(img.equals(RingElement::from_poly(nr.chain.to(),
        parse_polynomial("Y2", Q, R->var_names))));
  }
  // translation: l = Y2 - 3 becomes Y2
  {
    RingSpec s;
    s.field = Q;
    s.y_vars = {"Y1", "Y2"};
    s.pairs = {{"T", "Y2 - 3"}};
    s.starred = true;
    RingPtr R = make_ring(s);
    NormalizeResult nr = normalize_linear_form(R, 0);
    RingElement l = RingElement::from_poly(R, parse_polynomial("Y2 - 3", Q, R->var_names));
    CHECK(nr.chain.fwd(l).equals(RingElement::from_poly(nr.chain.to(),
        parse_polynomial("Y2", Q, R->var_names))));
    // substitution example: Y2 -> Y2 + 3 applied to Y2 - 3 yields Y2 (forward map)
  }
}

TEST_CASE("normalize round trip is the identity on random elements") {
  RingSpec s;
  s.field = Field::prime(5);
  s.y_vars = {"Y1", "Y2", "Y3"};
  s.pairs = {{"T^2 + 2", "Y1 + 3*Y2 + Y3 - 1"}};
  s.starred = true;
  RingPtr R = make_ring(s);
  NormalizeResult nr = normalize_linear_form(R, 0);
  Rng rng(77);
  for (int i = 0; i < 100; ++i) {
    RingElement x = rnd_elem(rng, R);
    RingElement back = nr.chain.inv(nr.chain.fwd(x));
    CHECK(back.equals(x));
  }
}

TEST_CASE("localize: trivial element, new denominators, membership confirmation") {
  Field Q = Field::rationals();
  RingSpec s;
  s.field = Q;
  s.base_vars = {"Y"};
  RingPtr R = make_ring(s);
  Localization l1 = localize(R, Polynomial::one(Q, 1));
  CHECK(l1.to->slot_count() == 1);
  CHECK(l1.inject(RingElement::from_poly(R, Polynomial::variable(Q, 1, 0)))
            .equals(RingElement::from_poly(l1.to, Polynomial::variable(Q, 1, 0))));

  Localization l2 = localize(R, parse_polynomial("Y^2 + 1", Q, {"Y"}));
  RingElement u = RingElement::from_poly(l2.to, parse_polynomial("Y^2 + 1", Q, {"Y"}));
  CHECK(is_unit(u, CFG).status == Status::Ok);

  // Laurent ring localized further: 1 + Y*h with h = Y
  RingPtr L = laurent_q();
  Localization l3 = localize(L, parse_polynomial("1 + Y1^2", Q, {"Y1"}));
  RingElement w = RingElement::from_poly(l3.to, parse_polynomial("1 + Y1^2", Q, {"Y1"}));
  CHECK(is_unit(w, CFG).status == Status::Ok);
  CHECK_THROWS_AS(localize(L, Polynomial::zero(Q, 1)), Error);
}

TEST_CASE("unwrap reclassifies the pivot variable") {
  RingSpec s;
  s.field = Field::rationals();
  s.y_vars = {"Y1", "Y2"};
  s.pairs = {{"T^2 + 1", "Y2"}};
  s.starred = true;
  RingPtr R = make_ring(s);
  Unwrap uw = unwrap_pair(R, 0);
  CHECK(uw.to->m() == 1);
  CHECK(uw.to->n() == 0);
  CHECK(uw.to->base_inverted.size() == 1);
  Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    RingElement x = rnd_elem(rng, R);
    CHECK(uw.back(uw.transport(x)).equals(x));
  }
}

TEST_CASE("transport by slots between localizations of one ring") {
  Field Q = Field::rationals();
  RingSpec s;
  s.field = Q;
  s.base_vars = {"X"};
  RingPtr C = make_ring(s);
  FiberSquare sq = make_square(C, parse_polynomial("X", Q, {"X"}),
                               parse_polynomial("X + 1", Q, {"X"}));
  RingElement a = RingElement::slot_inverse(sq.Cf, sq.f_slot_cf);
  RingElement b = transport_by_slots_strict(a, sq.Cfg);
  CHECK(b.den()[sq.f_slot_cfg] == 1);
  CHECK(!transport_by_slots(b, sq.Cg).has_value());
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "groebner.hpp"
#include "rng.hpp"

using namespace unimod;

namespace {

const Field Q = Field::rationals();
const std::vector<std::string> YV{"Y1", "Y2"};

Polynomial P(const std::string& s) { return parse_polynomial(s, Q, YV); }

Polynomial rnd_poly(Rng& rng, const Field& f, int nvars, int maxdeg, int nterms) {
  Polynomial p(f, nvars);
  for (int t = 0; t < nterms; ++t) {
    Expvec e(nvars, 0);
    for (int v = 0; v < nvars; ++v) e[v] = int(rng.below(maxdeg + 1));
    long long c = rng.range(-5, 5);
    p.add_term(e, Scalar::from_int(f, c));
  }
  return p;
}

} // namespace

TEST_CASE("groebner basis of unit and zero ideals") {
  MonomialOrder ord = MonomialOrder::degrevlex();
  auto unit = groebner_basis({P("1")}, ord);
  REQUIRE(unit.size() == 1);
  CHECK(unit[0].is_one());
  CHECK(groebner_basis({}, ord).empty());
  CHECK(groebner_basis({P("0")}, ord).empty());
}

TEST_CASE("hand Buchberger: single S-polynomial reduces to zero") {
  // gens [Y1^2, Y1*Y2]: lcm Y1^2*Y2, S = Y2*Y1^2 - Y1*(Y1*Y2) = 0,
  // so the pair contributes nothing and the set is already reduced.
  MonomialOrder ord = MonomialOrder::degrevlex();
  auto gb = groebner_basis({P("Y1^2"), P("Y1*Y2")}, ord);
  REQUIRE(gb.size() == 2);
  CHECK(gb[0] == P("Y1^2"));
  CHECK(gb[1] == P("Y1*Y2"));
}

TEST_CASE("groebner idempotence") {
  MonomialOrder ord = MonomialOrder::degrevlex();
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Polynomial> gens;
    for (int i = 0; i < 3; ++i) gens.push_back(rnd_poly(rng, Q, 2, 2, 3));
    auto g1 = groebner_basis(gens, ord);
    auto g2 = groebner_basis(g1, ord);
    CHECK(g1 == g2);
  }
}

TEST_CASE("normal form examples") {
  MonomialOrder ord = MonomialOrder::degrevlex();
  CHECK(normal_form(P("Y1^2 + Y2"), {P("Y1^2")}, ord) == P("Y2"));
  CHECK(normal_form(P("0"), {P("Y1^2")}, ord).is_zero());
  CHECK(normal_form(P("Y2"), {P("Y1")}, ord) == P("Y2"));
  // re-expansion check for the first example
  auto dr = divide(P("Y1^2 + Y2"), {P("Y1^2")}, ord);
  CHECK(dr.quotients[0] * P("Y1^2") + dr.remainder == P("Y1^2 + Y2"));
  // non-autoreduced basis rejected
  CHECK_THROWS_AS(normal_form(P("Y1"), {P("Y1^2"), P("Y1^2 + Y2")}, ord), Error);
}

TEST_CASE("normal form idempotence and soundness on random input") {
  MonomialOrder ord = MonomialOrder::degrevlex();
  Rng rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Polynomial> gens{rnd_poly(rng, Q, 2, 2, 3), rnd_poly(rng, Q, 2, 2, 3)};
    auto gb = groebner_basis(gens, ord);
    Polynomial p = rnd_poly(rng, Q, 2, 3, 4);
    Polynomial nf = gb.empty() ? p : normal_form(p, gb, ord);
    if (!gb.empty()) CHECK(normal_form(nf, gb, ord) == nf);
    // p - nf always has a membership certificate against the basis
    auto cert = membership_certificate(p - nf, gb);
    REQUIRE(cert.has_value());
    CHECK(cert->replays(p - nf, gb));
  }
}

TEST_CASE("membership certificates") {
  // telescoping identity: 1 = 1*Y - 1*(Y - 1)
  std::vector<std::string> yv{"Y"};
  auto PY = [&](const std::string& s) { return parse_polynomial(s, Q, yv); };
  auto cert = membership_certificate(PY("1"), {PY("Y"), PY("Y - 1")});
  REQUIRE(cert.has_value());
  CHECK(cert->replays(PY("1"), {PY("Y"), PY("Y - 1")}));

  auto c2 = membership_certificate(P("Y1*Y2"), {P("Y1")});
  REQUIRE(c2.has_value());
  CHECK(c2->cofactors[0] == P("Y2"));

  CHECK(!membership_certificate(P("1"), {P("Y1"), P("Y2")}).has_value());
}

TEST_CASE("saturation membership") {
  std::vector<std::string> xy{"X", "Y"};
  auto PXY = [&](const std::string& s) { return parse_polynomial(s, Q, xy); };

  // 1 against (X^2, X*Y) inverting X: X^2*1 lies in the ideal at e = 2
  auto r = saturation_membership(PXY("1"), {PXY("X^2"), PXY("X*Y")}, PXY("X"), 64);
  REQUIRE(r.kind == SaturationKind::Member);
  CHECK(r.cert.exponent == 2);
  CHECK(r.cert.replays(PXY("1"), {PXY("X^2"), PXY("X*Y")}));

  auto r0 = saturation_membership(PXY("1"), {PXY("1")}, PXY("X + Y"), 64);
  REQUIRE(r0.kind == SaturationKind::Member);
  CHECK(r0.cert.exponent == 0);

  auto rn = saturation_membership(PXY("1"), {PXY("Y")}, PXY("X"), 64);
  CHECK(rn.kind == SaturationKind::NotMember);

  // bound exceeded is distinct from NotMember
  auto rb = saturation_membership(PXY("1"), {PXY("X^3")}, PXY("X"), 2);
  CHECK(rb.kind == SaturationKind::BoundExceeded);
}

TEST_CASE("certificate replay on random member targets") {
  Rng rng(37);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<Polynomial> gens{rnd_poly(rng, Q, 2, 2, 2), rnd_poly(rng, Q, 2, 2, 2)};
    Polynomial a = rnd_poly(rng, Q, 2, 1, 2), b = rnd_poly(rng, Q, 2, 1, 2);
    Polynomial target = a * gens[0] + b * gens[1];
    auto cert = membership_certificate(target, gens);
    REQUIRE(cert.has_value());
    CHECK(cert->replays(target, gens));
  }
}

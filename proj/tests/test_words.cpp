#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rng.hpp"
#include "unimodular.hpp"

using namespace unimod;

namespace {

const Config CFG{};

RingPtr f7_plane() {
  RingSpec s;
  s.field = Field::prime(7);
  s.y_vars = {"Y1", "Y2"};
  return make_ring(s);
}

ElementaryWord random_word(Rng& rng, const RingPtr& R, int size, int len, int maxdeg) {
  ElementaryWord w;
  w.size = size;
  for (int k = 0; k < len; ++k) {
    int i = int(rng.below(size));
    int j = int(rng.below(size));
    if (i == j) j = (j + 1) % size;
    Polynomial p(R->field, R->nvars());
    Expvec e(R->nvars(), 0);
    for (int v = 0; v < R->nvars(); ++v) e[v] = int(rng.below(maxdeg + 1));
    p.add_term(e, Scalar::from_int(R->field, rng.range(1, 4)));
    w.gens.push_back({i, j, RingElement::from_poly(R, p), std::nullopt});
  }
  return w;
}

} // namespace

TEST_CASE("apply_word matches the matrix action") {
  RingPtr R = f7_plane();
  Rng rng(11);
  for (int rep = 0; rep < 25; ++rep) {
    ElementaryWord w = random_word(rng, R, 3, 5, 2);
    RVector v;
    for (int i = 0; i < 3; ++i)
      v.push_back(RingElement::from_scalar(R, Scalar::from_int(R->field, rng.range(0, 6))));
    RVector a = apply_word(w, v);
    RVector b = word_matrix(w, R) * v;
    for (int i = 0; i < 3; ++i) CHECK(a[i].equals(b[i]));
    // inverse word really inverts
    RVector back = apply_word(inverse_word(w), a);
    for (int i = 0; i < 3; ++i) CHECK(back[i].equals(v[i]));
  }
}

TEST_CASE("identity word and single-generator examples") {
  RingPtr R = f7_plane();
  ElementaryWord id;
  id.size = 2;
  RVector v{RingElement::from_poly(R, Polynomial::variable(R->field, 2, 0)),
            RingElement::one(R)};
  RVector img = apply_word(id, v);
  CHECK(img[0].equals(v[0]));

  // [E12(-Y)] on (Y+1, 1) gives (1, 1)
  RingSpec s;
  s.field = Field::rationals();
  s.base_vars = {"Y"};
  RingPtr QY = make_ring(s);
  ElementaryWord w;
  w.size = 2;
  w.gens.push_back({0, 1, -RingElement::from_poly(QY, Polynomial::variable(QY->field, 1, 0)),
                    std::nullopt});
  RVector u{parse_ring_element("Y + 1", QY), RingElement::one(QY)};
  RVector r = apply_word(w, u);
  CHECK(r[0].is_one());
  CHECK(r[1].is_one());
}

TEST_CASE("every elementary word has determinant one") {
  RingPtr R = f7_plane();
  Rng rng(23);
  for (int size : {2, 3, 4}) {
    for (int rep = 0; rep < 10; ++rep) {
      ElementaryWord w = random_word(rng, R, size, 6, 2);
      CHECK(word_matrix(w, R).det().is_one());
    }
  }
}

TEST_CASE("matrix inverse by adjugate") {
  RingPtr R = f7_plane();
  Rng rng(31);
  ElementaryWord w = random_word(rng, R, 3, 6, 1);
  RMatrix m = word_matrix(w, R);
  auto inv = m.inverse(CFG);
  REQUIRE(inv.has_value());
  CHECK((m * *inv).is_identity());
}

TEST_CASE("unimodularity: trivial, localized sphere, and a refutation") {
  RingPtr R = f7_plane();
  RVector e{RingElement::one(R), RingElement::zero(R)};
  UnimodularCheck c = is_unimodular(e, CFG);
  REQUIRE(c.status == Status::Ok);
  CHECK(c.cofactors[0].is_one());

  RingSpec sp;
  sp.field = Field::rationals();
  sp.base_vars = {"X", "Y", "Z"};
  sp.base_inverted_text = {"X^2 + Y^2 + Z^2"};
  RingPtr S = make_ring(sp);
  RVector xyz{parse_ring_element("X", S), parse_ring_element("Y", S),
              parse_ring_element("Z", S)};
  UnimodularCheck cs = is_unimodular(xyz, CFG);
  REQUIRE(cs.status == Status::Ok);
  // the certificate is (X, Y, Z) scaled by the inverse of the inverted unit
  CHECK(cs.poly_cert.exponent == 1);
  CHECK(cs.poly_cert.cofactors[0] == parse_polynomial("X", S->field, S->var_names));

  RingSpec qq;
  qq.field = Field::rationals();
  qq.base_vars = {"X", "Y"};
  RingPtr Q2 = make_ring(qq);
  RVector xy{parse_ring_element("X", Q2), parse_ring_element("Y", Q2)};
  CHECK(is_unimodular(xy, CFG).status == Status::NotUnimodular);
}

TEST_CASE("certificate transforms functorially along words") {
  RingPtr R = f7_plane();
  Rng rng(41);
  RVector v{parse_ring_element("Y1", R), parse_ring_element("Y2", R),
            parse_ring_element("1 + Y1*Y2", R)};
  UnimodularCheck c = is_unimodular(v, CFG);
  REQUIRE(c.status == Status::Ok);
  for (int rep = 0; rep < 10; ++rep) {
    ElementaryWord w = random_word(rng, R, 3, 4, 1);
    RVector v2 = apply_word(w, v);
    RVector c2 = transform_cofactors(c.cofactors, w);
    RingElement acc = RingElement::zero(R);
    for (int i = 0; i < 3; ++i) acc = acc + c2[i] * v2[i];
    CHECK(acc.is_one());
  }
}

TEST_CASE("complete_to_matrix: identity and the F7 example") {
  RingPtr R = f7_plane();
  RVector e1{RingElement::one(R), RingElement::zero(R), RingElement::zero(R)};
  ElementaryWord empty;
  empty.size = 3;
  RMatrix id = complete_to_matrix(e1, empty);
  CHECK(id.is_identity());
}

TEST_CASE("relative word validation") {
  RingPtr R = f7_plane();
  RingElement s = parse_ring_element("Y1", R);
  ElementaryWord w;
  w.size = 3;
  w.tag = s;
  RingElement q = parse_ring_element("Y2", R);
  w.gens.push_back({0, 1, s * q, q});              // Delta with witness
  w.gens.push_back({2, 0, parse_ring_element("Y2^3", R), std::nullopt}); // Gamma free
  CHECK_NOTHROW(validate_word(w, R));
  // inner generator in a tagged word is rejected
  ElementaryWord bad = w;
  bad.gens.push_back({1, 2, parse_ring_element("1", R), std::nullopt});
  CHECK_THROWS_AS(validate_word(bad, R), Error);
  // wrong witness is rejected
  ElementaryWord bad2 = w;
  bad2.gens[0].tag_quotient = parse_ring_element("Y2 + 1", R);
  CHECK_THROWS_AS(validate_word(bad2, R), Error);
}

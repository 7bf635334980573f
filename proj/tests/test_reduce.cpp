#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rng.hpp"

using namespace unimod;
using unimod::testing::euclid_oracle;
using unimod::testing::replays_to_e1;

namespace {

const Config CFG{};

RingPtr ring_qy() {
  RingSpec s;
  s.field = Field::rationals();
  s.base_vars = {"Y"};
  return make_ring(s);
}

RingPtr ring_f7_plane() {
  RingSpec s;
  s.field = Field::prime(7);
  s.y_vars = {"Y1", "Y2"};
  return make_ring(s);
}

RingPtr ring_laurent() {
  RingSpec s;
  s.field = Field::rationals();
  s.y_vars = {"Y1"};
  s.pairs = {{"T", "Y1"}};
  s.starred = true;
  return make_ring(s);
}

RingPtr ring_sum_inverted() {
  RingSpec s;
  s.field = Field::rationals();
  s.y_vars = {"Y1", "Y2"};
  s.pairs = {{"T", "Y1 + Y2"}};
  s.starred = true;
  return make_ring(s);
}

ElementaryWord random_epsilon(Rng& rng, const RingPtr& R, int size, int len,
                              int maxdeg) {
  ElementaryWord w;
  w.size = size;
  for (int k = 0; k < len; ++k) {
    int i = int(rng.below(size));
    int j = int(rng.below(size));
    if (i == j) j = (j + 1) % size;
    Polynomial p(R->field, R->nvars());
    Expvec e(R->nvars(), 0);
    int budget = maxdeg;
    for (int v = 0; v < R->nvars(); ++v) {
      e[v] = int(rng.below(budget + 1));
      budget -= e[v];
    }
    long long c =
        R->field.kind == Field::Kind::Q ? rng.range(-2, 2) : rng.range(0, R->field.p - 1);
    if (c == 0) c = 1;
    p.add_term(e, Scalar::from_int(R->field, c));
    w.gens.push_back({i, j, RingElement::from_poly(R, p), std::nullopt});
  }
  return w;
}

RVector orbit_vector(Rng& rng, const RingPtr& R, int size, int len, int maxdeg) {
  ElementaryWord eps = random_epsilon(rng, R, size, len, maxdeg);
  return apply_inverse(eps, unit_vector(R, size, 0));
}

} // namespace

TEST_CASE("unit pivot clears a row with a leading one") {
  RingPtr R = ring_f7_plane();
  RVector v{RingElement::one(R), parse_ring_element("Y1", R),
            parse_ring_element("Y2^2 + 3", R)};
  ReduceResult res = reduce_to_e1(v, Strategy::UnitPivot, CFG);
  REQUIRE(res.status == Status::Ok);
  CHECK(replays_to_e1(res.word, v));
  // word shape: gamma generators only
  for (const auto& g : res.word.gens) CHECK(g.j == 0);
}

TEST_CASE("pid strategy: the (Y, Y+2) example and oracle agreement") {
  RingPtr R = ring_qy();
  RVector v{parse_ring_element("Y", R), parse_ring_element("Y + 2", R)};
  ReduceResult res = reduce_to_e1(v, Strategy::Pid, CFG);
  REQUIRE(res.status == Status::Ok);
  CHECK(replays_to_e1(res.word, v));
  auto oracle = euclid_oracle(v, CFG);
  REQUIRE(oracle.has_value());
  CHECK(replays_to_e1(*oracle, v));
}

TEST_CASE("pid rejects multivariate rings") {
  RingPtr R = ring_f7_plane();
  RVector v{RingElement::one(R), parse_ring_element("Y1", R)};
  ReduceResult res = reduce_to_e1(v, Strategy::Pid, CFG);
  CHECK(res.status == Status::StrategyInapplicable);
}

TEST_CASE("not unimodular is a sound negative") {
  RingSpec s;
  s.field = Field::rationals();
  s.base_vars = {"X", "Y"};
  RingPtr R = make_ring(s);
  RVector v{parse_ring_element("X", R), parse_ring_element("Y", R)};
  ReduceResult res = reduce_to_e1(v, Strategy::Auto, CFG);
  CHECK(res.status == Status::NotUnimodular);
}

TEST_CASE("stable range solves (Y1, Y2, 1 + Y1*Y2) over F7") {
  RingPtr R = ring_f7_plane();
  RVector v{parse_ring_element("Y1", R), parse_ring_element("Y2", R),
            parse_ring_element("1 + Y1*Y2", R)};
  ReduceResult res = reduce_to_e1(v, Strategy::Auto, CFG);
  REQUIRE(res.status == Status::Ok);
  CHECK(replays_to_e1(res.word, v));
}

TEST_CASE("stable range honors its documented threshold when called directly") {
  RingSpec s;
  s.field = Field::rationals();
  s.base_vars = {"X", "Y", "Z"};
  s.base_inverted_text = {"X^2 + Y^2 + Z^2"};
  RingPtr R = make_ring(s);
  RVector v{parse_ring_element("X", R), parse_ring_element("Y", R),
            parse_ring_element("Z", R)};
  ReduceResult res = reduce_to_e1(v, Strategy::StableRange, CFG);
  CHECK(res.status == Status::StrategyInapplicable); // r = 3 < d + 2 = 5
  ReduceResult res2 = reduce_to_e1(v, Strategy::Auto, CFG);
  CHECK(res2.status != Status::Ok); // never certified on the sphere example
}

TEST_CASE("recursive pipeline: Laurent example (Y1, 1 - Y1)") {
  RingPtr R = ring_laurent();
  RVector v{parse_ring_element("Y1", R), parse_ring_element("1 - Y1", R)};
  ReduceResult res = reduce_to_e1(v, Strategy::Recursive, CFG);
  REQUIRE(res.status == Status::Ok);
  CHECK(replays_to_e1(res.word, v));
  // agreement with pid on the same input: both words act as e_1
  ReduceResult pid = reduce_to_e1(v, Strategy::Pid, CFG);
  REQUIRE(pid.status == Status::Ok);
  CHECK(replays_to_e1(pid.word, v));
}

TEST_CASE("recursive pipeline: construct-then-solve over Q[Y1,Y2,(Y1+Y2)^-1]") {
  RingPtr R = ring_sum_inverted();
  Rng rng(2024);
  int ran = 0;
  for (int rep = 0; rep < 8; ++rep) {
    RVector v = orbit_vector(rng, R, 3, 3, 1);
    ReduceResult res = reduce_to_e1(v, Strategy::Recursive, CFG);
    if (res.status != Status::Ok) {
      // the pipeline must succeed on these instances
      CAPTURE(res.message);
      REQUIRE(res.status == Status::Ok);
    }
    CHECK(replays_to_e1(res.word, v));
    ++ran;
  }
  CHECK(ran == 8);
}

TEST_CASE("recursive strategy requires a starred ring") {
  RingSpec s;
  s.field = Field::rationals();
  s.base_vars = {"X"};
  s.y_vars = {"Y1"};
  s.pairs = {{"T^2 + X", "Y1"}}; // f has a base coefficient: not starred
  s.starred = false;
  RingPtr R = make_ring(s);
  RVector v{RingElement::one(R), parse_ring_element("Y1", R)};
  ReduceResult res = reduce_to_e1(v, Strategy::Recursive, CFG);
  CHECK(res.status == Status::StrategyInapplicable);
}

TEST_CASE("tagged reduction keeps delta parameters in the ideal") {
  RingPtr R = ring_f7_plane();
  RingElement s = parse_ring_element("Y1", R);
  // v in Um^1 with head congruent to 1 mod (s)
  RVector v{parse_ring_element("1 + Y1", R), parse_ring_element("Y2", R),
            parse_ring_element("1 + Y1*Y2", R)};
  ReduceResult res = reduce_to_e1(v, Strategy::Auto, CFG, s);
  REQUIRE(res.status == Status::Ok);
  CHECK(res.word.tagged());
  CHECK_NOTHROW(validate_word(res.word, R));
  CHECK(replays_to_e1(res.word, v));
  // violated precondition is reported
  RVector bad{parse_ring_element("Y2", R), parse_ring_element("Y1", R),
              parse_ring_element("1 + Y1*Y2", R)};
  ReduceResult rb = reduce_to_e1(bad, Strategy::Auto, CFG, s);
  CHECK(rb.status == Status::TagPreconditionFailed);
}

TEST_CASE("construct-then-solve closure over assorted rings") {
  struct Case {
    RingPtr R;
    int size;
  };
  std::vector<Case> cases;
  cases.push_back({ring_f7_plane(), 3});
  cases.push_back({ring_laurent(), 2});
  cases.push_back({ring_sum_inverted(), 3});
  {
    RingSpec s;
    s.field = Field::prime(5);
    s.y_vars = {"Y1"};
    s.pairs = {{"T^2 + 1", "Y1"}};
    s.starred = true;
    cases.push_back({make_ring(s), 3});
  }
  Rng rng(99);
  int total = 0;
  for (const auto& c : cases) {
    for (int rep = 0; rep < 50; ++rep) {
      RVector v = orbit_vector(rng, c.R, c.size, 3, 2);
      ReduceResult res = reduce_to_e1(v, Strategy::Auto, CFG);
      REQUIRE(res.status == Status::Ok);
      CHECK(replays_to_e1(res.word, v));
      ++total;
    }
  }
  CHECK(total == 200);
}

TEST_CASE("strategy agreement where pid and recursive both apply") {
  RingPtr R = ring_laurent();
  Rng rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    RVector v = orbit_vector(rng, R, 2, 3, 1);
    ReduceResult a = reduce_to_e1(v, Strategy::Pid, CFG);
    ReduceResult b = reduce_to_e1(v, Strategy::Recursive, CFG);
    REQUIRE(a.status == Status::Ok);
    REQUIRE(b.status == Status::Ok);
    CHECK(replays_to_e1(a.word, v));
    CHECK(replays_to_e1(b.word, v));
  }
}

TEST_CASE("completion has first column v and determinant one") {
  RingPtr R = ring_f7_plane();
  RVector v{parse_ring_element("Y1", R), parse_ring_element("Y2", R),
            parse_ring_element("1 + Y1*Y2", R)};
  ReduceResult res = reduce_to_e1(v, Strategy::Auto, CFG);
  REQUIRE(res.status == Status::Ok);
  RMatrix M = complete_to_matrix(v, res.word);
  for (int i = 0; i < 3; ++i) CHECK(M.at(i, 0).equals(v[i]));
  CHECK(M.det().is_one());
}

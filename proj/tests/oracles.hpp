#pragma once

// Test-only oracles, independent of the engine's reduction paths.

#include "reduce.hpp"

namespace unimod::testing {

// Extended-Euclid reduction over a univariate localized ring: repeatedly
// divides numerators pairwise, entirely separate from the engine's strategy
// code. Returns a word sending v to e_1, or nullopt if it gets stuck.
inline std::optional<ElementaryWord> euclid_oracle(const RVector& v_in,
                                                   const Config& cfg) {
  const RingPtr& R = v_in[0].ring();
  if (R->nvars() > 1) return std::nullopt;
  RVector v = v_in;
  ElementaryWord w;
  w.size = static_cast<int>(v.size());
  auto emit = [&](int i, int j, const RingElement& lam) {
    if (lam.is_zero()) return;
    w.gens.push_back({i, j, lam, std::nullopt});
    v[i] = v[i] + lam * v[j];
  };
  const int var = R->nvars() == 1 ? 0 : -1;
  auto deg = [&](const RingElement& x) {
    return var < 0 ? 0 : x.num().degree_in(var);
  };
  // sweep pairs (0, i) until only v_1 is nonzero
  for (std::size_t i = 1; i < v.size(); ++i) {
    int guard = 0;
    while (!v[i].is_zero()) {
      if (++guard > 200) return std::nullopt;
      if (v[0].is_zero()) {
        emit(0, static_cast<int>(i), RingElement::one(R));
        emit(static_cast<int>(i), 0, -RingElement::one(R));
        continue;
      }
      bool head = deg(v[0]) >= deg(v[i]);
      const RingElement& a = head ? v[0] : v[i];
      const RingElement& b = head ? v[i] : v[0];
      Polynomial q = var < 0 ? *a.num().divexact(b.num())
                             : univ_quot(a.num(), b.num(), var);
      Polynomial num = -q;
      for (int s = 0; s < R->slot_count(); ++s)
        if (b.den()[s] > 0) num = num * R->slot_poly(s).pow(unsigned(b.den()[s]));
      RingElement lam(R, num, a.den());
      if (head)
        emit(0, static_cast<int>(i), lam);
      else
        emit(static_cast<int>(i), 0, lam);
    }
  }
  UnitResult u = is_unit(v[0], cfg);
  if (u.status != Status::Ok) return std::nullopt;
  if (!v[0].is_one()) {
    emit(1, 0, RingElement::one(R));
    emit(0, 1, (RingElement::one(R) - v[0]) * u.inverse);
    emit(1, 0, -v[1]);
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool want_one = i == 0;
    if (want_one != v[i].is_one() || (!want_one && !v[i].is_zero())) return std::nullopt;
  }
  return w;
}

// independent replay: exact arithmetic only
inline bool replays_to_e1(const ElementaryWord& w, const RVector& v) {
  RVector img = v;
  for (const auto& g : w.gens) img[g.i] = img[g.i] + g.lambda * img[g.j];
  if (!img[0].is_one()) return false;
  for (std::size_t i = 1; i < img.size(); ++i)
    if (!img[i].is_zero()) return false;
  return true;
}

} // namespace unimod::testing

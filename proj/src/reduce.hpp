#pragma once

#include <functional>

#include "rng.hpp"
#include "unimodular.hpp"

namespace unimod {

enum class Strategy { Auto, UnitPivot, Pid, StableRange, Recursive };

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(const std::string& s);

struct ReduceResult {
  Status status = Status::InternalError;
  ElementaryWord word;
  std::vector<std::string> stages;
  std::string message;
};

// Reduce a verified unimodular vector to (1, 0, ..., 0) by an elementary
// word. With a tag s the returned word lies in the relative elementary
// group: first-row parameters in (s) with explicit witnesses; requires
// v_1 == 1 mod s.
ReduceResult reduce_to_e1(const RVector& v, Strategy strategy, const Config& cfg,
                          std::optional<RingElement> tag = std::nullopt);

// ---- engine internals shared between strategy translation units ----

struct TagState {
  RingElement s;
  RingElement witness; // (v_1 - 1) == s * witness, maintained along the word
};

// Working state of one reduction: the vector, the word built so far, and the
// relative-tag witness. All emitters perform the exact arithmetic update.
class Reduction {
public:
  Reduction(RVector v, std::optional<TagState> tag);

  const RVector& v() const { return v_; }
  const RingPtr& ring() const { return v_[0].ring(); }
  int size() const { return static_cast<int>(v_.size()); }
  bool tagged() const { return tag_.has_value(); }
  const std::optional<TagState>& tag() const { return tag_; }

  void gamma(int i, const RingElement& mu);   // row i += mu * row 0, i >= 1
  void delta_q(int j, const RingElement& q);  // row 0 += (s*q) * row j (tagged)
  void delta(int j, const RingElement& lam);  // row 0 += lam * row j (untagged)
  void inner(int i, int j, const RingElement& lam); // untagged words only

  bool done() const; // v == e_1
  ElementaryWord finish() const;

private:
  RVector v_;
  ElementaryWord word_;
  std::optional<TagState> tag_;
};

// Strategy workers. Each returns Ok and drives `red` to e_1, or a status
// explaining why it does not apply / gave up. They assume the vector is
// verified unimodular.
Status try_unit_pivot(Reduction& red, const Config& cfg);
Status try_pid(Reduction& red, const Config& cfg);

// Basic-element search for the stable-range reduction. `tail_check` decides
// unimodularity of a candidate (r-1)-tail and returns ring-level cofactors;
// the default is plain is_unimodular, the recursive engine substitutes a
// licensed variant.
using TailCheck = std::function<std::optional<RVector>(const RVector&)>;
Status try_stable_range(Reduction& red, const Config& cfg, Rng& rng,
                        const TailCheck& tail_check);
Status try_stable_range(Reduction& red, const Config& cfg, Rng& rng);

// Prop-style recursive pipeline over the inverted pairs (implemented in
// reduce_recursive.cpp).
Status try_recursive(Reduction& red, const Config& cfg, Rng& rng,
                     std::vector<std::string>& stages);

// univariate helpers shared with oracles and the recursive engine
Polynomial univ_quot(const Polynomial& a, const Polynomial& b, int var);
Polynomial univ_rem(const Polynomial& a, const Polynomial& b, int var);

} // namespace unimod

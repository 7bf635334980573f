#pragma once

#include <memory>
#include <optional>

#include "config.hpp"
#include "groebner.hpp"
#include "poly.hpp"

namespace unimod {

class RingData;
using RingPtr = std::shared_ptr<const RingData>;

// Raw fraction over a ring's inverted-slot table: num / prod(slot_i^den_i).
struct Frac {
  Polynomial num;
  Expvec den; // one slot per inverted element

  bool is_polynomial() const { return expvec_total(den) == 0; }
};

// A linear form  l = sum_j a_j * Y_j - b  with a in k^m - (0) and b a base
// element (a base fraction at inner recursion levels, a field constant in
// starred rings).
struct LinearForm {
  std::vector<Scalar> coeffs; // indexed like the ring's y_slots
  Frac b;
};

// One inverted pair (f_i, l_i). `f` lists univariate coefficients over the
// base (field constants when starred); `slot_poly` is the cleared numerator
// of f(l), the polynomial the slot actually inverts.
struct InvertedPair {
  std::vector<Polynomial> f; // f[k] = coefficient of T^k
  LinearForm l;
  Polynomial slot_poly;
};

// Descriptor of a localized polynomial ring: base variables (with a list of
// inverted base elements), Y variables, inverted pairs, plus auxiliary
// inverted elements accumulated by localization. All variables share one
// fixed slot table, so ring surgery never re-indexes polynomials.
class RingData : public std::enable_shared_from_this<RingData> {
public:
  Field field;
  std::vector<std::string> var_names;
  std::vector<bool> is_base;      // per variable slot
  std::vector<int> base_slots;    // derived
  std::vector<int> y_slots;       // derived, in declaration order
  std::vector<Polynomial> base_inverted;
  std::vector<Polynomial> aux_inverted;
  std::vector<InvertedPair> pairs;
  bool starred = false;

  int nvars() const { return static_cast<int>(var_names.size()); }
  int dim_bound() const { return static_cast<int>(base_slots.size()); }
  int m() const { return static_cast<int>(y_slots.size()); }
  int n() const { return static_cast<int>(pairs.size()); }

  // unified slot table: base_inverted, aux_inverted, pairs
  int slot_count() const;
  const Polynomial& slot_poly(int slot) const;
  int pair_slot(int pair_index) const;
  int aux_slot(int aux_index) const;
  Polynomial inverted_product() const; // H = product of all slot polys

  bool same(const RingData& o) const;
  std::string descriptor_text() const; // canonical, hash input
  std::uint64_t hash() const;

  // all f coefficients and linear-form constants lie in k
  bool starred_shape() const;
  // every f_i has field-constant coefficients (linear-form constants free)
  bool field_coeff_fs() const;

  Frac pair_value(int pair_index) const; // f_i(l_i) as an exact fraction
};

struct RingSpec {
  Field field;
  std::vector<std::string> base_vars;
  std::vector<std::string> base_inverted_text;
  std::vector<std::string> y_vars;
  struct PairSpec {
    std::string f_text; // univariate in T
    std::string l_text; // linear form in the Y variables
  };
  std::vector<PairSpec> pairs;
  bool starred = false;
};

// Validates every descriptor invariant (nonzero f_i(l_i), starred
// constraints, distinct names) and freezes the ring.
RingPtr make_ring(const RingSpec& spec);

// Element of the localized ring as a canonical fraction. Cheap reductions
// only: exact slot-polynomial divisions of the numerator; equality is
// cross-multiplication, which is valid because the ring is a domain.
class RingElement {
public:
  RingElement() = default;
  RingElement(RingPtr ring, Polynomial num, Expvec den);

  static RingElement from_poly(const RingPtr& ring, const Polynomial& p);
  static RingElement from_scalar(const RingPtr& ring, const Scalar& c);
  static RingElement zero(const RingPtr& ring);
  static RingElement one(const RingPtr& ring);
  static RingElement slot_inverse(const RingPtr& ring, int slot, unsigned e = 1);

  const RingPtr& ring() const { return ring_; }
  const Polynomial& num() const { return num_; }
  const Expvec& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const;

  RingElement operator+(const RingElement& o) const;
  RingElement operator-(const RingElement& o) const;
  RingElement operator*(const RingElement& o) const;
  RingElement operator-() const;
  RingElement scaled(const Scalar& c) const;
  RingElement pow(unsigned k) const;
  bool equals(const RingElement& o) const;

  std::string to_string() const;

private:
  void normalize();

  RingPtr ring_;
  Polynomial num_;
  Expvec den_;
};

RingElement parse_ring_element(const std::string& text, const RingPtr& ring);

// Invertibility with a replayable witness.
struct UnitResult {
  Status status = Status::NotUnit; // Ok | NotUnit | BoundExceeded
  RingElement inverse;             // valid iff Ok; x * inverse == 1 exactly
};
UnitResult is_unit(const RingElement& x, const Config& cfg);

// Invertible k-affine change of Y coordinates: Y_j -> sum_k M[j][k] Y_k + c_j.
struct AffineYMap {
  std::vector<std::vector<Scalar>> M;
  std::vector<Frac> c;

  static AffineYMap identity(const RingPtr& ring);
  bool is_identity() const;
};

// Ring isomorphism induced by an affine Y map, with both directions
// materialized. Slot tables correspond position-by-position; the image of
// 1/slot_i is prod(to-slots^max(comp,0)) / (slot'_i * prod(to-slots^max(-comp,0)))
// with signed exponents comp = comp_fwd[i], verified exactly at build time.
struct RingIso {
  RingPtr from, to;
  AffineYMap fwd_map, inv_map;
  std::vector<Expvec> comp_fwd, comp_inv;

  RingElement fwd(const RingElement& x) const;
  RingElement inv(const RingElement& x) const;
};

RingIso apply_affine(const RingPtr& ring, const AffineYMap& map);

// Replace pair `idx` by (new_f, new_l) when both present the same inverted
// value; used to absorb scale factors into f. Verified exactly.
RingIso rewrite_pair(const RingPtr& ring, int idx, std::vector<Polynomial> new_f,
                     LinearForm new_l);

// Composable chain of ring isomorphisms.
struct IsoChain {
  std::vector<RingIso> steps;

  RingPtr from() const { return steps.empty() ? nullptr : steps.front().from; }
  RingPtr to() const { return steps.empty() ? nullptr : steps.back().to; }
  RingElement fwd(RingElement x) const {
    for (const auto& s : steps) x = s.fwd(x);
    return x;
  }
  RingElement inv(RingElement x) const {
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) x = it->inv(x);
    return x;
  }
};

// Elementary row operation over the coefficient field: row i += lambda * row j.
struct ScalarGen {
  int i, j;
  Scalar lambda;
};

// Rewrites the ring so that pair `idx` has linear form exactly Y_last:
// an elementary change of Y coordinates sending the coefficient vector to
// e_m, plus a translation absorbing the constant (for m = 1 the scale is
// absorbed into f instead).
struct NormalizeResult {
  std::vector<ScalarGen> theta; // theta * a == e_m over k
  Frac translation;             // constant the pivot variable absorbed
  IsoChain chain;               // from = input ring, to = rewritten ring
};
NormalizeResult normalize_linear_form(const RingPtr& ring, int idx);

// Localization at one extra element (appended to base_inverted when it only
// involves base variables, else tracked as auxiliary).
struct Localization {
  RingPtr from, to;
  std::vector<int> slot_map; // from-slot -> to-slot
  int new_slot = -1;

  RingElement inject(const RingElement& x) const;
  // pull an element back when its denominator avoids the new slot
  std::optional<RingElement> retract(const RingElement& x) const;
};
Localization localize(const RingPtr& ring, const Polynomial& extra);

// Remove pair `idx` (the subring C with one fewer inverted pair).
struct PairDrop {
  RingPtr from, to; // from = full ring, to = C
  std::vector<int> slot_map_to_from; // to-slot -> from-slot
  int dropped_slot = -1;

  RingElement inject(const RingElement& x) const;           // C -> A
  std::optional<RingElement> retract(const RingElement& x) const; // A -> C
};
PairDrop drop_pair(const RingPtr& ring, int idx);

// Reclassify the pivot Y variable of pair `idx` (whose l must be exactly
// that variable) as a base variable, moving f(Y) into base_inverted. Pairs
// whose linear forms involve no other Y variable migrate into the base too.
struct Unwrap {
  RingPtr from, to;
  std::vector<int> slot_map; // from-slot -> to-slot
  int pivot_slot = -1;       // the variable moved into the base
  int f_base_slot = -1;      // slot of f(pivot) in `to`
  // signed compensation per from-slot (over to-slots), as in RingIso
  std::vector<Expvec> comp_fwd, comp_inv;

  RingElement transport(const RingElement& x) const; // same values, new table
  RingElement back(const RingElement& x) const;
};
Unwrap unwrap_pair(const RingPtr& ring, int idx);

} // namespace unimod

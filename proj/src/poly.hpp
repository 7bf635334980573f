#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scalar.hpp"

namespace unimod {

// Exponent vector, one slot per ambient variable.
using Expvec = std::vector<int>;

int expvec_total(const Expvec& e);
bool expvec_divides(const Expvec& a, const Expvec& b); // a | b
Expvec expvec_add(const Expvec& a, const Expvec& b);
Expvec expvec_sub(const Expvec& a, const Expvec& b); // assumes b | a
Expvec expvec_lcm(const Expvec& a, const Expvec& b);

// Total multiplicative monomial order with 1 minimal. `priority` lists
// variable slots from highest to lowest (empty means slot order). The first
// `elim_block` priority entries form a leading block compared first by their
// total degree; this is the block order used to eliminate auxiliary
// variables.
struct MonomialOrder {
  enum class Kind { DegRevLex, Lex };
  Kind kind = Kind::DegRevLex;
  std::vector<int> priority;
  int elim_block = 0;

  static MonomialOrder degrevlex() { return {}; }
  static MonomialOrder lex() { return {Kind::Lex, {}, 0}; }
  // block order: vars in `block` dominate, tail compared by degrevlex
  static MonomialOrder eliminate(const std::vector<int>& block, int nvars);

  int cmp(const Expvec& a, const Expvec& b) const; // -1, 0, +1
  bool greater(const Expvec& a, const Expvec& b) const { return cmp(a, b) > 0; }
};

// Sparse multivariate polynomial over a fixed field. Terms are stored in a
// canonical map keyed by exponent vector; no zero coefficients are kept, so
// equality is structural. Leading terms w.r.t. a runtime MonomialOrder are
// computed on demand.
class Polynomial {
public:
  Polynomial() : field_(Field::rationals()), nvars_(0) {}
  Polynomial(const Field& f, int nvars) : field_(f), nvars_(nvars) {}

  static Polynomial zero(const Field& f, int nvars) { return Polynomial(f, nvars); }
  static Polynomial constant(const Field& f, int nvars, const Scalar& c);
  static Polynomial one(const Field& f, int nvars);
  static Polynomial variable(const Field& f, int nvars, int slot, int power = 1);
  static Polynomial term(const Field& f, const Expvec& e, const Scalar& c);

  const Field& field() const { return field_; }
  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_one() const;
  std::optional<Scalar> constant_value() const; // set iff constant (zero included)
  int total_degree() const;                     // -1 for zero
  int degree_in(int slot) const;
  bool uses_var(int slot) const;
  std::size_t term_count() const { return terms_.size(); }

  void add_term(const Expvec& e, const Scalar& c); // accumulates, drops zeros

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const Scalar& c) const;
  Polynomial mul_term(const Expvec& e, const Scalar& c) const;
  Polynomial pow(unsigned k) const;

  bool operator==(const Polynomial& o) const;
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  // leading term under `ord`; polynomial must be nonzero
  const std::pair<const Expvec, Scalar>& leading(const MonomialOrder& ord) const;
  Polynomial monic(const MonomialOrder& ord) const;

  // exact division; nullopt if not divisible
  std::optional<Polynomial> divexact(const Polynomial& d) const;

  // substitute vars -> polynomials (same field/arity); identity elsewhere
  Polynomial substitute(const std::map<int, Polynomial>& images) const;
  // evaluate a subset of variables at scalars
  Polynomial eval_partial(const std::map<int, Scalar>& point) const;

  // view as univariate in `slot`: coefficient of slot^k (slot-exponent zeroed)
  Polynomial coeff_in(int slot, int k) const;

  // arity widening/narrowing for auxiliary-variable tricks
  Polynomial extended(int new_nvars) const;   // append zero-exponent slots
  Polynomial restricted(int new_nvars) const; // drop trailing slots (must be unused)

  // content: gcd of coefficients (Q: |gcd| of rationals normalized; Fp: 1)
  Scalar unit_content() const; // leading-ish normalizer: first stored coeff

  const std::map<Expvec, Scalar>& terms() const { return terms_; }

  std::string to_string(const std::vector<std::string>& var_names) const;

private:
  void check_compat(const Polynomial& o) const;

  Field field_;
  int nvars_;
  std::map<Expvec, Scalar> terms_;
};

// Parse the shared polynomial syntax: terms joined by +/-, each term a
// *-joined list of integer or a/b coefficients and `Name` / `Name^k` powers.
// Variable names resolve through `var_names`; unknown names are an error.
Polynomial parse_polynomial(const std::string& text, const Field& f,
                            const std::vector<std::string>& var_names);

} // namespace unimod

#include "ring.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace unimod {

namespace {

// ---- raw fraction helpers over an explicit slot table ----

Frac frac_poly(const Polynomial& p, int nslots) { return Frac{p, Expvec(nslots, 0)}; }

void frac_reduce(Frac& f, const std::vector<Polynomial>& slots) {
  if (f.num.is_zero()) {
    std::fill(f.den.begin(), f.den.end(), 0);
    return;
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    while (f.den[i] > 0) {
      if (slots[i].is_constant()) {
        Scalar c = *slots[i].constant_value();
        f.num = f.num.scaled(c.inverse());
        --f.den[i];
        continue;
      }
      auto q = f.num.divexact(slots[i]);
      if (!q) break;
      f.num = std::move(*q);
      --f.den[i];
    }
  }
}

Polynomial den_product(const Expvec& den, const std::vector<Polynomial>& slots,
                       const Field& f, int nvars) {
  Polynomial r = Polynomial::one(f, nvars);
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (den[i] > 0) r = r * slots[i].pow(static_cast<unsigned>(den[i]));
  return r;
}

Frac frac_mul(const Frac& a, const Frac& b, const std::vector<Polynomial>& slots) {
  Frac r{a.num * b.num, expvec_add(a.den, b.den)};
  frac_reduce(r, slots);
  return r;
}

Frac frac_add(const Frac& a, const Frac& b, const std::vector<Polynomial>& slots,
              const Field& f, int nvars) {
  Expvec common = expvec_lcm(a.den, b.den);
  Polynomial na = a.num * den_product(expvec_sub(common, a.den), slots, f, nvars);
  Polynomial nb = b.num * den_product(expvec_sub(common, b.den), slots, f, nvars);
  Frac r{na + nb, common};
  frac_reduce(r, slots);
  return r;
}

// non-reducing variants: pair slot polynomials must be a deterministic
// function of the raw pair data so that ring surgery keeps them verbatim
Frac frac_mul_raw(const Frac& a, const Frac& b) {
  return Frac{a.num * b.num, expvec_add(a.den, b.den)};
}

Frac frac_add_raw(const Frac& a, const Frac& b, const std::vector<Polynomial>& slots,
                  const Field& f, int nvars) {
  Expvec common = expvec_lcm(a.den, b.den);
  Polynomial na = a.num * den_product(expvec_sub(common, a.den), slots, f, nvars);
  Polynomial nb = b.num * den_product(expvec_sub(common, b.den), slots, f, nvars);
  return Frac{na + nb, common};
}

Frac frac_neg(const Frac& a) { return Frac{-a.num, a.den}; }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace

// ---- RingData ----

int RingData::slot_count() const {
  return static_cast<int>(base_inverted.size() + aux_inverted.size() + pairs.size());
}

const Polynomial& RingData::slot_poly(int slot) const {
  int nb = static_cast<int>(base_inverted.size());
  int na = static_cast<int>(aux_inverted.size());
  if (slot < nb) return base_inverted[slot];
  if (slot < nb + na) return aux_inverted[slot - nb];
  return pairs[slot - nb - na].slot_poly;
}

int RingData::pair_slot(int pair_index) const {
  return static_cast<int>(base_inverted.size() + aux_inverted.size()) + pair_index;
}

int RingData::aux_slot(int aux_index) const {
  return static_cast<int>(base_inverted.size()) + aux_index;
}

Polynomial RingData::inverted_product() const {
  Polynomial h = Polynomial::one(field, nvars());
  for (int i = 0; i < slot_count(); ++i) h = h * slot_poly(i);
  return h;
}

bool RingData::same(const RingData& o) const {
  return descriptor_text() == o.descriptor_text();
}

bool RingData::starred_shape() const {
  for (const auto& pr : pairs) {
    for (const auto& fc : pr.f)
      if (!fc.is_constant()) return false;
    if (!pr.l.b.is_polynomial() || !pr.l.b.num.is_constant()) return false;
  }
  return true;
}

bool RingData::field_coeff_fs() const {
  for (const auto& pr : pairs)
    for (const auto& fc : pr.f)
      if (!fc.is_constant()) return false;
  return true;
}

Frac RingData::pair_value(int pair_index) const {
  const InvertedPair& pr = pairs[pair_index];
  const int ns = slot_count();
  std::vector<Polynomial> slots;
  slots.reserve(ns);
  for (int i = 0; i < ns; ++i) slots.push_back(slot_poly(i));
  // l as a fraction; no reduction anywhere, see frac_add_raw
  Polynomial lin(field, nvars());
  for (std::size_t j = 0; j < y_slots.size(); ++j)
    lin = lin + Polynomial::variable(field, nvars(), y_slots[j]).scaled(pr.l.coeffs[j]);
  Frac l = frac_add_raw(frac_poly(lin, ns), frac_neg(pr.l.b), slots, field, nvars());
  // Horner
  Frac acc = frac_poly(pr.f.back().extended(nvars()), ns);
  for (int k = static_cast<int>(pr.f.size()) - 2; k >= 0; --k) {
    acc = frac_mul_raw(acc, l);
    acc = frac_add_raw(acc, frac_poly(pr.f[k].extended(nvars()), ns), slots, field, nvars());
  }
  return acc;
}

std::string RingData::descriptor_text() const {
  std::ostringstream out;
  out << "field " << field.to_string() << "\n";
  out << "vars";
  for (int i = 0; i < nvars(); ++i)
    out << " " << var_names[i] << (is_base[i] ? ":b" : ":y");
  out << "\n";
  for (const auto& p : base_inverted) out << "binv " << p.to_string(var_names) << "\n";
  for (const auto& p : aux_inverted) out << "ainv " << p.to_string(var_names) << "\n";
  for (const auto& pr : pairs) {
    out << "pair f=[";
    for (std::size_t k = 0; k < pr.f.size(); ++k) {
      if (k) out << ",";
      out << pr.f[k].to_string(var_names);
    }
    out << "] a=[";
    for (std::size_t j = 0; j < pr.l.coeffs.size(); ++j) {
      if (j) out << ",";
      out << pr.l.coeffs[j].to_string();
    }
    out << "] b=" << pr.l.b.num.to_string(var_names) << "|[";
    for (std::size_t i = 0; i < pr.l.b.den.size(); ++i) {
      if (i) out << ",";
      out << pr.l.b.den[i];
    }
    out << "] slot=" << pr.slot_poly.to_string(var_names) << "\n";
  }
  out << "starred " << (starred ? "true" : "false") << "\n";
  return out.str();
}

std::uint64_t RingData::hash() const { return fnv1a(descriptor_text()); }

namespace {

std::shared_ptr<RingData> clone_ring(const RingData& r) {
  auto out = std::make_shared<RingData>();
  *out = r;
  return out;
}

void rebuild_slots(RingData& r) {
  r.base_slots.clear();
  r.y_slots.clear();
  for (int i = 0; i < r.nvars(); ++i)
    (r.is_base[i] ? r.base_slots : r.y_slots).push_back(i);
}

void check_base_only(const RingData& r, const Polynomial& p, const char* what) {
  for (int y : r.y_slots)
    if (p.uses_var(y))
      throw Error(Status::ParseError,
                  std::string(what) + " must involve base variables only");
}

} // namespace

RingPtr make_ring(const RingSpec& spec) {
  auto r = std::make_shared<RingData>();
  r->field = spec.field;
  std::set<std::string> seen;
  for (const auto& v : spec.base_vars) {
    r->var_names.push_back(v);
    r->is_base.push_back(true);
  }
  for (const auto& v : spec.y_vars) {
    r->var_names.push_back(v);
    r->is_base.push_back(false);
  }
  for (const auto& v : r->var_names) {
    if (v == "T" || v == "t")
      throw Error(Status::ParseError, "variable name '" + v + "' is reserved");
    if (!seen.insert(v).second)
      throw Error(Status::ParseError, "duplicate variable name '" + v + "'");
  }
  rebuild_slots(*r);
  r->starred = spec.starred;

  for (const auto& text : spec.base_inverted_text) {
    Polynomial p = parse_polynomial(text, r->field, r->var_names);
    if (p.is_zero()) throw Error(Status::ParseError, "zero inverted element");
    check_base_only(*r, p, "inverted base element");
    r->base_inverted.push_back(std::move(p));
  }

  // pairs: parse f over base vars + T, l over the Y variables
  std::vector<std::string> fvars = r->var_names;
  fvars.push_back("T");
  const int nv = r->nvars();
  for (const auto& ps : spec.pairs) {
    Polynomial fpoly = parse_polynomial(ps.f_text, r->field, fvars);
    if (fpoly.is_zero()) throw Error(Status::ParseError, "zero f in inverted pair");
    InvertedPair pr;
    int fdeg = fpoly.degree_in(nv);
    for (int k = 0; k <= fdeg; ++k) {
      Polynomial ck = fpoly.coeff_in(nv, k).restricted(nv);
      check_base_only(*r, ck, "coefficient of f");
      if (r->starred && !ck.is_constant())
        throw Error(Status::ParseError, "starred ring requires f with field coefficients");
      pr.f.push_back(std::move(ck));
    }
    Polynomial lp = parse_polynomial(ps.l_text, r->field, r->var_names);
    if (lp.total_degree() > 1)
      throw Error(Status::ParseError, "linear form must have degree 1");
    pr.l.coeffs.assign(r->y_slots.size(), Scalar::zero(r->field));
    bool any = false;
    Polynomial bpoly(r->field, nv);
    for (const auto& [e, c] : lp.terms()) {
      int deg = expvec_total(e);
      if (deg == 0) {
        bpoly.add_term(e, -c); // l = sum a_j Y_j - b
        continue;
      }
      int slot = -1;
      for (int i = 0; i < nv; ++i)
        if (e[i] == 1) slot = i;
      if (slot < 0 || r->is_base[slot])
        throw Error(Status::ParseError, "linear form must be linear in the Y variables");
      auto it = std::find(r->y_slots.begin(), r->y_slots.end(), slot);
      pr.l.coeffs[it - r->y_slots.begin()] = c;
      any = true;
    }
    if (!any)
      throw Error(Status::ParseError,
                  "linear form coefficient vector is zero");
    if (r->starred && !bpoly.is_constant())
      throw Error(Status::ParseError, "starred ring requires constants b in the field");
    pr.l.b = Frac{bpoly, Expvec(0)}; // den resized below
    r->pairs.push_back(std::move(pr));
  }

  // finalize slot table, then compute each f_i(l_i)
  const int ns = r->slot_count();
  for (auto& pr : r->pairs) {
    pr.l.b.den.assign(ns, 0);
    pr.slot_poly = Polynomial::one(r->field, nv); // placeholder for pair_value
  }
  for (std::size_t i = 0; i < r->pairs.size(); ++i) {
    Frac v = r->pair_value(static_cast<int>(i));
    if (v.num.is_zero())
      throw Error(Status::ParseError, "inverted pair evaluates to zero");
    r->pairs[i].slot_poly = v.num;
  }
  return r;
}

// ---- RingElement ----

RingElement::RingElement(RingPtr ring, Polynomial num, Expvec den)
    : ring_(std::move(ring)), num_(std::move(num)), den_(std::move(den)) {
  if (static_cast<int>(den_.size()) != ring_->slot_count())
    throw Error(Status::InternalError, "denominator slot count mismatch");
  normalize();
}

RingElement RingElement::from_poly(const RingPtr& ring, const Polynomial& p) {
  return RingElement(ring, p, Expvec(ring->slot_count(), 0));
}

RingElement RingElement::from_scalar(const RingPtr& ring, const Scalar& c) {
  return from_poly(ring, Polynomial::constant(ring->field, ring->nvars(), c));
}

RingElement RingElement::zero(const RingPtr& ring) {
  return from_poly(ring, Polynomial::zero(ring->field, ring->nvars()));
}

RingElement RingElement::one(const RingPtr& ring) {
  return from_poly(ring, Polynomial::one(ring->field, ring->nvars()));
}

RingElement RingElement::slot_inverse(const RingPtr& ring, int slot, unsigned e) {
  Expvec den(ring->slot_count(), 0);
  den[slot] = static_cast<int>(e);
  return RingElement(ring, Polynomial::one(ring->field, ring->nvars()), den);
}

bool RingElement::is_one() const {
  return num_.is_one() && expvec_total(den_) == 0;
}

void RingElement::normalize() {
  Frac f{num_, den_};
  std::vector<Polynomial> slots;
  for (int i = 0; i < ring_->slot_count(); ++i) slots.push_back(ring_->slot_poly(i));
  frac_reduce(f, slots);
  num_ = std::move(f.num);
  den_ = std::move(f.den);
}

namespace {

void check_same_ring(const RingElement& a, const RingElement& b) {
  if (a.ring() == b.ring()) return;
  if (!a.ring() || !b.ring())
    throw Error(Status::InternalError, "ring element without ring");
  if (!a.ring()->same(*b.ring()))
    throw Error(Status::InternalError, "ring elements from different rings");
}

std::vector<Polynomial> slot_table(const RingPtr& r) {
  std::vector<Polynomial> slots;
  for (int i = 0; i < r->slot_count(); ++i) slots.push_back(r->slot_poly(i));
  return slots;
}

} // namespace

RingElement RingElement::operator+(const RingElement& o) const {
  check_same_ring(*this, o);
  Frac r = frac_add(Frac{num_, den_}, Frac{o.num_, o.den_}, slot_table(ring_),
                    ring_->field, ring_->nvars());
  return RingElement(ring_, std::move(r.num), std::move(r.den));
}

RingElement RingElement::operator-(const RingElement& o) const { return *this + (-o); }

RingElement RingElement::operator*(const RingElement& o) const {
  check_same_ring(*this, o);
  Frac r = frac_mul(Frac{num_, den_}, Frac{o.num_, o.den_}, slot_table(ring_));
  return RingElement(ring_, std::move(r.num), std::move(r.den));
}

RingElement RingElement::operator-() const {
  return RingElement(ring_, -num_, den_);
}

RingElement RingElement::scaled(const Scalar& c) const {
  return RingElement(ring_, num_.scaled(c), c.is_zero() ? Expvec(den_.size(), 0) : den_);
}

RingElement RingElement::pow(unsigned k) const {
  RingElement r = one(ring_);
  RingElement b(*this);
  while (k) {
    if (k & 1) r = r * b;
    b = b * b;
    k >>= 1;
  }
  return r;
}

bool RingElement::equals(const RingElement& o) const {
  check_same_ring(*this, o);
  return (*this - o).is_zero();
}

std::string RingElement::to_string() const {
  std::string s = num_.to_string(ring_->var_names);
  if (expvec_total(den_) == 0) return s;
  s += " / ";
  bool first = true;
  for (int i = 0; i < ring_->slot_count(); ++i) {
    if (den_[i] == 0) continue;
    if (!first) s += "*";
    first = false;
    s += "(" + ring_->slot_poly(i).to_string(ring_->var_names) + ")";
    if (den_[i] > 1) s += "^" + std::to_string(den_[i]);
  }
  return s;
}

RingElement parse_ring_element(const std::string& text, const RingPtr& ring) {
  // split at the '/' that introduces a parenthesized denominator product
  std::size_t split = std::string::npos;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '/') continue;
    std::size_t j = i + 1;
    while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j < text.size() && text[j] == '(') {
      split = i;
      break;
    }
  }
  std::string num_text = split == std::string::npos ? text : text.substr(0, split);
  Polynomial num = parse_polynomial(num_text, ring->field, ring->var_names);
  Expvec den(ring->slot_count(), 0);
  if (split != std::string::npos) {
    std::size_t i = split + 1;
    const std::string& s = text;
    auto skip = [&] {
      while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == '*')) ++i;
    };
    while (true) {
      skip();
      if (i >= s.size()) break;
      if (s[i] != '(')
        throw Error(Status::ParseError, "denominator factors must be parenthesized");
      int depth = 1;
      std::size_t j = i + 1;
      while (j < s.size() && depth > 0) {
        if (s[j] == '(') ++depth;
        if (s[j] == ')') --depth;
        ++j;
      }
      if (depth != 0) throw Error(Status::ParseError, "unbalanced denominator");
      Polynomial fac = parse_polynomial(s.substr(i + 1, j - i - 2), ring->field,
                                        ring->var_names);
      i = j;
      int e = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        std::size_t k = i;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        if (k == i) throw Error(Status::ParseError, "missing exponent in denominator");
        e = std::stoi(s.substr(i, k - i));
        i = k;
      }
      int slot = -1;
      for (int k = 0; k < ring->slot_count(); ++k)
        if (ring->slot_poly(k) == fac) {
          slot = k;
          break;
        }
      if (slot < 0)
        throw Error(Status::ParseError,
                    "denominator factor is not an inverted element of the ring");
      den[slot] += e;
    }
  }
  return RingElement(ring, std::move(num), std::move(den));
}

// ---- units ----

UnitResult is_unit(const RingElement& x, const Config& cfg) {
  UnitResult out;
  if (x.is_zero()) return out;
  const RingPtr& R = x.ring();
  const int ns = R->slot_count();

  // quick path: numerator is a scalar times a product of inverted elements
  {
    Polynomial n = x.num();
    Expvec used(ns, 0);
    bool progress = true;
    while (progress && !n.is_constant()) {
      progress = false;
      for (int i = 0; i < ns; ++i) {
        if (R->slot_poly(i).is_constant()) continue;
        if (auto q = n.divexact(R->slot_poly(i))) {
          n = std::move(*q);
          ++used[i];
          progress = true;
        }
      }
    }
    if (n.is_constant()) {
      Scalar c = *n.constant_value();
      Expvec up = x.den(), down = used;
      // x^{-1} = c^{-1} * prod D^{x.den} / prod D^{used}
      Polynomial numpoly = Polynomial::constant(R->field, R->nvars(), c.inverse());
      for (int i = 0; i < ns; ++i)
        if (up[i] > 0) numpoly = numpoly * R->slot_poly(i).pow(up[i]);
      RingElement inv(R, numpoly, down);
      if (!(x * inv).is_one())
        throw Error(Status::InternalError, "unit quick path produced a bad inverse");
      out.status = Status::Ok;
      out.inverse = inv;
      return out;
    }
  }

  Polynomial h = R->inverted_product();
  auto sat = saturation_membership(Polynomial::one(R->field, R->nvars()), {x.num()},
                                   h, cfg.saturation_emax);
  if (sat.kind == SaturationKind::BoundExceeded) {
    out.status = Status::BoundExceeded;
    return out;
  }
  if (sat.kind == SaturationKind::NotMember) return out;
  // c * num = h^e  =>  x^{-1} = c * prod D^{x.den} / h^e
  Polynomial numpoly = sat.cert.cofactors[0];
  for (int i = 0; i < ns; ++i)
    if (x.den()[i] > 0) numpoly = numpoly * R->slot_poly(i).pow(x.den()[i]);
  Expvec den(ns, static_cast<int>(sat.cert.exponent));
  RingElement inv(R, numpoly, den);
  if (!(x * inv).is_one())
    throw Error(Status::InternalError, "unit certificate failed replay");
  out.status = Status::Ok;
  out.inverse = inv;
  return out;
}

// ---- affine Y maps and isomorphisms ----

AffineYMap AffineYMap::identity(const RingPtr& ring) {
  AffineYMap m;
  const int mm = ring->m();
  m.M.assign(mm, std::vector<Scalar>(mm, Scalar::zero(ring->field)));
  for (int i = 0; i < mm; ++i) m.M[i][i] = Scalar::one(ring->field);
  m.c.assign(mm, Frac{Polynomial::zero(ring->field, ring->nvars()),
                      Expvec(ring->slot_count(), 0)});
  return m;
}

bool AffineYMap::is_identity() const {
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = 0; j < M.size(); ++j)
      if ((i == j && !M[i][j].is_one()) || (i != j && !M[i][j].is_zero())) return false;
  for (const auto& f : c)
    if (!f.num.is_zero()) return false;
  return true;
}

namespace {

std::vector<std::vector<Scalar>> mat_inverse(const std::vector<std::vector<Scalar>>& M,
                                             const Field& f) {
  const int n = static_cast<int>(M.size());
  std::vector<std::vector<Scalar>> a(M);
  std::vector<std::vector<Scalar>> inv(n, std::vector<Scalar>(n, Scalar::zero(f)));
  for (int i = 0; i < n; ++i) inv[i][i] = Scalar::one(f);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!a[r][col].is_zero()) { piv = r; break; }
    if (piv < 0) throw Error(Status::ParseError, "affine Y map is not invertible");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    Scalar d = a[col][col].inverse();
    for (int j = 0; j < n; ++j) { a[col][j] = a[col][j] * d; inv[col][j] = inv[col][j] * d; }
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      Scalar m = a[r][col];
      for (int j = 0; j < n; ++j) {
        a[r][j] = a[r][j] - m * a[col][j];
        inv[r][j] = inv[r][j] - m * inv[col][j];
      }
    }
  }
  return inv;
}

// Exact check that image N/prod^{gamma} of an old slot polynomial matches the
// target slot with signed compensation delta:
//   prod^{gamma} * target * prod^{delta-} == N * prod^{delta+}.
void verify_slot_comp(const Frac& img, const Polynomial& target, const Expvec& delta,
                      const std::vector<Polynomial>& slots, const Field& f, int nv) {
  Expvec dplus(delta.size(), 0), dminus(delta.size(), 0);
  for (std::size_t s = 0; s < delta.size(); ++s)
    (delta[s] >= 0 ? dplus[s] : dminus[s]) = std::abs(delta[s]);
  Polynomial lhs = den_product(img.den, slots, f, nv) * target *
                   den_product(dminus, slots, f, nv);
  Polynomial rhs = img.num * den_product(dplus, slots, f, nv);
  if (lhs != rhs)
    throw Error(Status::InternalError, "slot compensation identity failed");
}

// substitute y variables by their affine images inside a polynomial
Frac apply_map_to_poly(const RingData& ring, const AffineYMap& map, const Polynomial& p) {
  const int nv = ring.nvars();
  const int ns = ring.slot_count();
  auto slots = [&] {
    std::vector<Polynomial> t;
    for (int i = 0; i < ns; ++i) t.push_back(ring.slot_poly(i));
    return t;
  }();
  // per-Y images as fractions
  std::vector<Frac> images;
  for (std::size_t j = 0; j < ring.y_slots.size(); ++j) {
    Polynomial lin(ring.field, nv);
    for (std::size_t k = 0; k < ring.y_slots.size(); ++k)
      lin = lin + Polynomial::variable(ring.field, nv, ring.y_slots[k]).scaled(map.M[j][k]);
    Frac img = frac_add(frac_poly(lin, ns), map.c[j], slots, ring.field, nv);
    images.push_back(std::move(img));
  }
  Frac acc{Polynomial::zero(ring.field, nv), Expvec(ns, 0)};
  for (const auto& [e, coef] : p.terms()) {
    Frac term{Polynomial::constant(ring.field, nv, coef), Expvec(ns, 0)};
    Expvec rest(e);
    for (std::size_t j = 0; j < ring.y_slots.size(); ++j) {
      int slot = ring.y_slots[j];
      for (int q = 0; q < e[slot]; ++q) term = frac_mul(term, images[j], slots);
      rest[slot] = 0;
    }
    term.num = term.num.mul_term(rest, Scalar::one(ring.field));
    acc = frac_add(acc, term, slots, ring.field, nv);
  }
  return acc;
}

} // namespace

namespace {

RingElement transport_through(const RingPtr& source, const RingPtr& target,
                              const AffineYMap& map,
                              const std::vector<Expvec>& comp,
                              const RingElement& x) {
  Frac img = apply_map_to_poly(*source, map, x.num());
  Polynomial num = img.num;
  Expvec den = img.den;
  for (int i = 0; i < source->slot_count(); ++i) {
    int d = x.den()[i];
    if (d == 0) continue;
    den[i] += d;
    for (int s = 0; s < target->slot_count(); ++s) {
      int c = comp[i][s] * d;
      if (c > 0) num = num * target->slot_poly(s).pow(static_cast<unsigned>(c));
      else if (c < 0) den[s] += -c;
    }
  }
  return RingElement(target, std::move(num), std::move(den));
}

} // namespace

RingElement RingIso::fwd(const RingElement& x) const {
  return transport_through(from, to, fwd_map, comp_fwd, x);
}

RingElement RingIso::inv(const RingElement& x) const {
  return transport_through(to, from, inv_map, comp_inv, x);
}

namespace {

// one direction of an affine iso: target ring + compensation exponents
struct AffineLeg {
  std::shared_ptr<RingData> target;
  std::vector<Expvec> comp;
};

AffineLeg build_affine_leg(const RingPtr& ring, const AffineYMap& map) {
  AffineLeg leg;
  leg.target = clone_ring(*ring);
  RingData& out = *leg.target;
  const int ns = ring->slot_count();
  const int mm = ring->m();

  // pairs: a' = a * M, b' = b - sum_j a_j c_j
  auto slots_out = [&] {
    std::vector<Polynomial> t;
    for (int i = 0; i < out.slot_count(); ++i) t.push_back(out.slot_poly(i));
    return t;
  };
  for (auto& pr : out.pairs) {
    std::vector<Scalar> na(mm, Scalar::zero(ring->field));
    for (int k = 0; k < mm; ++k)
      for (int j = 0; j < mm; ++j)
        na[k] = na[k] + pr.l.coeffs[j] * map.M[j][k];
    Frac nb = pr.l.b;
    for (int j = 0; j < mm; ++j) {
      Frac t = map.c[j];
      t.num = t.num.scaled(-pr.l.coeffs[j]);
      nb = frac_add(nb, t, slots_out(), ring->field, ring->nvars());
    }
    pr.l.coeffs = std::move(na);
    pr.l.b = std::move(nb);
    bool allzero = true;
    for (const auto& s : pr.l.coeffs) allzero = allzero && s.is_zero();
    if (allzero)
      throw Error(Status::InternalError, "affine map degenerated a linear form");
  }
  // recompute pair slot polynomials from the rewritten data
  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    Frac v = out.pair_value(static_cast<int>(i));
    if (v.num.is_zero())
      throw Error(Status::InternalError, "affine image of inverted pair vanished");
    out.pairs[i].slot_poly = v.num;
  }
  // aux elements: replace by the numerator of their image
  const int nb_cnt = static_cast<int>(ring->base_inverted.size());
  std::vector<Frac> aux_imgs;
  for (std::size_t i = 0; i < ring->aux_inverted.size(); ++i) {
    Frac img = apply_map_to_poly(*ring, map, ring->aux_inverted[i]);
    if (img.num.is_zero())
      throw Error(Status::InternalError, "affine image of aux element vanished");
    out.aux_inverted[i] = img.num;
    aux_imgs.push_back(std::move(img));
  }

  // compensations: image(1/slot_i) = prod'^{comp+} / (slot'_i * prod'^{comp-}),
  // verified through prod'^{gamma} * slot'_i * prod'^{comp-} == N * prod'^{comp+}
  // where the image of the old slot polynomial is N / prod'^{gamma}.
  leg.comp.assign(ns, Expvec(ns, 0));
  auto slots_final = slots_out();
  for (int i = 0; i < ns; ++i) {
    Frac img;
    Expvec delta(ns, 0);
    if (i < nb_cnt) {
      continue; // base polynomials are fixed by the map: comp = 0
    } else if (i < nb_cnt + static_cast<int>(ring->aux_inverted.size())) {
      img = aux_imgs[i - nb_cnt];
      delta = img.den; // new aux poly is the image numerator itself
    } else {
      img = apply_map_to_poly(*ring, map, ring->slot_poly(i));
      delta = out.pair_value(i - nb_cnt - static_cast<int>(ring->aux_inverted.size())).den;
    }
    verify_slot_comp(img, out.slot_poly(i), delta, slots_final, ring->field,
                     ring->nvars());
    leg.comp[i] = std::move(delta);
  }
  return leg;
}

} // namespace

RingIso apply_affine(const RingPtr& ring, const AffineYMap& map) {
  RingIso iso;
  iso.from = ring;
  iso.fwd_map = map;
  AffineLeg fwd = build_affine_leg(ring, map);
  iso.to = fwd.target;
  iso.comp_fwd = std::move(fwd.comp);

  // inverse map: Y = M^{-1}(Y' - c)
  AffineYMap invm;
  invm.M = mat_inverse(map.M, ring->field);
  const int mm = ring->m();
  auto slots = slot_table(iso.to);
  invm.c.assign(mm, Frac{Polynomial::zero(ring->field, ring->nvars()),
                         Expvec(ring->slot_count(), 0)});
  for (int j = 0; j < mm; ++j) {
    Frac acc{Polynomial::zero(ring->field, ring->nvars()), Expvec(ring->slot_count(), 0)};
    for (int k = 0; k < mm; ++k) {
      Frac t = map.c[k];
      t.num = t.num.scaled(-invm.M[j][k]);
      acc = frac_add(acc, t, slots, ring->field, ring->nvars());
    }
    invm.c[j] = std::move(acc);
  }
  iso.inv_map = invm;
  AffineLeg back = build_affine_leg(iso.to, invm);
  if (!back.target->same(*ring))
    throw Error(Status::InternalError, "affine map round trip left the ring");
  iso.comp_inv = std::move(back.comp);
  return iso;
}

RingIso rewrite_pair(const RingPtr& ring, int idx, std::vector<Polynomial> new_f,
                     LinearForm new_l) {
  auto out = clone_ring(*ring);
  out->pairs[idx].f = std::move(new_f);
  out->pairs[idx].l = std::move(new_l);
  Frac nv = out->pair_value(idx);
  if (nv.num.is_zero())
    throw Error(Status::InternalError, "rewritten pair evaluates to zero");
  out->pairs[idx].slot_poly = nv.num;

  // the two presentations must denote the same inverted value
  Frac ov = ring->pair_value(idx);
  {
    std::vector<Polynomial> slots = slot_table(ring);
    Polynomial lhs = ov.num * den_product(nv.den, slots, ring->field, ring->nvars());
    Polynomial rhs = nv.num * den_product(ov.den, slots, ring->field, ring->nvars());
    if (lhs != rhs)
      throw Error(Status::InternalError, "pair rewrite changed the inverted element");
  }

  RingIso iso;
  iso.from = ring;
  iso.to = out;
  iso.fwd_map = AffineYMap::identity(ring);
  iso.inv_map = iso.fwd_map;
  const int ns = ring->slot_count();
  iso.comp_fwd.assign(ns, Expvec(ns, 0));
  iso.comp_inv.assign(ns, Expvec(ns, 0));
  // identity on variables: old and new slot polynomials present the same
  // inverted value, D/prod^{ov.den} == D'/prod^{nv.den}
  int slot = ring->pair_slot(idx);
  Expvec delta_fwd(ns, 0), delta_inv(ns, 0);
  for (int s = 0; s < ns; ++s) {
    delta_fwd[s] = nv.den[s] - ov.den[s];
    delta_inv[s] = -delta_fwd[s];
  }
  verify_slot_comp(Frac{ring->slot_poly(slot), Expvec(ns, 0)}, out->slot_poly(slot),
                   delta_fwd, slot_table(out), ring->field, ring->nvars());
  verify_slot_comp(Frac{out->slot_poly(slot), Expvec(ns, 0)}, ring->slot_poly(slot),
                   delta_inv, slot_table(ring), ring->field, ring->nvars());
  iso.comp_fwd[slot] = std::move(delta_fwd);
  iso.comp_inv[slot] = std::move(delta_inv);
  return iso;
}

// ---- linear form normalization ----

NormalizeResult normalize_linear_form(const RingPtr& ring, int idx) {
  const int mm = ring->m();
  if (mm < 1) throw Error(Status::InternalError, "normalization needs a Y variable");
  const InvertedPair& pr = ring->pairs[idx];
  const Field& F = ring->field;
  NormalizeResult out;

  RingPtr cur = ring;
  std::vector<Scalar> a = pr.l.coeffs;
  Frac b = pr.l.b;

  if (mm == 1) {
    // absorb the scale into f: f'(T) = f(a*T), l' = Y - b/a
    if (!a[0].is_one()) {
      std::vector<Polynomial> nf = pr.f;
      Scalar ak = Scalar::one(F);
      for (std::size_t k = 1; k < nf.size(); ++k) {
        ak = ak * a[0];
        nf[k] = nf[k].scaled(ak);
      }
      LinearForm nl;
      nl.coeffs = {Scalar::one(F)};
      nl.b = Frac{b.num.scaled(a[0].inverse()), b.den};
      out.chain.steps.push_back(rewrite_pair(cur, idx, std::move(nf), std::move(nl)));
      cur = out.chain.steps.back().to;
      b = cur->pairs[idx].l.b;
    }
    out.translation = b;
    if (!b.num.is_zero()) {
      AffineYMap tr = AffineYMap::identity(cur);
      tr.c[0] = b;
      out.chain.steps.push_back(apply_affine(cur, tr));
      cur = out.chain.steps.back().to;
    }
  } else {
    // elementary word theta over k with theta * a == e_m
    std::vector<Scalar> work = a;
    const int last = mm - 1;
    auto emit = [&](int i, int j, const Scalar& lam) {
      if (lam.is_zero()) return;
      out.theta.push_back({i, j, lam});
      work[i] = work[i] + lam * work[j];
    };
    if (!work[last].is_one()) {
      int j = -1;
      for (int k = 0; k < last; ++k)
        if (!work[k].is_zero()) { j = k; break; }
      if (j < 0) {
        // only the pivot entry is nonzero; stage an auxiliary 1 in slot 0
        emit(0, last, work[last].inverse());
        j = 0;
      }
      emit(last, j, (Scalar::one(F) - work[last]) / work[j]);
    }
    for (int j = 0; j < last; ++j)
      if (!work[j].is_zero()) emit(j, last, -work[j]);
    if (!work[last].is_one())
      throw Error(Status::InternalError, "linear form normalization failed");
    for (int k = 0; k < last; ++k)
      if (!work[k].is_zero())
        throw Error(Status::InternalError, "linear form normalization failed");

    // theta matrix: product of generators in application order
    std::vector<std::vector<Scalar>> theta(mm, std::vector<Scalar>(mm, Scalar::zero(F)));
    for (int i = 0; i < mm; ++i) theta[i][i] = Scalar::one(F);
    for (const auto& g : out.theta)
      for (int c = 0; c < mm; ++c)
        theta[g.i][c] = theta[g.i][c] + g.lambda * theta[g.j][c];

    // composite map: Y_j -> sum_k theta[k][j] Y_k + b * theta[last][j]
    AffineYMap mp = AffineYMap::identity(cur);
    for (int j = 0; j < mm; ++j)
      for (int k = 0; k < mm; ++k) mp.M[j][k] = theta[k][j];
    out.translation = b;
    for (int j = 0; j < mm; ++j)
      mp.c[j] = Frac{b.num.scaled(theta[last][j]), b.den};
    out.chain.steps.push_back(apply_affine(cur, mp));
    cur = out.chain.steps.back().to;
  }

  // postcondition: pair idx now reads l = Y_last exactly
  const InvertedPair& done = cur->pairs[idx];
  for (int j = 0; j < mm; ++j) {
    bool want_one = j == mm - 1;
    if (want_one != done.l.coeffs[j].is_one() ||
        (!want_one && !done.l.coeffs[j].is_zero()))
      throw Error(Status::InternalError, "normalized linear form is not Y_last");
  }
  if (!done.l.b.num.is_zero())
    throw Error(Status::InternalError, "normalized linear form kept a constant");
  if (out.chain.steps.empty()) {
    // already normalized: represent the identity iso explicitly
    out.chain.steps.push_back(apply_affine(cur, AffineYMap::identity(cur)));
  }
  return out;
}

// ---- localize ----

Localization localize(const RingPtr& ring, const Polynomial& extra) {
  if (extra.is_zero()) throw Error(Status::ParseError, "localization at zero");
  Localization loc;
  loc.from = ring;
  auto out = clone_ring(*ring);
  bool base_only = true;
  for (int y : ring->y_slots) base_only = base_only && !extra.uses_var(y);
  const int nb = static_cast<int>(ring->base_inverted.size());
  const int na = static_cast<int>(ring->aux_inverted.size());
  const int ns = ring->slot_count();
  loc.slot_map.assign(ns, 0);
  if (base_only) {
    out->base_inverted.push_back(extra);
    loc.new_slot = nb;
    for (int i = 0; i < ns; ++i) loc.slot_map[i] = i < nb ? i : i + 1;
  } else {
    out->aux_inverted.push_back(extra);
    loc.new_slot = nb + na;
    for (int i = 0; i < ns; ++i) loc.slot_map[i] = i < nb + na ? i : i + 1;
  }
  // pair b denominators re-index
  for (auto& pr : out->pairs) {
    Expvec nd(ns + 1, 0);
    for (int i = 0; i < ns; ++i) nd[loc.slot_map[i]] = pr.l.b.den[i];
    pr.l.b.den = std::move(nd);
  }
  loc.to = out;
  for (int i = 0; i < out->n(); ++i)
    if (out->pair_value(i).num != out->pairs[i].slot_poly)
      throw Error(Status::InternalError, "localization disturbed a pair slot");
  return loc;
}

RingElement Localization::inject(const RingElement& x) const {
  Expvec den(to->slot_count(), 0);
  for (int i = 0; i < from->slot_count(); ++i) den[slot_map[i]] = x.den()[i];
  return RingElement(to, x.num(), std::move(den));
}

std::optional<RingElement> Localization::retract(const RingElement& x) const {
  if (x.den()[new_slot] != 0) return std::nullopt;
  Expvec den(from->slot_count(), 0);
  for (int i = 0; i < from->slot_count(); ++i) den[i] = x.den()[slot_map[i]];
  return RingElement(from, x.num(), std::move(den));
}

// ---- drop pair ----

PairDrop drop_pair(const RingPtr& ring, int idx) {
  PairDrop pd;
  pd.from = ring;
  auto out = clone_ring(*ring);
  out->pairs.erase(out->pairs.begin() + idx);
  const int ns_from = ring->slot_count();
  pd.dropped_slot = ring->pair_slot(idx);
  pd.slot_map_to_from.clear();
  for (int i = 0; i < ns_from; ++i)
    if (i != pd.dropped_slot) pd.slot_map_to_from.push_back(i);
  for (auto& pr : out->pairs) {
    if (pr.l.b.den[pd.dropped_slot] != 0)
      throw Error(Status::InternalError, "dropped slot appears in a pair constant");
    Expvec nd(ns_from - 1, 0);
    for (int i = 0; i < ns_from - 1; ++i) nd[i] = pr.l.b.den[pd.slot_map_to_from[i]];
    pr.l.b.den = std::move(nd);
  }
  pd.to = out;
  for (int i = 0; i < out->n(); ++i)
    if (out->pair_value(i).num != out->pairs[i].slot_poly)
      throw Error(Status::InternalError, "pair drop disturbed a slot polynomial");
  return pd;
}

RingElement PairDrop::inject(const RingElement& x) const {
  Expvec den(from->slot_count(), 0);
  for (std::size_t i = 0; i < slot_map_to_from.size(); ++i)
    den[slot_map_to_from[i]] = x.den()[i];
  return RingElement(from, x.num(), std::move(den));
}

std::optional<RingElement> PairDrop::retract(const RingElement& x) const {
  if (x.den()[dropped_slot] != 0) return std::nullopt;
  Expvec den(to->slot_count(), 0);
  for (std::size_t i = 0; i < slot_map_to_from.size(); ++i)
    den[i] = x.den()[slot_map_to_from[i]];
  return RingElement(to, x.num(), std::move(den));
}

// ---- unwrap ----

Unwrap unwrap_pair(const RingPtr& ring, int idx) {
  const InvertedPair& pr = ring->pairs[idx];
  int pivot_j = -1;
  for (std::size_t j = 0; j < pr.l.coeffs.size(); ++j) {
    if (pr.l.coeffs[j].is_zero()) continue;
    if (pivot_j != -1 || !pr.l.coeffs[j].is_one())
      throw Error(Status::InternalError, "unwrap requires l = Y_pivot exactly");
    pivot_j = static_cast<int>(j);
  }
  if (pivot_j < 0 || !pr.l.b.num.is_zero())
    throw Error(Status::InternalError, "unwrap requires l = Y_pivot exactly");
  const int pivot = ring->y_slots[pivot_j];

  Unwrap uw;
  uw.from = ring;
  uw.pivot_slot = pivot;
  auto out = clone_ring(*ring);
  out->is_base[pivot] = true;
  rebuild_slots(*out);

  const int ns = ring->slot_count();
  const int nb = static_cast<int>(ring->base_inverted.size());
  const int na = static_cast<int>(ring->aux_inverted.size());

  // decide destinations: unwrapped pair -> base_inverted; pairs whose
  // remaining coefficients vanish migrate to base_inverted as well
  std::vector<int> migrate; // pair indices (in `ring`) moving to the base
  migrate.push_back(idx);
  for (int i = 0; i < ring->n(); ++i) {
    if (i == idx) continue;
    bool allzero = true;
    for (std::size_t j = 0; j < ring->pairs[i].l.coeffs.size(); ++j)
      if (static_cast<int>(j) != pivot_j && !ring->pairs[i].l.coeffs[j].is_zero())
        allzero = false;
    if (allzero) migrate.push_back(i);
  }
  std::sort(migrate.begin(), migrate.end());

  out->pairs.clear();
  out->base_inverted = ring->base_inverted;
  std::vector<int> new_slot_of(ns, -1);
  for (int i = 0; i < nb; ++i) new_slot_of[i] = i;
  for (std::size_t k = 0; k < migrate.size(); ++k) {
    out->base_inverted.push_back(ring->pairs[migrate[k]].slot_poly);
    new_slot_of[ring->pair_slot(migrate[k])] = nb + static_cast<int>(k);
  }
  const int nb_out = static_cast<int>(out->base_inverted.size());
  for (int i = 0; i < na; ++i) new_slot_of[nb + i] = nb_out + i;
  int pcount = 0;
  for (int i = 0; i < ring->n(); ++i) {
    if (std::find(migrate.begin(), migrate.end(), i) != migrate.end()) continue;
    InvertedPair np = ring->pairs[i];
    // b' = b - a_pivot * Y_pivot, coefficients drop the pivot slot
    Scalar apiv = np.l.coeffs[pivot_j];
    np.l.coeffs.erase(np.l.coeffs.begin() + pivot_j);
    if (!apiv.is_zero()) {
      Polynomial shift =
          Polynomial::variable(ring->field, ring->nvars(), pivot).scaled(apiv);
      std::vector<Polynomial> slots = slot_table(ring);
      Frac t{-shift, Expvec(ns, 0)};
      np.l.b = frac_add_raw(np.l.b, t, slots, ring->field, ring->nvars());
    }
    out->pairs.push_back(std::move(np));
    new_slot_of[ring->pair_slot(i)] = nb_out + na + pcount;
    ++pcount;
  }
  // re-index pair constants' denominators
  for (auto& np : out->pairs) {
    Expvec nd(ns, 0);
    for (int i = 0; i < ns; ++i) nd[new_slot_of[i]] = np.l.b.den[i];
    np.l.b.den = std::move(nd);
  }
  // maintain the invariant slot_poly == pair_value().num for survivors; the
  // rewritten constant may reduce, so record signed compensations
  uw.comp_fwd.assign(ns, Expvec(ns, 0));
  uw.comp_inv.assign(ns, Expvec(ns, 0));
  std::vector<Polynomial> slots_out_tbl;
  for (int i = 0, p = 0; i < ring->n(); ++i) {
    if (std::find(migrate.begin(), migrate.end(), i) != migrate.end()) continue;
    Frac nv = out->pair_value(p);
    if (nv.num.is_zero())
      throw Error(Status::InternalError, "unwrap vanished an inverted pair");
    out->pairs[p].slot_poly = nv.num;
    Frac ov = ring->pair_value(i);
    Expvec ov_den_mapped(ns, 0);
    for (int s = 0; s < ns; ++s) ov_den_mapped[new_slot_of[s]] = ov.den[s];
    int fslot = ring->pair_slot(i);
    Expvec delta(ns, 0), delta_back(ns, 0);
    for (int s = 0; s < ns; ++s) {
      delta[s] = nv.den[s] - ov_den_mapped[s];
      delta_back[s] = -delta[s];
    }
    // permute delta entries back through the slot map for the inverse leg
    Expvec delta_from(ns, 0);
    for (int s = 0; s < ns; ++s) delta_from[s] = delta_back[new_slot_of[s]];
    uw.comp_fwd[fslot] = delta;
    uw.comp_inv[new_slot_of[fslot]] = delta_from;
    ++p;
  }
  uw.to = out;
  uw.slot_map = new_slot_of;
  uw.f_base_slot = new_slot_of[ring->pair_slot(idx)];
  // verify every nontrivial compensation exactly
  slots_out_tbl = slot_table(out);
  for (int i = 0; i < ns; ++i) {
    if (expvec_total(uw.comp_fwd[i]) == 0) {
      bool allz = true;
      for (int s = 0; s < ns; ++s) allz = allz && uw.comp_fwd[i][s] == 0;
      if (allz) continue;
    }
    Expvec perm(ns, 0); // image fraction of the old slot poly over out-slots
    verify_slot_comp(Frac{ring->slot_poly(i), perm}, out->slot_poly(uw.slot_map[i]),
                     uw.comp_fwd[i], slots_out_tbl, ring->field, ring->nvars());
  }
  return uw;
}

namespace {

RingElement remap_with_comp(const RingPtr& source, const RingPtr& target,
                            const std::vector<int>& smap,
                            const std::vector<Expvec>& comp, const RingElement& x) {
  Polynomial num = x.num();
  Expvec den(target->slot_count(), 0);
  for (int i = 0; i < source->slot_count(); ++i) {
    int d = x.den()[i];
    if (d == 0) continue;
    den[smap[i]] += d;
    for (int s = 0; s < target->slot_count(); ++s) {
      int c = comp[i][s] * d;
      if (c > 0) num = num * target->slot_poly(s).pow(static_cast<unsigned>(c));
      else if (c < 0) den[s] += -c;
    }
  }
  return RingElement(target, std::move(num), std::move(den));
}

} // namespace

RingElement Unwrap::transport(const RingElement& x) const {
  return remap_with_comp(from, to, slot_map, comp_fwd, x);
}

RingElement Unwrap::back(const RingElement& x) const {
  std::vector<int> inv_map(slot_map.size(), 0);
  for (std::size_t i = 0; i < slot_map.size(); ++i) inv_map[slot_map[i]] = static_cast<int>(i);
  return remap_with_comp(to, from, inv_map, comp_inv, x);
}

} // namespace unimod

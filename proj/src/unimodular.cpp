#include "unimodular.hpp"

namespace unimod {

UnimodularCheck is_unimodular(const RVector& v, const Config& cfg) {
  if (v.empty()) throw Error(Status::InternalError, "empty vector");
  const RingPtr& R = v[0].ring();
  for (const auto& e : v)
    if (!e.ring()->same(*R))
      throw Error(Status::InternalError, "vector entries from different rings");

  UnimodularCheck out;
  std::vector<Polynomial> nums;
  nums.reserve(v.size());
  for (const auto& e : v) nums.push_back(e.num());
  Polynomial h = R->inverted_product();
  auto sat = saturation_membership(Polynomial::one(R->field, R->nvars()), nums, h,
                                   cfg.saturation_emax);
  if (sat.kind == SaturationKind::BoundExceeded) {
    out.status = Status::BoundExceeded;
    return out;
  }
  if (sat.kind == SaturationKind::NotMember) return out;

  out.status = Status::Ok;
  out.poly_cert = sat.cert;
  // C_i = c_i * prod D^{den_i} / H^e
  const unsigned e = sat.cert.exponent;
  out.cofactors.reserve(v.size());
  RingElement acc = RingElement::zero(R);
  for (std::size_t i = 0; i < v.size(); ++i) {
    Polynomial num = sat.cert.cofactors[i];
    for (int s = 0; s < R->slot_count(); ++s)
      if (v[i].den()[s] > 0)
        num = num * R->slot_poly(s).pow(static_cast<unsigned>(v[i].den()[s]));
    Expvec den(R->slot_count(), static_cast<int>(e));
    RingElement C(R, std::move(num), std::move(den));
    acc = acc + C * v[i];
    out.cofactors.push_back(std::move(C));
  }
  if (!acc.is_one())
    throw Error(Status::InternalError, "unimodularity cofactors failed replay");
  return out;
}

UnimodularVector make_unimodular(const RVector& v, const Config& cfg) {
  UnimodularVector uv;
  uv.entries = v;
  uv.cert = is_unimodular(v, cfg);
  if (uv.cert.status != Status::Ok)
    throw Error(uv.cert.status, "vector is not verified unimodular");
  return uv;
}

RVector transform_cofactors(const RVector& cofactors, const ElementaryWord& w) {
  // row vector times M^{-1}: apply column operations of the inverse word,
  // i.e. for each generator (in order) the transpose action on rows.
  RVector c(cofactors);
  for (const auto& g : w.gens) {
    // v' = E_{ij}(lambda) v  =>  c' = c E_{ij}(-lambda): col j gains -lambda*col i
    c[g.j] = c[g.j] - g.lambda * c[g.i];
  }
  return c;
}

std::optional<RingElement> ring_divexact(const RingElement& a, const RingElement& b) {
  if (b.is_zero()) return std::nullopt;
  if (a.is_zero()) return RingElement::zero(a.ring());
  const RingPtr& R = a.ring();
  // a/b = (num_a * prod D^{den_b}) / (num_b * prod D^{den_a})
  Polynomial num = a.num();
  for (int s = 0; s < R->slot_count(); ++s)
    if (b.den()[s] > 0) num = num * R->slot_poly(s).pow(unsigned(b.den()[s]));
  auto q = num.divexact(b.num());
  if (!q) return std::nullopt;
  return RingElement(R, std::move(*q), a.den());
}

namespace {

constexpr std::uint32_t kProbePrime = 2147483629u;

std::optional<Polynomial> mod_image(const Polynomial& p, const Field& fp) {
  Polynomial out(fp, p.nvars());
  for (const auto& [e, c] : p.terms()) {
    const mpq_class& q = c.rational();
    unsigned long den = mpz_fdiv_ui(q.get_den().get_mpz_t(), kProbePrime);
    if (den == 0) return std::nullopt;
    unsigned long num = mpz_fdiv_ui(q.get_num().get_mpz_t(), kProbePrime);
    Scalar s = Scalar::from_int(fp, static_cast<long long>(num)) *
               Scalar::from_int(fp, static_cast<long long>(den)).inverse();
    out.add_term(e, s);
  }
  return out;
}

} // namespace

bool unimodular_mod_probe(const RVector& v) {
  const RingPtr& R = v[0].ring();
  if (R->field.kind != Field::Kind::Q) return true;
  Field fp = Field::prime(kProbePrime);
  const int nv = R->nvars();
  std::vector<Polynomial> gens;
  for (const auto& e : v) {
    auto img = mod_image(e.num(), fp);
    if (!img) return true;
    gens.push_back(img->extended(nv + 1));
  }
  auto h = mod_image(R->inverted_product(), fp);
  if (!h || h->is_zero()) return true;
  gens.push_back(Polynomial::variable(fp, nv + 1, nv) * h->extended(nv + 1) -
                 Polynomial::one(fp, nv + 1));
  MonomialOrder ord = MonomialOrder::eliminate({nv}, nv + 1);
  std::vector<Polynomial> gb = groebner_basis(gens, ord);
  return divide(Polynomial::one(fp, nv + 1), gb, ord).remainder.is_zero();
}

} // namespace unimod

#include "groebner.hpp"

#include <algorithm>
#include <set>

namespace unimod {

bool MembershipCertificate::replays(const Polynomial& target,
                                    const std::vector<Polynomial>& gens) const {
  if (cofactors.size() != gens.size()) return false;
  Polynomial lhs(target.field(), target.nvars());
  for (std::size_t i = 0; i < gens.size(); ++i)
    lhs = lhs + cofactors[i] * gens[i];
  Polynomial rhs = h.pow(exponent) * target;
  return lhs == rhs;
}

DivisionResult divide(const Polynomial& p, const std::vector<Polynomial>& divisors,
                      const MonomialOrder& ord) {
  DivisionResult out;
  out.remainder = Polynomial::zero(p.field(), p.nvars());
  out.quotients.assign(divisors.size(), Polynomial::zero(p.field(), p.nvars()));
  Polynomial work(p);
  while (!work.is_zero()) {
    const auto& lt = work.leading(ord);
    bool reduced = false;
    for (std::size_t i = 0; i < divisors.size(); ++i) {
      if (divisors[i].is_zero()) continue;
      const auto& dl = divisors[i].leading(ord);
      if (!expvec_divides(dl.first, lt.first)) continue;
      Expvec e = expvec_sub(lt.first, dl.first);
      Scalar c = lt.second / dl.second;
      out.quotients[i].add_term(e, c);
      work = work - divisors[i].mul_term(e, c);
      reduced = true;
      break;
    }
    if (!reduced) {
      out.remainder.add_term(lt.first, lt.second);
      Polynomial next(work.field(), work.nvars());
      for (const auto& [e, c] : work.terms())
        if (e != lt.first) next.add_term(e, c);
      work = next;
    }
  }
  return out;
}

namespace {

struct Row {
  Polynomial poly;                // monic
  std::vector<Polynomial> reps;   // poly == sum reps[j] * gens[j]
};

void make_monic_row(Row& r, const MonomialOrder& ord) {
  Scalar lc = r.poly.leading(ord).second;
  if (lc.is_one()) return;
  Scalar inv = lc.inverse();
  r.poly = r.poly.scaled(inv);
  for (auto& q : r.reps) q = q.scaled(inv);
}

// Full reduction of a row against the current basis, rep-tracked.
void reduce_row(Row& r, const std::vector<Row>& basis, const MonomialOrder& ord) {
  Polynomial rem(r.poly.field(), r.poly.nvars());
  Polynomial work = r.poly;
  while (!work.is_zero()) {
    const auto lt = work.leading(ord); // copy: work mutates below
    bool hit = false;
    for (const auto& b : basis) {
      const auto& bl = b.poly.leading(ord);
      if (!expvec_divides(bl.first, lt.first)) continue;
      Expvec e = expvec_sub(lt.first, bl.first);
      Scalar c = lt.second / bl.second;
      work = work - b.poly.mul_term(e, c);
      for (std::size_t j = 0; j < r.reps.size(); ++j)
        r.reps[j] = r.reps[j] - b.reps[j].mul_term(e, c);
      hit = true;
      break;
    }
    if (!hit) {
      rem.add_term(lt.first, lt.second);
      Polynomial next(work.field(), work.nvars());
      for (const auto& [e, c] : work.terms())
        if (e != lt.first) next.add_term(e, c);
      work = next;
    }
  }
  r.poly = rem;
}

struct Pair {
  std::size_t i, j;
  Expvec lcm;
};

TrackedBasis buchberger(const std::vector<Polynomial>& gens, const MonomialOrder& ord) {
  TrackedBasis out;
  out.ord = ord;
  const std::size_t ngens = gens.size();
  if (ngens == 0) return out;
  const Field f = gens[0].field();
  const int nv = gens[0].nvars();
  for (const auto& g : gens) {
    if (g.field() != f) throw Error(Status::InternalError, "mixed coefficient fields in ideal");
    if (g.nvars() != nv) throw Error(Status::InternalError, "generator arity mismatch");
  }

  std::vector<Row> basis;
  auto zero_reps = [&] { return std::vector<Polynomial>(ngens, Polynomial::zero(f, nv)); };
  for (std::size_t j = 0; j < ngens; ++j) {
    if (gens[j].is_zero()) continue;
    Row r{gens[j], zero_reps()};
    r.reps[j] = Polynomial::one(f, nv);
    make_monic_row(r, ord);
    basis.push_back(std::move(r));
  }

  std::vector<Pair> queue;
  std::set<std::pair<std::size_t, std::size_t>> treated;
  auto push_pairs = [&](std::size_t k) {
    for (std::size_t i = 0; i < k; ++i)
      queue.push_back({i, k, expvec_lcm(basis[i].poly.leading(ord).first,
                                        basis[k].poly.leading(ord).first)});
  };
  for (std::size_t k = 1; k < basis.size(); ++k) push_pairs(k);

  while (!queue.empty()) {
    // normal selection: minimal lcm, ties by index
    std::size_t best = 0;
    for (std::size_t q = 1; q < queue.size(); ++q) {
      int c = ord.cmp(queue[q].lcm, queue[best].lcm);
      if (c < 0 || (c == 0 && std::tie(queue[q].i, queue[q].j) <
                                  std::tie(queue[best].i, queue[best].j)))
        best = q;
    }
    Pair pr = queue[best];
    queue.erase(queue.begin() + static_cast<long>(best));
    treated.insert({pr.i, pr.j});

    const Expvec& li = basis[pr.i].poly.leading(ord).first;
    const Expvec& lj = basis[pr.j].poly.leading(ord).first;
    // first criterion: coprime leading monomials
    if (pr.lcm == expvec_add(li, lj)) continue;
    // chain criterion
    bool skip = false;
    for (std::size_t k = 0; k < basis.size() && !skip; ++k) {
      if (k == pr.i || k == pr.j) continue;
      if (!expvec_divides(basis[k].poly.leading(ord).first, pr.lcm)) continue;
      auto key = [&](std::size_t a, std::size_t b) {
        return std::make_pair(std::min(a, b), std::max(a, b));
      };
      if (treated.count(key(pr.i, k)) && treated.count(key(pr.j, k))) skip = true;
    }
    if (skip) continue;

    Row s;
    s.reps = zero_reps();
    Expvec ei = expvec_sub(pr.lcm, li), ej = expvec_sub(pr.lcm, lj);
    Scalar one = Scalar::one(f);
    s.poly = basis[pr.i].poly.mul_term(ei, one) - basis[pr.j].poly.mul_term(ej, one);
    for (std::size_t t = 0; t < ngens; ++t)
      s.reps[t] = basis[pr.i].reps[t].mul_term(ei, one) -
                  basis[pr.j].reps[t].mul_term(ej, one);
    reduce_row(s, basis, ord);
    if (s.poly.is_zero()) continue;
    make_monic_row(s, ord);
    basis.push_back(std::move(s));
    push_pairs(basis.size() - 1);
  }

  // minimalize: drop rows whose leading term another row's divides
  std::vector<bool> keep(basis.size(), true);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    if (!keep[a]) continue;
    for (std::size_t b = 0; b < basis.size(); ++b) {
      if (a == b || !keep[a]) continue;
      if (!keep[b]) continue;
      const Expvec& la = basis[a].poly.leading(ord).first;
      const Expvec& lb = basis[b].poly.leading(ord).first;
      if (expvec_divides(lb, la) && la != lb) keep[a] = false;
      else if (la == lb && b < a) keep[a] = false;
    }
  }
  std::vector<Row> minimal;
  for (std::size_t a = 0; a < basis.size(); ++a)
    if (keep[a]) minimal.push_back(std::move(basis[a]));

  // inter-reduce tails
  for (std::size_t a = 0; a < minimal.size(); ++a) {
    std::vector<Row> others;
    for (std::size_t b = 0; b < minimal.size(); ++b)
      if (b != a) others.push_back(minimal[b]);
    reduce_row(minimal[a], others, ord);
    if (minimal[a].poly.is_zero())
      throw Error(Status::InternalError, "minimal basis row reduced to zero");
    make_monic_row(minimal[a], ord);
  }

  std::sort(minimal.begin(), minimal.end(), [&](const Row& x, const Row& y) {
    return ord.greater(x.poly.leading(ord).first, y.poly.leading(ord).first);
  });

  for (auto& r : minimal) {
    out.basis.push_back(std::move(r.poly));
    out.reps.push_back(std::move(r.reps));
  }
  return out;
}

} // namespace

std::vector<Polynomial> groebner_basis(const std::vector<Polynomial>& gens,
                                       const MonomialOrder& ord) {
  return buchberger(gens, ord).basis;
}

TrackedBasis groebner_basis_tracked(const std::vector<Polynomial>& gens,
                                    const MonomialOrder& ord) {
  TrackedBasis tb = buchberger(gens, ord);
  // paranoia at desk scale: representations must replay
  for (std::size_t i = 0; i < tb.basis.size(); ++i) {
    Polynomial acc(tb.basis[i].field(), tb.basis[i].nvars());
    for (std::size_t j = 0; j < gens.size(); ++j) acc = acc + tb.reps[i][j] * gens[j];
    if (acc != tb.basis[i])
      throw Error(Status::InternalError, "cofactor tracking lost an identity");
  }
  return tb;
}

Polynomial normal_form(const Polynomial& p, const std::vector<Polynomial>& basis,
                       const MonomialOrder& ord) {
  for (std::size_t a = 0; a < basis.size(); ++a) {
    if (basis[a].is_zero())
      throw Error(Status::InternalError, "zero element in basis");
    for (std::size_t b = 0; b < basis.size(); ++b) {
      if (a == b) continue;
      if (expvec_divides(basis[b].leading(ord).first, basis[a].leading(ord).first))
        throw Error(Status::InternalError, "basis not autoreduced");
    }
  }
  return divide(p, basis, ord).remainder;
}

std::optional<MembershipCertificate>
membership_certificate(const Polynomial& target, const std::vector<Polynomial>& gens,
                       const TrackedBasis& tb) {
  DivisionResult dr = divide(target, tb.basis, tb.ord);
  if (!dr.remainder.is_zero()) return std::nullopt;
  MembershipCertificate cert;
  cert.exponent = 0;
  cert.h = Polynomial::one(target.field(), target.nvars());
  cert.cofactors.assign(gens.size(), Polynomial::zero(target.field(), target.nvars()));
  for (std::size_t i = 0; i < tb.basis.size(); ++i)
    for (std::size_t j = 0; j < gens.size(); ++j)
      cert.cofactors[j] = cert.cofactors[j] + dr.quotients[i] * tb.reps[i][j];
  if (!cert.replays(target, gens))
    throw Error(Status::InternalError, "membership certificate failed replay");
  return cert;
}

std::optional<MembershipCertificate>
membership_certificate(const Polynomial& target, const std::vector<Polynomial>& gens) {
  if (target.is_zero()) {
    MembershipCertificate cert;
    cert.exponent = 0;
    cert.h = Polynomial::one(target.field(), target.nvars());
    cert.cofactors.assign(gens.size(), Polynomial::zero(target.field(), target.nvars()));
    return cert;
  }
  TrackedBasis tb = groebner_basis_tracked(gens, MonomialOrder::degrevlex());
  return membership_certificate(target, gens, tb);
}

SaturationResult saturation_membership(const Polynomial& target,
                                       const std::vector<Polynomial>& gens,
                                       const Polynomial& h, unsigned emax) {
  if (h.is_zero()) throw Error(Status::InternalError, "saturation by zero");
  const Field f = target.field();
  const int nv = target.nvars();
  SaturationResult res{SaturationKind::NotMember, {}};

  if (target.is_zero()) {
    res.kind = SaturationKind::Member;
    res.cert.exponent = 0;
    res.cert.h = h;
    res.cert.cofactors.assign(gens.size(), Polynomial::zero(f, nv));
    return res;
  }

  // existence via the auxiliary variable: target in (gens, t*h - 1)?
  const int nv1 = nv + 1;
  std::vector<Polynomial> ext;
  ext.reserve(gens.size() + 1);
  for (const auto& g : gens) ext.push_back(g.extended(nv1));
  Polynomial trick = Polynomial::variable(f, nv1, nv) * h.extended(nv1) -
                     Polynomial::one(f, nv1);
  ext.push_back(trick);
  MonomialOrder elim = MonomialOrder::eliminate({nv}, nv1);
  std::vector<Polynomial> gb = groebner_basis(ext, elim);
  if (!divide(target.extended(nv1), gb, elim).remainder.is_zero())
    return res; // NotMember

  TrackedBasis tb = groebner_basis_tracked(gens, MonomialOrder::degrevlex());
  Polynomial hp = Polynomial::one(f, nv);
  for (unsigned e = 0; e <= emax; ++e) {
    if (auto cert = membership_certificate(hp * target, gens, tb)) {
      res.kind = SaturationKind::Member;
      res.cert = std::move(*cert);
      res.cert.exponent = e;
      res.cert.h = h;
      if (!res.cert.replays(target, gens))
        throw Error(Status::InternalError, "saturation certificate failed replay");
      return res;
    }
    hp = hp * h;
  }
  res.kind = SaturationKind::BoundExceeded;
  return res;
}

} // namespace unimod

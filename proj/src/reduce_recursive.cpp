#include <algorithm>

#include "fiber.hpp"

namespace unimod {

namespace {

// One unwrapped localization layer: the pivot variable it owns and the
// univariate polynomial f inverted over it.
struct TowerLayer {
  int var;
  Polynomial f;
};

// A licensed inversion: c * p == f^a * (D + f*h) over the layer's variable,
// with D a product of elements invertible below the layer. Localizing at
// gtilde = D + f*h (when h != 0) makes p invertible; gtilde/D lies in
// 1 + f * R[var], the multiplicative set the fiber square localizes at.
struct Grant {
  int layer = -1;
  Polynomial p, c, h, D;
  unsigned fpow = 0;
  std::vector<Polynomial> d_factors;
  Polynomial layer_f; // copy of the owning layer's f

  Polynomial gtilde() const { return D + h * layer_f; }
};

struct GrantRequest {
  std::vector<Grant> grants;
};

struct RecCtx {
  const Config& cfg;
  Rng& rng;
  std::vector<std::string>& stages;
  int grant_rounds = 0;
};

void note_stage(RecCtx& ctx, const char* s) {
  if (ctx.stages.empty() || ctx.stages.back() != s) ctx.stages.emplace_back(s);
}

// ---- rational pairs: N / Den with Den free of the working variable ----

struct RatP {
  Polynomial n, d;
};

RatP rp_make(const Polynomial& n, const Polynomial& d) { return {n, d}; }
RatP rp_poly(const Polynomial& n) { return {n, Polynomial::one(n.field(), n.nvars())}; }
RatP rp_add(const RatP& a, const RatP& b) { return {a.n * b.d + b.n * a.d, a.d * b.d}; }
RatP rp_sub(const RatP& a, const RatP& b) { return {a.n * b.d - b.n * a.d, a.d * b.d}; }
RatP rp_mul(const RatP& a, const RatP& b) { return {a.n * b.n, a.d * b.d}; }

// quotient of univariate-in-var division of a by b over the rational field
// of the remaining variables; returns (q, r) with a == q*b + r, deg r < deg b
std::pair<RatP, RatP> rp_divmod(const RatP& a, const RatP& b, int var) {
  RatP q = rp_poly(Polynomial::zero(a.n.field(), a.n.nvars()));
  RatP r = a;
  const int db = b.n.degree_in(var);
  const Polynomial lcb = b.n.coeff_in(var, db);
  int guard = 0;
  while (!r.n.is_zero() && r.n.degree_in(var) >= db) {
    if (++guard > 512)
      throw Error(Status::InternalError, "rational univariate division diverged");
    const int da = r.n.degree_in(var);
    Polynomial lca = r.n.coeff_in(var, da);
    // t = (lca * b.d) / (r.d * lcb) * var^(da-db)
    Expvec e(a.n.nvars(), 0);
    e[var] = da - db;
    RatP t{(lca * b.d).mul_term(e, Scalar::one(a.n.field())), r.d * lcb};
    q = rp_add(q, t);
    r = rp_sub(r, rp_mul(t, b));
    if (!r.n.is_zero() && r.n.degree_in(var) >= da)
      throw Error(Status::InternalError, "rational univariate division stalled");
  }
  return {q, r};
}

// ---- the licensed inversion engine ----

struct Tower {
  std::vector<TowerLayer> layers;

  int layer_of_var(int var) const {
    for (std::size_t i = 0; i < layers.size(); ++i)
      if (layers[i].var == var) return static_cast<int>(i);
    return -1;
  }
  bool pure_layer_poly(const Polynomial& p, int max_layer) const {
    for (int v = 0; v < p.nvars(); ++v) {
      if (!p.uses_var(v)) continue;
      int l = layer_of_var(v);
      if (l < 0 || l > max_layer) return false;
    }
    return true;
  }
  int top_layer_of(const Polynomial& p) const {
    int best = -1;
    for (int v = 0; v < p.nvars(); ++v)
      if (p.uses_var(v)) best = std::max(best, layer_of_var(v));
    return best;
  }
};

void licensed_invert(const Polynomial& p_in, const Tower& tower,
                     std::vector<Grant>& out);

void invert_factor_list(const std::vector<Polynomial>& fs, const Tower& tower,
                        std::vector<Grant>& out) {
  for (const auto& f : fs)
    if (!f.is_constant()) licensed_invert(f, tower, out);
}

void licensed_invert(const Polynomial& p_in, const Tower& tower,
                     std::vector<Grant>& out) {
  if (p_in.is_zero())
    throw Error(Status::InternalError, "licensed inversion of zero");
  Polynomial p = p_in;
  if (p.is_constant()) return;
  int lay = tower.top_layer_of(p);
  if (lay < 0 || !tower.pure_layer_poly(p, static_cast<int>(tower.layers.size()) - 1))
    throw Error(Status::SplittingPreconditionFailed,
                "element needed outside the licensed localization tower");
  for (const auto& g : out)
    if (g.p == p) return; // already granted in this batch
  const int var = tower.layers[lay].var;
  const Polynomial& f = tower.layers[lay].f;
  const Field& F = p.field();
  const int nv = p.nvars();

  // extended Euclid of (p, f) in `var` over the rational function field of
  // the lower layers: u*p + w*f == d
  RatP r0 = rp_poly(p), r1 = rp_poly(f);
  RatP u0 = rp_poly(Polynomial::one(F, nv)), u1 = rp_poly(Polynomial::zero(F, nv));
  RatP w0 = rp_poly(Polynomial::zero(F, nv)), w1 = rp_poly(Polynomial::one(F, nv));
  while (!r1.n.is_zero() && r1.n.degree_in(var) > 0) {
    auto [q, r] = rp_divmod(r0, r1, var);
    RatP nu = rp_sub(u0, rp_mul(q, u1));
    RatP nw = rp_sub(w0, rp_mul(q, w1));
    r0 = r1; r1 = r;
    u0 = u1; u1 = nu;
    w0 = w1; w1 = nw;
  }
  if (!r1.n.is_zero()) { // nonzero remainder of degree 0 in var: coprime case
    const RatP &u = u1, &w = w1, &d = r1;
    // (u/ud) p + (w/wd) f = dn/dd; clear: c*p == D + f*h
    Polynomial c = u.n * w.d * d.d;
    Polynomial h = -(w.n * u.d * d.d);
    Polynomial D = d.n * u.d * w.d;
    if (c * p != D + f * h)
      throw Error(Status::InternalError, "licensed inversion identity failed (coprime)");
    invert_factor_list({d.n, u.d, w.d}, tower, out);
    Grant g;
    g.layer = lay;
    g.p = p;
    g.c = c;
    g.h = h;
    g.D = D;
    g.fpow = 0;
    g.d_factors = {d.n, u.d, w.d};
    g.layer_f = f;
    out.push_back(std::move(g));
    return;
  }
  // gcd d := r0 has positive degree in var and divides both p and f
  RatP d = r0;
  auto [qf, rf] = rp_divmod(rp_poly(f), d, var);
  if (!rf.n.is_zero())
    throw Error(Status::InternalError, "gcd does not divide f");
  // qf.n * d.n == f * qf.d * d.d
  if (qf.n * d.n != f * (qf.d * d.d))
    throw Error(Status::InternalError, "licensed inversion identity failed (gcd/f)");
  invert_factor_list({qf.d, d.d}, tower, out);
  {
    Grant g;
    g.layer = lay;
    g.p = d.n;
    g.c = qf.n;
    g.h = Polynomial::zero(F, nv);
    g.D = qf.d * d.d;
    g.fpow = 1;
    g.d_factors = {qf.d, d.d};
    g.layer_f = f;
    bool dup = false;
    for (const auto& e : out) dup = dup || e.p == g.p;
    if (!dup) out.push_back(std::move(g));
  }
  auto [qp, rp] = rp_divmod(rp_poly(p), d, var);
  if (!rp.n.is_zero())
    throw Error(Status::InternalError, "gcd does not divide p");
  if (qp.n * d.n != p * (qp.d * d.d))
    throw Error(Status::InternalError, "licensed inversion identity failed (gcd/p)");
  // 1/p = (qp.d * d.d) / (d.n * qp.n): invert the cofactor too
  if (!qp.n.is_constant()) licensed_invert(qp.n, tower, out);
}

// ---- working state: ring + grants materialized as localizations ----

struct Work {
  RingPtr ring;
  RVector v;
  std::optional<TagState> tag;
  std::vector<Grant> grants; // everything granted at this level, in order

  void remap(const Localization& loc) {
    for (auto& e : v) e = loc.inject(e);
    if (tag) {
      tag->s = loc.inject(tag->s);
      tag->witness = loc.inject(tag->witness);
    }
  }

  bool has_slot(const Polynomial& p) const {
    for (int s = 0; s < ring->slot_count(); ++s)
      if (ring->slot_poly(s) == p) return true;
    return false;
  }

  void materialize(const std::vector<Grant>& gs) {
    for (const auto& g : gs) {
      grants.push_back(g);
      Polynomial gt = g.D + g.h * g.layer_f;
      if (gt.is_constant()) continue;
      if (!has_slot(gt)) {
        Localization loc = localize(ring, gt);
        ring = loc.to;
        remap(loc);
      }
    }
  }
};

// strip every exactly-dividing slot polynomial from a numerator
Polynomial slot_free_core(const Polynomial& num, const RingPtr& R) {
  Polynomial core = num;
  bool progress = true;
  while (progress && !core.is_constant()) {
    progress = false;
    for (int s = 0; s < R->slot_count(); ++s) {
      if (R->slot_poly(s).is_constant()) continue;
      if (auto q = core.divexact(R->slot_poly(s))) {
        core = std::move(*q);
        progress = true;
      }
    }
  }
  return core;
}

// is_unit with a licensed fallback: throws GrantRequest when new
// localizations would make x invertible
// drop grants whose localization already exists; returns true if anything new
bool prune_request(GrantRequest& req, const Work& wk) {
  std::vector<Grant> kept;
  bool fresh = false;
  for (auto& g : req.grants) {
    Polynomial gt = g.gtilde();
    bool is_new = !gt.is_constant() && !wk.has_slot(gt);
    fresh = fresh || is_new;
    kept.push_back(std::move(g));
  }
  req.grants = std::move(kept);
  return fresh;
}

UnitResult licensed_unit(const RingElement& x, const Work& wk, const Tower& tower,
                         const Config& cfg) {
  UnitResult u = is_unit(x, cfg);
  if (u.status != Status::NotUnit) return u;
  if (tower.layers.empty() || x.is_zero()) return u;
  Polynomial core = slot_free_core(x.num(), wk.ring);
  if (core.is_constant()) return u; // should have been a unit already
  if (!tower.pure_layer_poly(core, static_cast<int>(tower.layers.size()) - 1)) return u;
  GrantRequest req;
  licensed_invert(core, tower, req.grants);
  if (prune_request(req, wk)) throw req;
  return u;
}

// ---- word bookkeeping over an evolving ring ----

struct WordAcc {
  std::vector<ElementaryGen> gens;
  int size = 0;

  void remap(const Localization& loc) {
    for (auto& g : gens) {
      g.lambda = loc.inject(g.lambda);
      if (g.tag_quotient) g.tag_quotient = loc.inject(*g.tag_quotient);
    }
  }
  void gamma(Work& wk, int i, const RingElement& mu) {
    if (mu.is_zero()) return;
    gens.push_back({i, 0, mu, std::nullopt});
    wk.v[i] = wk.v[i] + mu * wk.v[0];
  }
  void delta(Work& wk, int j, const RingElement& lam,
             std::optional<RingElement> quotient) {
    if (lam.is_zero()) return;
    if (wk.tag && !quotient)
      throw Error(Status::InternalError, "tagged delta without witness");
    gens.push_back({0, j, lam, quotient});
    wk.v[0] = wk.v[0] + lam * wk.v[j];
    if (wk.tag) wk.tag->witness = wk.tag->witness + *quotient * wk.v[j];
  }
  void delta_q(Work& wk, int j, const RingElement& q) {
    delta(wk, j, wk.tag->s * q, q);
  }
  // delta usable on untagged or trivially tagged (s == 1) reductions
  void delta_auto(Work& wk, int j, const RingElement& lam) {
    if (!wk.tag) {
      delta(wk, j, lam, std::nullopt);
      return;
    }
    if (!wk.tag->s.is_one())
      throw Error(Status::InternalError, "delta_auto on a nontrivially tagged state");
    delta(wk, j, lam, lam);
  }
  bool done(const Work& wk) const {
    if (!wk.v[0].is_one()) return false;
    for (std::size_t i = 1; i < wk.v.size(); ++i)
      if (!wk.v[i].is_zero()) return false;
    return true;
  }
};

struct LayerResult {
  Status status = Status::InternalError;
  ElementaryWord word; // over `ring`
  RingPtr ring;        // input ring localized at the surviving grants
  std::vector<Grant> grants; // grants owned by enclosing layers
  std::string message;
};

LayerResult solve(RVector v, RingPtr R, std::optional<TagState> tag, Tower tower,
                  RecCtx& ctx);

// value degree of x in `var`: deg(num) - sum den_s * deg(slot_s)
int value_degree(const RingElement& x, int var) {
  int d = x.num().degree_in(var);
  for (int s = 0; s < x.ring()->slot_count(); ++s)
    if (x.den()[s] > 0) d -= x.den()[s] * std::max(x.ring()->slot_poly(s).degree_in(var), 0);
  return d;
}

// ---- pivot attempt ----

bool pivot_step(Work& wk, WordAcc& acc, const Tower& tower, const Config& cfg) {
  const RingPtr& R = wk.ring;
  int pivot = -1;
  RingElement u_inv;
  for (std::size_t i = 0; i < wk.v.size(); ++i) {
    if (wk.v[i].is_zero()) continue;
    UnitResult u = licensed_unit(wk.v[i], wk, tower, cfg);
    if (u.status == Status::Ok) {
      pivot = static_cast<int>(i);
      u_inv = u.inverse;
      break;
    }
  }
  if (pivot < 0) return false;
  auto head_to_one = [&](int via) {
    // head is a unit with inverse u_inv and v[via] == 0 or unused
    if (wk.v[0].is_one()) return;
    acc.gamma(wk, via, RingElement::one(R));
    if (wk.tag && !wk.tag->s.is_one())
      acc.delta_q(wk, via, -(wk.tag->witness * u_inv));
    else if (wk.tag)
      acc.delta_q(wk, via, (RingElement::one(R) - wk.v[0]) * u_inv);
    else
      acc.delta(wk, via, (RingElement::one(R) - wk.v[0]) * u_inv, std::nullopt);
    acc.gamma(wk, via, -wk.v[via]);
  };
  if (pivot == 0) {
    for (std::size_t i = 1; i < wk.v.size(); ++i)
      if (!wk.v[i].is_zero()) acc.gamma(wk, static_cast<int>(i), -(wk.v[i] * u_inv));
    head_to_one(1);
  } else {
    if (wk.tag && !wk.tag->s.is_one())
      acc.delta_q(wk, pivot, -(wk.tag->witness * u_inv));
    else if (wk.tag)
      acc.delta_q(wk, pivot, (RingElement::one(R) - wk.v[0]) * u_inv);
    else
      acc.delta(wk, pivot, (RingElement::one(R) - wk.v[0]) * u_inv, std::nullopt);
    for (std::size_t i = 1; i < wk.v.size(); ++i)
      if (!wk.v[i].is_zero()) acc.gamma(wk, static_cast<int>(i), -wk.v[i]);
  }
  if (!acc.done(wk))
    throw Error(Status::InternalError, "pivot reduction missed e_1");
  return true;
}

// ---- licensed Euclid (untagged, one effective polynomial variable) ----

Status euclid_step(Work& wk, WordAcc& acc, const Tower& tower, const Config& cfg,
                   int main_var) {
  const RingPtr& R = wk.ring;
  auto lead_coeff = [&](const RingElement& x) {
    int d = x.num().degree_in(main_var);
    return RingElement(R, x.num().coeff_in(main_var, std::max(d, 0)), x.den());
  };
  for (std::size_t i = 1; i < wk.v.size(); ++i) {
    int guard = 0;
    while (!wk.v[i].is_zero()) {
      if (++guard > 512) return Status::SearchBudgetExceeded;
      if (wk.v[0].is_zero()) {
        acc.delta_auto(wk, static_cast<int>(i), RingElement::one(R));
        acc.gamma(wk, static_cast<int>(i), -RingElement::one(R));
        continue;
      }
      int d0 = value_degree(wk.v[0], main_var);
      int di = value_degree(wk.v[i], main_var);
      bool reduce_head = d0 >= di;
      const RingElement& a = reduce_head ? wk.v[0] : wk.v[i];
      const RingElement& b = reduce_head ? wk.v[i] : wk.v[0];
      // t := lc(a) * lc(b)^{-1} * main^(da-db); lc(b) inverted with license
      RingElement lcb = lead_coeff(b);
      UnitResult ub = licensed_unit(lcb, wk, tower, cfg);
      if (ub.status != Status::Ok) return Status::SearchBudgetExceeded;
      int da = a.num().degree_in(main_var), db = b.num().degree_in(main_var);
      int shift = (reduce_head ? d0 - di : di - d0);
      (void)da;
      (void)db;
      if (shift < 0)
        throw Error(Status::InternalError, "euclid degree bookkeeping failed");
      RingElement t = lead_coeff(a) * ub.inverse *
                      RingElement::from_poly(
                          R, Polynomial::variable(R->field, R->nvars(), main_var)
                                 .pow(static_cast<unsigned>(shift)));
      if (reduce_head)
        acc.delta_auto(wk, static_cast<int>(i), -t);
      else
        acc.gamma(wk, static_cast<int>(i), -t);
      int now = value_degree(reduce_head ? wk.v[0] : wk.v[i], main_var);
      if (!(reduce_head ? wk.v[0] : wk.v[i]).is_zero() &&
          now >= (reduce_head ? d0 : di))
        return Status::SearchBudgetExceeded; // no progress; give up honestly
    }
  }
  UnitResult u = licensed_unit(wk.v[0], wk, tower, cfg);
  if (u.status == Status::BoundExceeded) return Status::BoundExceeded;
  if (u.status != Status::Ok) return Status::SearchBudgetExceeded;
  // (unit, 0, ..., 0) -> e_1
  if (!wk.v[0].is_one()) {
    acc.gamma(wk, 1, RingElement::one(R));
    acc.delta_auto(wk, 1, (RingElement::one(R) - wk.v[0]) * u.inverse);
    acc.gamma(wk, 1, -wk.v[1]);
  }
  return acc.done(wk) ? Status::Ok : Status::InternalError;
}

// ---- licensed tail check for the stable-range search ----

std::optional<RVector> plain_cofactors(const RVector& tail, const Config& cfg) {
  if (!unimodular_mod_probe(tail)) return std::nullopt;
  UnimodularCheck c = is_unimodular(tail, cfg);
  if (c.status != Status::Ok) return std::nullopt;
  return c.cofactors;
}

// When the plain check fails, look for an element of the saturated
// elimination ideal supported on the tower variables alone; granting it
// makes the tail unimodular over the localized ring.
void licensed_tail_probe(const RVector& tail, const Work& wk, const Tower& tower,
                         const Config& cfg) {
  if (tower.layers.empty()) return;
  const RingPtr& R = wk.ring;
  const int nv = R->nvars();
  std::vector<Polynomial> gens;
  for (const auto& e : tail) gens.push_back(e.num().extended(nv + 1));
  Polynomial H = R->inverted_product();
  gens.push_back(Polynomial::variable(R->field, nv + 1, nv) * H.extended(nv + 1) -
                 Polynomial::one(R->field, nv + 1));
  // block: t and every non-tower variable dominate the tower variables
  std::vector<int> block{nv};
  for (int v = 0; v < nv; ++v)
    if (tower.layer_of_var(v) < 0) block.push_back(v);
  MonomialOrder ord = MonomialOrder::eliminate(block, nv + 1);
  std::vector<Polynomial> gb = groebner_basis(gens, ord);
  const Polynomial* best = nullptr;
  for (const auto& g : gb) {
    bool pure = !g.uses_var(nv);
    for (int v = 0; v < nv && pure; ++v)
      if (g.uses_var(v) && tower.layer_of_var(v) < 0) pure = false;
    if (!pure) continue;
    if (!best || g.total_degree() < best->total_degree()) best = &g;
  }
  if (!best) return;
  Polynomial gamma = best->restricted(nv);
  if (gamma.is_constant()) return; // plain check should have seen it
  Polynomial core = slot_free_core(gamma, R);
  if (core.is_constant()) return;
  GrantRequest req;
  licensed_invert(core, tower, req.grants);
  if (prune_request(req, wk)) throw req;
}

// ---- stable range inside the tower ----

Status stable_range_step(Work& wk, WordAcc& acc, const Tower& tower, RecCtx& ctx) {
  const int r = static_cast<int>(wk.v.size());
  if (r < 3) return Status::StrategyInapplicable;
  Reduction red(wk.v, wk.tag);
  int probes = 0;
  TailCheck check = [&](const RVector& tail) -> std::optional<RVector> {
    auto plain = plain_cofactors(tail, ctx.cfg);
    if (plain) return plain;
    if (probes < 8) {
      ++probes;
      licensed_tail_probe(tail, wk, tower, ctx.cfg); // may throw GrantRequest
    }
    return std::nullopt;
  };
  Status st = try_stable_range(red, ctx.cfg, ctx.rng, check);
  if (st != Status::Ok) return st;
  // replay the found word through the accumulator
  for (const auto& g : red.finish().gens) {
    if (g.i == 0) acc.delta(wk, g.j, g.lambda, g.tag_quotient);
    else if (g.j == 0) acc.gamma(wk, g.i, g.lambda);
    else
      throw Error(Status::InternalError, "stable range emitted an inner generator");
  }
  if (!acc.done(wk))
    throw Error(Status::InternalError, "stable range replay diverged");
  return Status::Ok;
}

// ---- transports between the square's rings ----

RingElement fold_to_ring(const RingElement& x, const RingPtr& target,
                         const std::vector<Polynomial>& fold_polys,
                         const Polynomial& fold_product, int fold_slot) {
  // map denominator slots by polynomial equality; slots listed in
  // `fold_polys` are folded into fold_slot of the target (their product
  // divides fold_product)
  const RingPtr& src = x.ring();
  Polynomial num = x.num();
  Expvec den(target->slot_count(), 0);
  for (int i = 0; i < src->slot_count(); ++i) {
    int d = x.den()[i];
    if (d == 0) continue;
    const Polynomial& sp = src->slot_poly(i);
    bool folded = false;
    for (const auto& fp : fold_polys)
      if (fp == sp) {
        auto rest = fold_product.divexact(sp);
        if (!rest)
          throw Error(Status::InternalError, "fold factor does not divide the product");
        num = num * rest->pow(static_cast<unsigned>(d));
        den[fold_slot] += d;
        folded = true;
        break;
      }
    if (folded) continue;
    int hit = -1;
    for (int s = 0; s < target->slot_count(); ++s)
      if (target->slot_poly(s) == sp) {
        hit = s;
        break;
      }
    if (hit < 0)
      throw Error(Status::InternalError, "slot has no counterpart while folding");
    den[hit] += d;
  }
  return RingElement(target, std::move(num), std::move(den));
}

// pull a word's parameters back through a normalization chain, keeping
// enclosing-layer localizations (their polynomials are fixed by the chain)
RingPtr chain_base_with(const IsoChain& chain, bool reverse,
                        const std::vector<Polynomial>& extra,
                        std::vector<int>& extra_slots) {
  RingPtr base = reverse ? chain.from() : chain.to();
  RingPtr cur = base;
  extra_slots.clear();
  for (const auto& p : extra) {
    if (p.is_constant()) continue;
    bool present = false;
    for (int s = 0; s < cur->slot_count(); ++s)
      if (cur->slot_poly(s) == p) {
        present = true;
        extra_slots.push_back(s);
        break;
      }
    if (present) continue;
    Localization loc = localize(cur, p);
    cur = loc.to;
    extra_slots.push_back(loc.new_slot);
  }
  return cur;
}

RingElement pullback_elem(const RingElement& x, const IsoChain& chain,
                          const std::vector<Polynomial>& extra,
                          const RingPtr& target) {
  // split x into its chain-ring part and the extra localized slots
  const RingPtr& src = x.ring();
  const RingPtr& to_ring = chain.to();
  Expvec base_den(to_ring->slot_count(), 0);
  std::vector<std::pair<Polynomial, int>> extra_use;
  for (int i = 0; i < src->slot_count(); ++i) {
    int d = x.den()[i];
    if (d == 0) continue;
    const Polynomial& sp = src->slot_poly(i);
    int hit = -1;
    for (int s = 0; s < to_ring->slot_count(); ++s)
      if (to_ring->slot_poly(s) == sp) {
        hit = s;
        break;
      }
    if (hit >= 0) {
      base_den[hit] += d;
      continue;
    }
    bool is_extra = false;
    for (const auto& p : extra)
      if (p == sp) {
        extra_use.push_back({sp, d});
        is_extra = true;
        break;
      }
    if (!is_extra)
      throw Error(Status::InternalError, "pullback slot is neither chain nor extra");
  }
  RingElement core(to_ring, x.num(), std::move(base_den));
  RingElement pulled = chain.inv(core);
  RingElement out = transport_by_slots_strict(pulled, target);
  for (const auto& [p, d] : extra_use) {
    // enclosing-layer polynomials are fixed by the chain
    int slot = -1;
    for (int s = 0; s < target->slot_count(); ++s)
      if (target->slot_poly(s) == p) {
        slot = s;
        break;
      }
    if (slot < 0)
      throw Error(Status::InternalError, "extra slot missing in pullback target");
    out = out * RingElement::slot_inverse(target, slot, static_cast<unsigned>(d));
  }
  return out;
}

// ---- the layer pipeline ----

LayerResult solve(RVector v, RingPtr R, std::optional<TagState> tag, Tower tower,
                  RecCtx& ctx) {
  LayerResult res;
  Work wk{R, std::move(v), std::move(tag), {}};

  // grant-materialization loop: strategies throw GrantRequest to enlarge the
  // working localization, then restart deterministically
  const int max_rounds = 64;
  for (int round = 0; round < max_rounds; ++round) {
    WordAcc acc;
    acc.size = static_cast<int>(wk.v.size());
    Work snap = wk; // strategies mutate; restore on restart
    try {
      // 1) pivot on an existing or licensable unit
      if (pivot_step(snap, acc, tower, ctx.cfg)) {
        res.status = Status::Ok;
        res.word.size = acc.size;
        res.word.gens = std::move(acc.gens);
        if (snap.tag) res.word.tag = snap.tag->s;
        res.ring = snap.ring;
        res.grants = snap.grants;
        return res;
      }
      if (snap.ring->n() == 0) {
        // base cases over the (possibly layered) base
        bool untagged = !snap.tag || snap.tag->s.is_one();
        bool one_var_ok = false;
        int main_var = -1;
        if (snap.ring->m() == 1) {
          main_var = snap.ring->y_slots[0];
          one_var_ok = true;
          for (int s : snap.ring->base_slots)
            if (tower.layer_of_var(s) < 0) {
              // plain base variables are fine only if nothing uses them
              for (const auto& e : snap.v)
                if (e.num().uses_var(s)) one_var_ok = false;
            }
        } else if (snap.ring->m() == 0 && !tower.layers.empty()) {
          main_var = tower.layers.back().var;
          one_var_ok = true;
          for (int s : snap.ring->base_slots)
            if (tower.layer_of_var(s) < 0) {
              for (const auto& e : snap.v)
                if (e.num().uses_var(s)) one_var_ok = false;
            }
        }
        Status st = Status::StrategyInapplicable;
        if (untagged && one_var_ok) {
          note_stage(ctx, "euclid");
          st = euclid_step(snap, acc, tower, ctx.cfg, main_var);
        }
        if (st != Status::Ok && static_cast<int>(snap.v.size()) >= 3) {
          note_stage(ctx, "stable-range");
          WordAcc acc2;
          acc2.size = acc.size;
          Work snap2 = wk;
          Status st2 = stable_range_step(snap2, acc2, tower, ctx);
          if (st2 == Status::Ok) {
            res.status = Status::Ok;
            res.word.size = acc2.size;
            res.word.gens = std::move(acc2.gens);
            if (snap2.tag) res.word.tag = snap2.tag->s;
            res.ring = snap2.ring;
            res.grants = snap2.grants;
            return res;
          }
          st = st2;
        }
        if (st == Status::Ok) {
          res.status = Status::Ok;
          res.word.size = acc.size;
          res.word.gens = std::move(acc.gens);
          if (snap.tag) res.word.tag = snap.tag->s;
          res.ring = snap.ring;
          res.grants = snap.grants;
          return res;
        }
        res.status = st;
        res.message = "base case failed: ";
        res.message += status_name(st);
        return res;
      }
      // 2) the pipeline over the last inverted pair
      break;
    } catch (GrantRequest& gr) {
      if (++ctx.grant_rounds > 256) {
        res.status = Status::SearchBudgetExceeded;
        res.message = "licensed localization budget exhausted";
        return res;
      }
      wk.materialize(gr.grants);
      continue;
    }
  }

  // ---- descend through the last pair ----
  const int pair_idx = wk.ring->n() - 1;
  {
    // the layer polynomial must be univariate with field coefficients
    const InvertedPair& pr = wk.ring->pairs[pair_idx];
    for (const auto& fc : pr.f)
      if (!fc.is_constant()) {
        res.status = Status::SplittingPreconditionFailed;
        res.message = "pair coefficients leave the field; pipeline unavailable";
        return res;
      }
  }
  note_stage(ctx, "normalize-linear-form");
  NormalizeResult nr = normalize_linear_form(wk.ring, pair_idx);
  RingPtr Ap = nr.chain.to();
  RVector vp;
  vp.reserve(wk.v.size());
  for (const auto& e : wk.v) vp.push_back(nr.chain.fwd(e));
  std::optional<TagState> tagp;
  if (wk.tag) tagp = TagState{nr.chain.fwd(wk.tag->s), nr.chain.fwd(wk.tag->witness)};

  Unwrap uw = unwrap_pair(Ap, pair_idx);
  RingPtr At = uw.to;
  const Polynomial fpoly = At->slot_poly(uw.f_base_slot);
  {
    // purity: f involves only the pivot variable
    for (int vr = 0; vr < At->nvars(); ++vr)
      if (vr != uw.pivot_slot && fpoly.uses_var(vr)) {
        res.status = Status::SplittingPreconditionFailed;
        res.message = "layer polynomial is not univariate in its pivot";
        return res;
      }
  }
  RVector vt;
  vt.reserve(vp.size());
  for (const auto& e : vp) vt.push_back(uw.transport(e));
  std::optional<TagState> tagt;
  if (tagp) tagt = TagState{uw.transport(tagp->s), uw.transport(tagp->witness)};

  Tower deeper = tower;
  deeper.layers.push_back({uw.pivot_slot, fpoly});
  note_stage(ctx, "localize");
  LayerResult inner = solve(std::move(vt), At, std::move(tagt), deeper, ctx);
  if (inner.status != Status::Ok) {
    res.status = inner.status;
    res.message = inner.message;
    return res;
  }

  const int this_layer = static_cast<int>(tower.layers.size());
  std::vector<Grant> g_this, g_up;
  for (const auto& g : inner.grants)
    (g.layer == this_layer ? g_this : g_up).push_back(g);

  auto collect_polys = [](const std::vector<Grant>& gs) {
    std::vector<Polynomial> out;
    for (const auto& g : gs) {
      Polynomial gt = g.gtilde();
      if (gt.is_constant()) continue;
      bool dup = false;
      for (const auto& p : out) dup = dup || p == gt;
      if (!dup) out.push_back(std::move(gt));
    }
    return out;
  };
  std::vector<Polynomial> up_polys = collect_polys(g_up);
  std::vector<Polynomial> this_polys = collect_polys(g_this);
  for (const auto& g : wk.grants) {
    Polynomial gt = g.gtilde();
    if (gt.is_constant()) continue;
    bool dup = false;
    for (const auto& p : up_polys) dup = dup || p == gt;
    if (!dup) up_polys.push_back(std::move(gt));
  }

  ElementaryWord word_out;
  RingPtr ring_out;
  std::vector<Grant> grants_out = wk.grants;
  for (const auto& g : g_up) grants_out.push_back(g);

  {
    // fiber square over C = A' minus the pair, localized at enclosing
    // grants; without layer grants the gluing runs with g = 1
    PairDrop pd = drop_pair(Ap, pair_idx);
    RingPtr C = pd.to;
    for (const auto& p : up_polys) {
      bool present = false;
      for (int s = 0; s < C->slot_count(); ++s) present = present || C->slot_poly(s) == p;
      if (!present) C = localize(C, p).to;
    }
    Polynomial gprod = Polynomial::one(C->field, C->nvars());
    for (const auto& p : this_polys) gprod = gprod * p;
    note_stage(ctx, "split");
    FiberSquare sq = make_square(C, fpoly, gprod);

    // inner word over C_fg with the layer grants folded into the g slot
    ElementaryWord sigma;
    sigma.size = inner.word.size;
    if (inner.word.tag)
      sigma.tag = fold_to_ring(*inner.word.tag, sq.Cfg, this_polys, gprod, sq.g_slot_cfg);
    for (const auto& g : inner.word.gens) {
      ElementaryGen ng{g.i, g.j,
                       fold_to_ring(g.lambda, sq.Cfg, this_polys, gprod, sq.g_slot_cfg),
                       std::nullopt};
      if (g.tag_quotient)
        ng.tag_quotient =
            fold_to_ring(*g.tag_quotient, sq.Cfg, this_polys, gprod, sq.g_slot_cfg);
      sigma.gens.push_back(std::move(ng));
    }

    SplitResult sp = split_elementary(sigma, sq, ctx.cfg);
    if (sp.status != Status::Ok) {
      res.status = sp.status;
      res.message = sp.message;
      return res;
    }

    RVector u_in;
    u_in.reserve(vp.size());
    for (const auto& e : vp) u_in.push_back(transport_by_slots_strict(e, sq.Cf));
    RVector u1 = apply_word(sp.pair.sigma1, u_in);
    RVector u2 = sp.pair.sigma2_inv * unit_vector(sq.Cg, sigma.size, 0);
    note_stage(ctx, "patch");
    PatchResult pt = patch_unimodular(u1, u2, sq, ctx.cfg);
    if (pt.status != Status::Ok) {
      res.status = pt.status;
      res.message = pt.message;
      return res;
    }

    std::optional<TagState> tagc;
    if (tagp) {
      RingElement sc = transport_by_slots_strict(tagp->s, C);
      RingElement d = pt.patched[0] - RingElement::one(C);
      RingElement w = RingElement::zero(C);
      if (!sc.is_one()) {
        auto sat = saturation_membership(d.num(), {sc.num()}, C->inverted_product(),
                                         ctx.cfg.saturation_emax);
        if (sat.kind != SaturationKind::Member)
          throw Error(Status::InternalError, "patched head lost its tag congruence");
        Polynomial num = sat.cert.cofactors[0];
        for (int s = 0; s < C->slot_count(); ++s)
          if (sc.den()[s] > 0)
            num = num * C->slot_poly(s).pow(static_cast<unsigned>(sc.den()[s]));
        Expvec den(C->slot_count(), static_cast<int>(sat.cert.exponent));
        for (int s = 0; s < C->slot_count(); ++s) den[s] += d.den()[s];
        w = RingElement(C, std::move(num), std::move(den));
        if (!(sc * w).equals(d))
          throw Error(Status::InternalError, "patched tag witness failed");
      } else {
        w = d;
      }
      tagc = TagState{sc, w};
    }
    note_stage(ctx, "recurse");
    LayerResult phi = solve(pt.patched, C, std::move(tagc), tower, ctx);
    if (phi.status != Status::Ok) {
      res.status = phi.status;
      res.message = phi.message;
      return res;
    }
    for (const auto& g : phi.grants) grants_out.push_back(g);
    std::vector<Polynomial> phi_polys = collect_polys(phi.grants);

    note_stage(ctx, "compose");
    std::vector<Polynomial> all_up = up_polys;
    for (const auto& p : phi_polys) all_up.push_back(p);
    std::vector<int> unused;
    ring_out = chain_base_with(nr.chain, false, all_up, unused);
    word_out.size = sigma.size;
    if (tagp) word_out.tag = transport_by_slots_strict(tagp->s, ring_out);
    auto push_word = [&](const ElementaryWord& w) {
      for (const auto& g : w.gens) {
        ElementaryGen ng{g.i, g.j, transport_by_slots_strict(g.lambda, ring_out),
                         std::nullopt};
        if (g.tag_quotient)
          ng.tag_quotient = transport_by_slots_strict(*g.tag_quotient, ring_out);
        word_out.gens.push_back(std::move(ng));
      }
    };
    push_word(sp.pair.sigma1);
    push_word(phi.word);
  }

  // replay over the composed ring, then pull back through the normalization
  {
    RVector check;
    check.reserve(vp.size());
    for (const auto& e : vp) check.push_back(transport_by_slots_strict(e, ring_out));
    RVector img = apply_word(word_out, check);
    RVector e1 = unit_vector(ring_out, word_out.size, 0);
    for (int i = 0; i < word_out.size; ++i)
      if (!img[i].equals(e1[i]))
        throw Error(Status::InternalError, "layer word failed its replay");
  }

  std::vector<Polynomial> extra = collect_polys(grants_out);
  std::vector<int> unused2;
  RingPtr final_ring = chain_base_with(nr.chain, true, extra, unused2);
  ElementaryWord final_word;
  final_word.size = word_out.size;
  if (wk.tag) final_word.tag = transport_by_slots_strict(wk.tag->s, final_ring);
  for (const auto& g : word_out.gens) {
    ElementaryGen ng{g.i, g.j, pullback_elem(g.lambda, nr.chain, extra, final_ring),
                     std::nullopt};
    if (g.tag_quotient)
      ng.tag_quotient = pullback_elem(*g.tag_quotient, nr.chain, extra, final_ring);
    final_word.gens.push_back(std::move(ng));
  }

  res.status = Status::Ok;
  res.word = std::move(final_word);
  res.ring = final_ring;
  res.grants = grants_out;
  return res;
}

} // namespace

Status try_recursive(Reduction& red, const Config& cfg, Rng& rng,
                     std::vector<std::string>& stages) {
  const RingPtr& R = red.ring();
  if (R->n() == 0) return Status::StrategyInapplicable;
  RecCtx ctx{cfg, rng, stages};
  std::optional<TagState> tag = red.tag();
  LayerResult lr;
  try {
    lr = solve(red.v(), R, tag, Tower{}, ctx);
  } catch (const Error& e) {
    if (e.status() == Status::SplittingPreconditionFailed) return e.status();
    throw;
  }
  if (lr.status != Status::Ok) return lr.status;
  if (!lr.ring->same(*R))
    throw Error(Status::InternalError,
                "top-level pipeline word is not over the input ring");
  for (const auto& g : lr.word.gens) {
    RingElement lam = transport_by_slots_strict(g.lambda, R);
    if (g.i == 0) {
      if (red.tagged()) {
        if (!g.tag_quotient)
          throw Error(Status::InternalError, "pipeline delta lost its witness");
        red.delta_q(g.j, transport_by_slots_strict(*g.tag_quotient, R));
      } else {
        red.delta(g.j, lam);
      }
    } else if (g.j == 0) {
      red.gamma(g.i, lam);
    } else {
      red.inner(g.i, g.j, lam);
    }
  }
  if (!red.done())
    throw Error(Status::InternalError, "pipeline word replay did not reach e_1");
  return Status::Ok;
}

} // namespace unimod

#include "fiber.hpp"

namespace unimod {

std::optional<RingElement> transport_by_slots(const RingElement& x, const RingPtr& target) {
  const RingPtr& src = x.ring();
  if (src->var_names != target->var_names) return std::nullopt;
  Expvec den(target->slot_count(), 0);
  for (int i = 0; i < src->slot_count(); ++i) {
    int d = x.den()[i];
    if (d == 0) continue;
    int hit = -1;
    for (int s = 0; s < target->slot_count(); ++s)
      if (target->slot_poly(s) == src->slot_poly(i)) {
        hit = s;
        break;
      }
    if (hit < 0) return std::nullopt;
    den[hit] += d;
  }
  return RingElement(target, x.num(), std::move(den));
}

RingElement transport_by_slots_strict(const RingElement& x, const RingPtr& target) {
  auto r = transport_by_slots(x, target);
  if (!r)
    throw Error(Status::InternalError,
                "element denominator has no counterpart in the target ring");
  return *r;
}

FiberSquare make_square(const RingPtr& C, const Polynomial& f, const Polynomial& g) {
  if (f.is_zero() || g.is_zero())
    throw Error(Status::ParseError, "fiber square needs nonzero localizing elements");
  FiberSquare sq;
  sq.C = C;
  sq.f = f;
  sq.g = g;
  Localization lf = localize(C, f);
  sq.Cf = lf.to;
  sq.f_slot_cf = lf.new_slot;
  Localization lg = localize(C, g);
  sq.Cg = lg.to;
  sq.g_slot_cg = lg.new_slot;
  Localization lfg = localize(sq.Cf, g);
  sq.Cfg = lfg.to;
  sq.g_slot_cfg = lfg.new_slot;
  sq.f_slot_cfg = lfg.slot_map[sq.f_slot_cf];
  return sq;
}

std::optional<Comaximality> comaximal_powers(const RingPtr& C, const Polynomial& f,
                                             const Polynomial& g, unsigned a,
                                             unsigned b, const Config& cfg) {
  // 1 in (f^a, g^b) over C: saturate against the ring's inverted product
  Polynomial fa = f.pow(a), gb = g.pow(b);
  auto sat = saturation_membership(Polynomial::one(C->field, C->nvars()), {fa, gb},
                                   C->inverted_product(), cfg.saturation_emax);
  if (sat.kind != SaturationKind::Member) return std::nullopt;
  const unsigned e = sat.cert.exponent;
  Expvec den(C->slot_count(), static_cast<int>(e));
  Comaximality cm;
  cm.a = a;
  cm.b = b;
  cm.alpha = RingElement(C, sat.cert.cofactors[0], den);
  cm.beta = RingElement(C, sat.cert.cofactors[1], den);
  RingElement lhs = cm.alpha * RingElement::from_poly(C, fa) +
                    cm.beta * RingElement::from_poly(C, gb);
  if (!lhs.is_one())
    throw Error(Status::InternalError, "comaximality certificate failed replay");
  return cm;
}

namespace {

struct GenExp {
  int fexp = 0, gexp = 0;
};

GenExp gen_exponents(const RingElement& lam, const FiberSquare& sq) {
  GenExp ge;
  ge.fexp = lam.den()[sq.f_slot_cfg];
  ge.gexp = lam.den()[sq.g_slot_cfg];
  return ge;
}

// lambda with the f/g part of the denominator cleared: lambda * f^s * g^t
RingElement strip_fg(const RingElement& lam, const FiberSquare& sq, const GenExp& ge) {
  Polynomial num = lam.num();
  Expvec den = lam.den();
  den[sq.f_slot_cfg] = 0;
  den[sq.g_slot_cfg] = 0;
  return RingElement(lam.ring(), num, den);
}

RingElement to_cfg_from_cf(const RingElement& x, const FiberSquare& sq) {
  return transport_by_slots_strict(x, sq.Cfg);
}

RingElement to_cfg_from_cg(const RingElement& x, const FiberSquare& sq) {
  return transport_by_slots_strict(x, sq.Cfg);
}

ElementaryWord word_to_ring(const ElementaryWord& w, const RingPtr& target) {
  ElementaryWord out;
  out.size = w.size;
  if (w.tag) out.tag = transport_by_slots_strict(*w.tag, target);
  out.gens.reserve(w.gens.size());
  for (const auto& g : w.gens) {
    ElementaryGen ng{g.i, g.j, transport_by_slots_strict(g.lambda, target), std::nullopt};
    if (g.tag_quotient)
      ng.tag_quotient = transport_by_slots_strict(*g.tag_quotient, target);
    out.gens.push_back(std::move(ng));
  }
  return out;
}

} // namespace

SplitResult split_elementary(const ElementaryWord& sigma, const FiberSquare& sq,
                             const Config& cfg) {
  SplitResult res;
  const RingPtr& Cfg = sq.Cfg;
  for (const auto& g : sigma.gens)
    if (!g.lambda.ring()->same(*Cfg))
      throw Error(Status::InternalError, "split input word is not over C_fg");

  int max_f = 0, max_g = 0, sum_f = 0, sum_g = 0;
  bool common_slot = true;
  for (std::size_t k = 0; k < sigma.gens.size(); ++k) {
    GenExp ge = gen_exponents(sigma.gens[k].lambda, sq);
    max_f = std::max(max_f, ge.fexp);
    max_g = std::max(max_g, ge.gexp);
    sum_f += ge.fexp;
    sum_g += ge.gexp;
    if (k > 0 && (sigma.gens[k].i != sigma.gens[0].i || sigma.gens[k].j != sigma.gens[0].j))
      common_slot = false;
  }

  auto identity_pair = [&](bool sigma1_is_sigma) {
    SplitPair pr;
    pr.sigma1.size = sigma.size;
    pr.sigma1.tag = sigma.tag ? std::optional<RingElement>(
                                    transport_by_slots_strict(*sigma.tag, sq.Cf))
                              : std::nullopt;
    ElementaryWord other;
    other.size = sigma.size;
    if (sigma1_is_sigma) pr.sigma1 = word_to_ring(sigma, sq.Cf);
    else pr.sigma2_word = word_to_ring(sigma, sq.Cg);
    if (!pr.sigma2_word) {
      pr.sigma2 = RMatrix::identity(sq.Cg, sigma.size);
      pr.sigma2_inv = pr.sigma2;
    } else {
      pr.sigma2 = word_matrix(*pr.sigma2_word, sq.Cg);
      pr.sigma2_inv = word_matrix(inverse_word(*pr.sigma2_word), sq.Cg);
    }
    return pr;
  };

  // fast paths: one-sided denominators move verbatim
  if (max_g == 0) {
    res.pair = identity_pair(true);
    res.status = Status::Ok;
    return res;
  }
  if (max_f == 0 && !sigma.tagged()) {
    res.pair = identity_pair(false);
    res.status = Status::Ok;
    return res;
  }

  // fast path: all generators share one (i, j) slot, so the per-generator
  // partial fraction pieces commute and recompose exactly
  if (common_slot && !sigma.gens.empty()) {
    auto cm = comaximal_powers(sq.C, sq.f, sq.g,
                               static_cast<unsigned>(std::max(max_f, 1)),
                               static_cast<unsigned>(std::max(max_g, 1)), cfg);
    if (!cm) {
      res.status = Status::NonComaximalDenominators;
      res.message = "localizing elements are not comaximal";
      return res;
    }
    RingElement alpha = transport_by_slots_strict(cm->alpha, Cfg);
    RingElement beta = transport_by_slots_strict(cm->beta, Cfg);
    RingElement fA = RingElement::from_poly(Cfg, sq.f.pow(cm->a));
    RingElement gB = RingElement::from_poly(Cfg, sq.g.pow(cm->b));
    SplitPair pr;
    pr.sigma1.size = sigma.size;
    pr.sigma2_word = ElementaryWord{};
    pr.sigma2_word->size = sigma.size;
    if (sigma.tag) pr.sigma1.tag = transport_by_slots_strict(*sigma.tag, sq.Cf);
    for (const auto& gen : sigma.gens) {
      // lambda = P + Q with P = lambda*beta*g^b over C_f, Q = lambda*alpha*f^a over C_g
      RingElement P = gen.lambda * beta * gB;
      RingElement Q = gen.lambda * alpha * fA;
      ElementaryGen g1{gen.i, gen.j, transport_by_slots_strict(P, sq.Cf), std::nullopt};
      if (gen.tag_quotient)
        g1.tag_quotient = transport_by_slots_strict(*gen.tag_quotient * beta * gB, sq.Cf);
      pr.sigma1.gens.push_back(std::move(g1));
      pr.sigma2_word->gens.push_back(
          {gen.i, gen.j, transport_by_slots_strict(Q, sq.Cg), std::nullopt});
    }
    pr.sigma2 = word_matrix(*pr.sigma2_word, sq.Cg);
    pr.sigma2_inv = word_matrix(inverse_word(*pr.sigma2_word), sq.Cg);
    res.pair = std::move(pr);
    res.status = Status::Ok;
  } else {
    // general path: dilate the word homotopy. sigma1 collects the
    // generators with parameters c_g g^N lambda_k (a word over C_f); sigma2
    // is the exact quotient sigma * sigma1^{-1}, checked to live over C_g.
    unsigned N = static_cast<unsigned>(std::max(max_g, 1));
    unsigned M = static_cast<unsigned>(std::max(sum_f + 1, 1));
    SplitPair pr;
    bool okay = false;
    std::string why;
    while (true) {
      if (M > cfg.split_bound || N > cfg.split_bound) {
        res.status = Status::SplittingDegreeOverflow;
        res.message = why.empty() ? "splitting escalation exceeded the power bound" : why;
        return res;
      }
      auto cm = comaximal_powers(sq.C, sq.f, sq.g, M, N, cfg);
      if (!cm) {
        res.status = Status::NonComaximalDenominators;
        res.message = "localizing elements are not comaximal";
        return res;
      }
      RingElement beta_gN =
          transport_by_slots_strict(cm->beta, Cfg) * RingElement::from_poly(Cfg, sq.g.pow(N));
      // sigma1 candidate over C_f
      ElementaryWord s1;
      s1.size = sigma.size;
      if (sigma.tag) s1.tag = transport_by_slots_strict(*sigma.tag, sq.Cf);
      bool param_ok = true;
      for (const auto& gen : sigma.gens) {
        RingElement lam = gen.lambda * beta_gN;
        auto lam_cf = transport_by_slots(lam, sq.Cf);
        if (!lam_cf) { param_ok = false; break; }
        ElementaryGen g1{gen.i, gen.j, *lam_cf, std::nullopt};
        if (gen.tag_quotient) {
          auto q_cf = transport_by_slots(*gen.tag_quotient * beta_gN, sq.Cf);
          if (!q_cf) { param_ok = false; break; }
          g1.tag_quotient = *q_cf;
        }
        s1.gens.push_back(std::move(g1));
      }
      if (!param_ok) {
        why = "sigma1 parameters kept g denominators";
        N *= 2;
        continue;
      }
      // sigma2 = sigma * sigma1^{-1} over C_fg, then retract to C_g
      RMatrix prod = word_matrix(sigma, Cfg) *
                     word_matrix(inverse_word(word_to_ring(s1, Cfg)), Cfg);
      RMatrix s2(sq.Cg, sigma.size), s2inv(sq.Cg, sigma.size);
      bool retract_ok = true;
      for (int i = 0; i < sigma.size && retract_ok; ++i)
        for (int j = 0; j < sigma.size && retract_ok; ++j) {
          auto e = transport_by_slots(prod.at(i, j), sq.Cg);
          if (!e) retract_ok = false;
          else s2.at(i, j) = *e;
        }
      if (!retract_ok) {
        why = "sigma2 kept f denominators";
        M *= 2;
        continue;
      }
      RMatrix prod_inv = word_matrix(word_to_ring(s1, Cfg), Cfg) *
                         word_matrix(inverse_word(sigma), Cfg);
      for (int i = 0; i < sigma.size && retract_ok; ++i)
        for (int j = 0; j < sigma.size && retract_ok; ++j) {
          auto e = transport_by_slots(prod_inv.at(i, j), sq.Cg);
          if (!e) retract_ok = false;
          else s2inv.at(i, j) = *e;
        }
      if (!retract_ok) {
        why = "sigma2 inverse kept f denominators";
        M *= 2;
        continue;
      }
      pr.sigma1 = std::move(s1);
      pr.sigma2 = std::move(s2);
      pr.sigma2_inv = std::move(s2inv);
      okay = true;
      break;
    }
    if (!okay) {
      res.status = Status::SplittingDegreeOverflow;
      return res;
    }
    res.pair = std::move(pr);
    res.status = Status::Ok;
  }

  // recomposition check: (sigma2)_{fg} (sigma1)_{fg} == sigma entry-exactly,
  // and the stored inverse really inverts sigma2
  {
    RMatrix s2fg(sq.Cfg, sigma.size);
    for (int i = 0; i < sigma.size; ++i)
      for (int j = 0; j < sigma.size; ++j)
        s2fg.at(i, j) = transport_by_slots_strict(res.pair.sigma2.at(i, j), sq.Cfg);
    RMatrix s1fg = word_matrix(word_to_ring(res.pair.sigma1, sq.Cfg), sq.Cfg);
    if (!(s2fg * s1fg == word_matrix(sigma, sq.Cfg)))
      throw Error(Status::InternalError, "split pair failed recomposition");
    if (!(res.pair.sigma2 * res.pair.sigma2_inv).is_identity())
      throw Error(Status::InternalError, "sigma2 inverse certificate failed");
    validate_word(res.pair.sigma1, sq.Cf);
  }
  return res;
}

PatchResult patch_unimodular(const RVector& u1, const RVector& u2,
                             const FiberSquare& sq, const Config& cfg) {
  PatchResult res;
  if (u1.size() != u2.size())
    throw Error(Status::InternalError, "patch vectors of different lengths");
  const int r = static_cast<int>(u1.size());

  // images must agree in C_fg
  for (int i = 0; i < r; ++i) {
    RingElement a = transport_by_slots_strict(u1[i], sq.Cfg);
    RingElement b = transport_by_slots_strict(u2[i], sq.Cfg);
    if (!a.equals(b)) {
      res.status = Status::ImagesDisagree;
      res.message = "localized vectors disagree over C_fg at coordinate " +
                    std::to_string(i + 1);
      return res;
    }
  }

  // clear denominators: u1_i = A_i / f^S, u2_i = B_i / g^T with A, B over C
  int S = 0, T = 0;
  for (int i = 0; i < r; ++i) {
    S = std::max(S, u1[i].den()[sq.f_slot_cf]);
    T = std::max(T, u2[i].den()[sq.g_slot_cg]);
  }
  auto cm = comaximal_powers(sq.C, sq.f, sq.g, static_cast<unsigned>(std::max(S, 1)),
                             static_cast<unsigned>(std::max(T, 1)), cfg);
  if (!cm) {
    res.status = Status::NonComaximalDenominators;
    res.message = "square is not comaximal, cannot clear denominators";
    return res;
  }
  RVector patched;
  patched.reserve(r);
  for (int i = 0; i < r; ++i) {
    // A_i = u1_i * f^a over C (f exponent removed), similarly B_i
    RingElement A = u1[i] * RingElement::from_poly(sq.Cf, sq.f.pow(cm->a));
    RingElement B = u2[i] * RingElement::from_poly(sq.Cg, sq.g.pow(cm->b));
    auto A_c = transport_by_slots(A, sq.C);
    auto B_c = transport_by_slots(B, sq.C);
    if (!A_c || !B_c)
      throw Error(Status::InternalError, "cleared coordinate kept a localized denominator");
    patched.push_back(cm->alpha * *A_c + cm->beta * *B_c);
  }
  // localizations of the patched vector reproduce the inputs exactly
  for (int i = 0; i < r; ++i) {
    if (!transport_by_slots_strict(patched[i], sq.Cf).equals(u1[i]) ||
        !transport_by_slots_strict(patched[i], sq.Cg).equals(u2[i]))
      throw Error(Status::InternalError, "patched vector fails to localize back");
  }
  res.status = Status::Ok;
  res.patched = std::move(patched);
  return res;
}

} // namespace unimod

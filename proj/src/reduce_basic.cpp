#include "reduce.hpp"

#include <algorithm>

namespace unimod {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::UnitPivot: return "unit-pivot";
    case Strategy::Pid: return "pid";
    case Strategy::StableRange: return "stable-range";
    case Strategy::Recursive: return "recursive";
  }
  return "auto";
}

std::optional<Strategy> strategy_from_name(const std::string& s) {
  if (s == "auto") return Strategy::Auto;
  if (s == "unit-pivot") return Strategy::UnitPivot;
  if (s == "pid") return Strategy::Pid;
  if (s == "stable-range") return Strategy::StableRange;
  if (s == "recursive") return Strategy::Recursive;
  return std::nullopt;
}

Polynomial univ_quot(const Polynomial& a, const Polynomial& b, int var) {
  if (b.is_zero()) throw Error(Status::InternalError, "univariate division by zero");
  Polynomial rem(a), quo(a.field(), a.nvars());
  int db = b.degree_in(var);
  Polynomial lcb = b.coeff_in(var, db);
  while (!rem.is_zero() && rem.degree_in(var) >= db) {
    int da = rem.degree_in(var);
    Polynomial lca = rem.coeff_in(var, da);
    auto c = lca.divexact(lcb);
    if (!c)
      throw Error(Status::InternalError,
                  "univariate division needs an exact leading quotient");
    Expvec e(a.nvars(), 0);
    e[var] = da - db;
    Polynomial t = c->mul_term(e, Scalar::one(a.field()));
    quo = quo + t;
    rem = rem - t * b; // the degree-da coefficient cancels exactly
  }
  return quo;
}

Polynomial univ_rem(const Polynomial& a, const Polynomial& b, int var) {
  return a - univ_quot(a, b, var) * b;
}

// ---- Reduction ----

Reduction::Reduction(RVector v, std::optional<TagState> tag)
    : v_(std::move(v)), tag_(std::move(tag)) {
  word_.size = static_cast<int>(v_.size());
  if (tag_) {
    word_.tag = tag_->s;
    RingElement lhs = tag_->s * tag_->witness;
    RingElement rhs = v_[0] - RingElement::one(ring());
    if (!lhs.equals(rhs))
      throw Error(Status::InternalError, "tag witness does not match the vector");
  }
}

void Reduction::gamma(int i, const RingElement& mu) {
  if (i <= 0 || i >= size())
    throw Error(Status::InternalError, "gamma index out of range");
  if (mu.is_zero()) return;
  word_.gens.push_back({i, 0, mu, std::nullopt});
  v_[i] = v_[i] + mu * v_[0];
}

void Reduction::delta_q(int j, const RingElement& q) {
  if (!tag_) throw Error(Status::InternalError, "delta_q on an untagged reduction");
  if (j <= 0 || j >= size())
    throw Error(Status::InternalError, "delta index out of range");
  if (q.is_zero()) return;
  RingElement lam = tag_->s * q;
  word_.gens.push_back({0, j, lam, q});
  v_[0] = v_[0] + lam * v_[j];
  tag_->witness = tag_->witness + q * v_[j];
}

void Reduction::delta(int j, const RingElement& lam) {
  if (tag_) {
    if (!tag_->s.is_one())
      throw Error(Status::InternalError, "untagged delta on a tagged reduction");
    delta_q(j, lam);
    return;
  }
  if (j <= 0 || j >= size())
    throw Error(Status::InternalError, "delta index out of range");
  if (lam.is_zero()) return;
  word_.gens.push_back({0, j, lam, std::nullopt});
  v_[0] = v_[0] + lam * v_[j];
}

void Reduction::inner(int i, int j, const RingElement& lam) {
  if (tag_) throw Error(Status::InternalError, "inner generator on a tagged reduction");
  if (i == j || i <= 0 || j <= 0 || i >= size() || j >= size())
    throw Error(Status::InternalError, "inner generator index out of range");
  if (lam.is_zero()) return;
  word_.gens.push_back({i, j, lam, std::nullopt});
  v_[i] = v_[i] + lam * v_[j];
}

bool Reduction::done() const {
  if (!v_[0].is_one()) return false;
  for (std::size_t i = 1; i < v_.size(); ++i)
    if (!v_[i].is_zero()) return false;
  return true;
}

ElementaryWord Reduction::finish() const {
  if (!done()) throw Error(Status::InternalError, "reduction did not reach e_1");
  return word_;
}

namespace {

// v = (u, 0, ..., 0) with unit pivot u: bring the pivot to exactly 1
void normalize_pivot(Reduction& red, const RingElement& u_inv) {
  if (red.v()[0].is_one()) return;
  const RingPtr& R = red.ring();
  red.gamma(1, RingElement::one(R)); // v_2 = u
  if (red.tagged() && !red.tag()->s.is_one()) {
    // 1 - v_1 = -s * w
    red.delta_q(1, -(red.tag()->witness * u_inv));
  } else {
    red.delta(1, (RingElement::one(R) - red.v()[0]) * u_inv);
  }
  red.gamma(1, -red.v()[1]);
}

} // namespace

Status try_unit_pivot(Reduction& red, const Config& cfg) {
  const RingPtr& R = red.ring();
  int pivot = -1;
  RingElement u_inv;
  for (int i = 0; i < red.size(); ++i) {
    UnitResult u = is_unit(red.v()[i], cfg);
    if (u.status == Status::Ok) {
      pivot = i;
      u_inv = u.inverse;
      break;
    }
  }
  if (pivot < 0) return Status::StrategyInapplicable;
  if (pivot == 0) {
    for (int i = 1; i < red.size(); ++i)
      if (!red.v()[i].is_zero()) red.gamma(i, -(red.v()[i] * u_inv));
    normalize_pivot(red, u_inv);
  } else {
    if (red.tagged() && !red.tag()->s.is_one()) {
      red.delta_q(pivot, -(red.tag()->witness * u_inv));
    } else {
      red.delta(pivot, (RingElement::one(R) - red.v()[0]) * u_inv);
    }
    for (int i = 1; i < red.size(); ++i)
      if (!red.v()[i].is_zero()) red.gamma(i, -red.v()[i]);
  }
  return red.done() ? Status::Ok : Status::InternalError;
}

Status try_pid(Reduction& red, const Config& cfg) {
  const RingPtr& R = red.ring();
  if (R->nvars() > 1) return Status::StrategyInapplicable;
  if (red.tagged() && !red.tag()->s.is_one()) return Status::StrategyInapplicable;
  if (R->nvars() == 0) return try_unit_pivot(red, cfg);
  const int var = 0;

  auto unit_part = [&](const RingElement& x) {
    // x = num * u with u = prod D^{-den}: return the pair (num, den)
    return std::make_pair(x.num(), x.den());
  };

  // fold every tail coordinate into the head by the Euclidean algorithm
  for (int i = 1; i < red.size(); ++i) {
    while (!red.v()[i].is_zero()) {
      if (red.v()[0].is_zero()) {
        // swap (0, x) -> (x, 0)
        red.delta(i, RingElement::one(R));
        red.gamma(i, -RingElement::one(R));
        continue;
      }
      auto [n0, d0] = unit_part(red.v()[0]);
      auto [ni, di] = unit_part(red.v()[i]);
      if (n0.degree_in(var) >= ni.degree_in(var)) {
        // v_1 += lam v_i with lam = -quot(n0, ni) * D^{d_i} / D^{d_0}
        Polynomial q = univ_quot(n0, ni, var);
        Polynomial num = -q;
        for (int s = 0; s < R->slot_count(); ++s)
          if (di[s] > 0) num = num * R->slot_poly(s).pow(static_cast<unsigned>(di[s]));
        red.delta(i, RingElement(R, std::move(num), d0));
      } else {
        Polynomial q = univ_quot(ni, n0, var);
        Polynomial num = -q;
        for (int s = 0; s < R->slot_count(); ++s)
          if (d0[s] > 0) num = num * R->slot_poly(s).pow(static_cast<unsigned>(d0[s]));
        red.gamma(i, RingElement(R, std::move(num), di));
      }
    }
  }
  UnitResult u = is_unit(red.v()[0], cfg);
  if (u.status == Status::BoundExceeded) return Status::BoundExceeded;
  if (u.status != Status::Ok)
    throw Error(Status::InternalError, "pid fold left a non-unit head on unimodular input");
  normalize_pivot(red, u.inverse);
  return red.done() ? Status::Ok : Status::InternalError;
}

namespace {

Polynomial random_low_poly(Rng& rng, const RingPtr& R, int maxdeg, int terms) {
  Polynomial p(R->field, R->nvars());
  for (int t = 0; t < terms; ++t) {
    Expvec e(R->nvars(), 0);
    int budget = maxdeg;
    for (int v = 0; v < R->nvars(); ++v) {
      int d = static_cast<int>(rng.below(static_cast<std::uint64_t>(budget + 1)));
      e[v] = d;
      budget -= d;
    }
    long long c = R->field.kind == Field::Kind::Q
                      ? rng.range(-2, 2)
                      : rng.range(0, R->field.p - 1);
    p.add_term(e, Scalar::from_int(R->field, c));
  }
  return p;
}

// index-decoded degree <= 1 polynomial over F_p: coefficients for 1, vars
Polynomial enumerated_linear(const RingPtr& R, std::uint64_t index) {
  const std::uint32_t p = R->field.p;
  Polynomial out(R->field, R->nvars());
  long long c0 = static_cast<long long>(index % p);
  index /= p;
  out = out + Polynomial::constant(R->field, R->nvars(), Scalar::from_int(R->field, c0));
  for (int v = 0; v < R->nvars(); ++v) {
    long long cv = static_cast<long long>(index % p);
    index /= p;
    if (cv)
      out = out + Polynomial::variable(R->field, R->nvars(), v)
                      .scaled(Scalar::from_int(R->field, cv));
  }
  return out;
}

} // namespace

Status try_stable_range(Reduction& red, const Config& cfg, Rng& rng,
                        const TailCheck& tail_check) {
  const RingPtr& R = red.ring();
  const int r = red.size();
  if (r < 3) return Status::StrategyInapplicable;

  auto attempt = [&](const std::vector<RingElement>& t) -> bool {
    RVector tail;
    tail.reserve(r - 1);
    for (int i = 1; i < r; ++i) tail.push_back(red.v()[i] + t[i - 1] * red.v()[0]);
    auto cof = tail_check(tail);
    if (!cof) return false;
    for (int i = 1; i < r; ++i)
      if (!t[i - 1].is_zero()) red.gamma(i, t[i - 1]);
    // delta block: v_1 += sum (1 - v_1) c_i v_i lands exactly on 1
    RingElement one_minus = RingElement::one(R) - red.v()[0];
    if (red.tagged() && !red.tag()->s.is_one()) {
      RingElement w0 = red.tag()->witness;
      for (int i = 1; i < r; ++i) red.delta_q(i, -(w0 * (*cof)[i - 1]));
    } else {
      for (int i = 1; i < r; ++i) red.delta(i, one_minus * (*cof)[i - 1]);
    }
    if (!red.v()[0].is_one())
      throw Error(Status::InternalError, "delta block missed the unit head");
    for (int i = 1; i < r; ++i)
      if (!red.v()[i].is_zero()) red.gamma(i, -red.v()[i]);
    return true;
  };

  // zero draw first, then a deterministic coset sweep: t_i with
  // v_i + t_i v_1 equal to a small constant makes the tail trivially
  // unimodular; found by exact division, no ideal computation needed
  std::vector<RingElement> zeros(static_cast<std::size_t>(r - 1), RingElement::zero(R));
  if (attempt(zeros)) return Status::Ok;
  if (!red.v()[0].is_zero()) {
    std::vector<long long> consts{1, -1, 2, -2, 3, -3};
    for (int i = 1; i < r; ++i) {
      for (long long cst : consts) {
        Scalar c = Scalar::from_int(R->field, cst);
        if (c.is_zero()) continue;
        RingElement target = RingElement::from_scalar(R, c);
        auto t = ring_divexact(target - red.v()[i], red.v()[0]);
        if (!t) continue;
        std::vector<RingElement> cand(zeros);
        cand[i - 1] = *t;
        if (attempt(cand)) return Status::Ok;
        break; // one constant per coordinate is enough to try
      }
    }
  }
  for (unsigned draw = 0; draw < cfg.search_budget; ++draw) {
    std::vector<RingElement> t;
    t.reserve(r - 1);
    for (int i = 1; i < r; ++i) {
      int deg = static_cast<int>(rng.below(3));
      int terms = 1 + static_cast<int>(rng.below(2));
      t.push_back(RingElement::from_poly(R, random_low_poly(rng, R, deg, terms)));
    }
    if (attempt(t)) return Status::Ok;
  }
  // exhaustive low-degree sweep over small prime fields
  if (R->field.kind == Field::Kind::Fp && R->field.p <= 7) {
    std::uint64_t per = 1;
    for (int v = 0; v < R->nvars() + 1; ++v) per *= R->field.p;
    std::uint64_t total = 1;
    bool overflow = false;
    for (int i = 1; i < r; ++i) {
      total *= per;
      if (total > 4'000'000ULL) { overflow = true; break; }
    }
    std::uint64_t limit = overflow ? cfg.search_budget : std::min<std::uint64_t>(
        total, static_cast<std::uint64_t>(cfg.search_budget) * 16);
    for (std::uint64_t idx = 0; idx < limit; ++idx) {
      std::uint64_t rest = idx;
      std::vector<RingElement> t;
      for (int i = 1; i < r; ++i) {
        t.push_back(RingElement::from_poly(R, enumerated_linear(R, rest % per)));
        rest /= per;
      }
      if (attempt(t)) return Status::Ok;
    }
  }
  return Status::SearchBudgetExceeded;
}

Status try_stable_range(Reduction& red, const Config& cfg, Rng& rng) {
  TailCheck basic = [&cfg](const RVector& tail) -> std::optional<RVector> {
    if (!unimodular_mod_probe(tail)) return std::nullopt;
    UnimodularCheck c = is_unimodular(tail, cfg);
    if (c.status != Status::Ok) return std::nullopt;
    return c.cofactors;
  };
  return try_stable_range(red, cfg, rng, basic);
}

// ---- public entry ----

ReduceResult reduce_to_e1(const RVector& v, Strategy strategy, const Config& cfg,
                          std::optional<RingElement> tag) {
  ReduceResult res;
  if (v.size() < 2) {
    res.status = Status::StrategyInapplicable;
    res.message = "reduction needs at least two coordinates";
    return res;
  }
  const RingPtr& R = v[0].ring();

  std::optional<TagState> ts;
  if (tag) {
    TagState t{*tag, RingElement::zero(R)};
    RingElement d = v[0] - RingElement::one(R);
    if (tag->is_one()) {
      t.witness = d;
    } else {
      auto sat = saturation_membership(d.num(), {tag->num()}, R->inverted_product(),
                                       cfg.saturation_emax);
      if (sat.kind != SaturationKind::Member) {
        res.status = Status::TagPreconditionFailed;
        res.message = "head entry is not congruent to 1 modulo the tag";
        return res;
      }
      // d = s * w with w = c * prod D^{s.den} / (H^e * prod D^{d.den})
      Polynomial num = sat.cert.cofactors[0];
      for (int s = 0; s < R->slot_count(); ++s)
        if (tag->den()[s] > 0)
          num = num * R->slot_poly(s).pow(static_cast<unsigned>(tag->den()[s]));
      Expvec den(R->slot_count(), static_cast<int>(sat.cert.exponent));
      for (int s = 0; s < R->slot_count(); ++s) den[s] += d.den()[s];
      t.witness = RingElement(R, std::move(num), std::move(den));
      if (!(t.s * t.witness).equals(d)) {
        res.status = Status::InternalError;
        res.message = "tag witness construction failed";
        return res;
      }
    }
    ts = std::move(t);
  }

  res.stages.push_back("verify-unimodular");
  UnimodularCheck uc = is_unimodular(v, cfg);
  if (uc.status == Status::BoundExceeded) {
    res.status = Status::BoundExceeded;
    res.message = "unimodularity undecided at the configured saturation bound";
    return res;
  }
  if (uc.status != Status::Ok) {
    res.status = Status::NotUnimodular;
    res.message = "vector is not unimodular";
    return res;
  }

  Rng rng(cfg.seed);
  const int r = static_cast<int>(v.size());
  const int conservative_dim = R->nvars(); // base bound + m
  auto run = [&](Strategy s, Reduction& red) -> Status {
    switch (s) {
      case Strategy::UnitPivot:
        res.stages.push_back("unit-pivot");
        return try_unit_pivot(red, cfg);
      case Strategy::Pid:
        res.stages.push_back("euclid");
        return try_pid(red, cfg);
      case Strategy::StableRange:
        res.stages.push_back("stable-range");
        return try_stable_range(red, cfg, rng);
      case Strategy::Recursive:
        return try_recursive(red, cfg, rng, res.stages);
      default:
        return Status::StrategyInapplicable;
    }
  };

  auto finish = [&](Reduction& red) {
    ElementaryWord w = red.finish();
    validate_word(w, R);
    RVector replay = apply_word(w, v);
    RVector e1 = unit_vector(R, r, 0);
    for (int i = 0; i < r; ++i)
      if (!replay[i].equals(e1[i]))
        throw Error(Status::InternalError, "reducer output failed the replay check");
    res.word = std::move(w);
    res.status = Status::Ok;
  };

  if (strategy != Strategy::Auto) {
    // honor the documented preconditions of explicitly requested strategies
    if (strategy == Strategy::Pid && R->nvars() > 1) {
      res.status = Status::StrategyInapplicable;
      res.message = "pid strategy needs a univariate ring (m <= 1, no extra base variables)";
      return res;
    }
    if (strategy == Strategy::StableRange && r < std::max(3, R->dim_bound() + 2)) {
      res.status = Status::StrategyInapplicable;
      res.message = "stable-range needs r >= max(3, d+2)";
      return res;
    }
    if (strategy == Strategy::Recursive &&
        (R->n() == 0 || !R->starred || !R->starred_shape())) {
      res.status = Status::StrategyInapplicable;
      res.message = "recursive strategy needs a starred ring with inverted pairs";
      return res;
    }
    Reduction red(v, ts);
    Status st = run(strategy, red);
    if (st != Status::Ok) {
      res.status = st;
      if (res.message.empty()) res.message = status_name(st);
      return res;
    }
    finish(red);
    return res;
  }

  // auto dispatch: unit pivot, pid, stable range in the guaranteed region,
  // the recursive pipeline, then a stable-range attempt in the region the
  // transitivity theorems cover.
  Status last = Status::StrategyInapplicable;
  {
    Reduction red(v, ts);
    res.stages.push_back("unit-pivot");
    Status st = try_unit_pivot(red, cfg);
    if (st == Status::Ok) { finish(red); return res; }
  }
  if (R->nvars() <= 1 && (!ts || ts->s.is_one())) {
    Reduction red(v, ts);
    res.stages.push_back("euclid");
    Status st = try_pid(red, cfg);
    if (st == Status::Ok) { finish(red); return res; }
    last = st;
  }
  if (r >= conservative_dim + 2 && r >= 3) {
    Reduction red(v, ts);
    res.stages.push_back("stable-range");
    Status st = try_stable_range(red, cfg, rng);
    if (st == Status::Ok) { finish(red); return res; }
    last = st;
  }
  if (R->n() >= 1 && R->field_coeff_fs()) {
    Reduction red(v, ts);
    Status st = try_recursive(red, cfg, rng, res.stages);
    if (st == Status::Ok) { finish(red); return res; }
    last = st;
  }
  if (r >= std::max(3, R->dim_bound() + 2) && r < conservative_dim + 2) {
    Reduction red(v, ts);
    res.stages.push_back("stable-range");
    Status st = try_stable_range(red, cfg, rng);
    if (st == Status::Ok) { finish(red); return res; }
    last = st;
  }
  res.status = last;
  res.message = "no strategy reduced the vector: ";
  res.message += status_name(last);
  return res;
}

} // namespace unimod

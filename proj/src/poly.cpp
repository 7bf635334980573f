#include "poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace unimod {

int expvec_total(const Expvec& e) {
  int t = 0;
  for (int x : e) t += x;
  return t;
}

bool expvec_divides(const Expvec& a, const Expvec& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Expvec expvec_add(const Expvec& a, const Expvec& b) {
  Expvec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

Expvec expvec_sub(const Expvec& a, const Expvec& b) {
  Expvec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

Expvec expvec_lcm(const Expvec& a, const Expvec& b) {
  Expvec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::max(r[i], b[i]);
  return r;
}

MonomialOrder MonomialOrder::eliminate(const std::vector<int>& block, int nvars) {
  MonomialOrder ord;
  ord.kind = Kind::DegRevLex;
  ord.priority.reserve(nvars);
  for (int v : block) ord.priority.push_back(v);
  for (int v = 0; v < nvars; ++v)
    if (std::find(block.begin(), block.end(), v) == block.end())
      ord.priority.push_back(v);
  ord.elim_block = static_cast<int>(block.size());
  return ord;
}

namespace {

int cmp_kind(MonomialOrder::Kind kind, const Expvec& a, const Expvec& b,
             const std::vector<int>& vars) {
  if (kind == MonomialOrder::Kind::Lex) {
    for (int v : vars) {
      if (a[v] != b[v]) return a[v] > b[v] ? 1 : -1;
    }
    return 0;
  }
  int da = 0, db = 0;
  for (int v : vars) { da += a[v]; db += b[v]; }
  if (da != db) return da > db ? 1 : -1;
  // degrevlex tie-break: last nonzero difference negative means greater
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
    int d = a[*it] - b[*it];
    if (d != 0) return d < 0 ? 1 : -1;
  }
  return 0;
}

} // namespace

int MonomialOrder::cmp(const Expvec& a, const Expvec& b) const {
  const int n = static_cast<int>(a.size());
  std::vector<int> prio = priority;
  if (prio.empty()) {
    prio.resize(n);
    for (int i = 0; i < n; ++i) prio[i] = i;
  }
  if (elim_block > 0) {
    std::vector<int> head(prio.begin(), prio.begin() + elim_block);
    std::vector<int> tail(prio.begin() + elim_block, prio.end());
    int dh = 0;
    for (int v : head) dh += a[v] - b[v];
    if (dh != 0) return dh > 0 ? 1 : -1;
    if (int c = cmp_kind(Kind::Lex, a, b, head)) return c;
    return cmp_kind(kind, a, b, tail);
  }
  return cmp_kind(kind, a, b, prio);
}

Polynomial Polynomial::constant(const Field& f, int nvars, const Scalar& c) {
  Polynomial p(f, nvars);
  if (!c.is_zero()) p.terms_.emplace(Expvec(nvars, 0), c);
  return p;
}

Polynomial Polynomial::one(const Field& f, int nvars) {
  return constant(f, nvars, Scalar::one(f));
}

Polynomial Polynomial::variable(const Field& f, int nvars, int slot, int power) {
  if (slot < 0 || slot >= nvars)
    throw Error(Status::InternalError, "variable slot out of range");
  Expvec e(nvars, 0);
  e[slot] = power;
  Polynomial p(f, nvars);
  p.terms_.emplace(std::move(e), Scalar::one(f));
  return p;
}

Polynomial Polynomial::term(const Field& f, const Expvec& e, const Scalar& c) {
  Polynomial p(f, static_cast<int>(e.size()));
  if (!c.is_zero()) p.terms_.emplace(e, c);
  return p;
}

bool Polynomial::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && expvec_total(terms_.begin()->first) == 0;
}

bool Polynomial::is_one() const {
  return is_constant() && !terms_.empty() && terms_.begin()->second.is_one();
}

std::optional<Scalar> Polynomial::constant_value() const {
  if (terms_.empty()) return Scalar::zero(field_);
  if (!is_constant()) return std::nullopt;
  return terms_.begin()->second;
}

int Polynomial::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, expvec_total(e));
  return d;
}

int Polynomial::degree_in(int slot) const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e[slot]);
  return terms_.empty() ? -1 : d;
}

bool Polynomial::uses_var(int slot) const {
  for (const auto& [e, c] : terms_)
    if (e[slot] > 0) return true;
  return false;
}

void Polynomial::add_term(const Expvec& e, const Scalar& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
  } else {
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void Polynomial::check_compat(const Polynomial& o) const {
  if (field_ != o.field_) throw Error(Status::InternalError, "mixed coefficient fields");
  if (nvars_ != o.nvars_) throw Error(Status::InternalError, "polynomial arity mismatch");
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  check_compat(o);
  Polynomial r(*this);
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  check_compat(o);
  Polynomial r(*this);
  for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(field_, nvars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check_compat(o);
  Polynomial r(field_, nvars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_)
      r.add_term(expvec_add(ea, eb), ca * cb);
  return r;
}

Polynomial Polynomial::scaled(const Scalar& c) const {
  Polynomial r(field_, nvars_);
  if (c.is_zero()) return r;
  for (const auto& [e, k] : terms_) r.terms_.emplace(e, k * c);
  return r;
}

Polynomial Polynomial::mul_term(const Expvec& e, const Scalar& c) const {
  Polynomial r(field_, nvars_);
  if (c.is_zero()) return r;
  for (const auto& [te, tc] : terms_) r.terms_.emplace(expvec_add(te, e), tc * c);
  return r;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial r = one(field_, nvars_);
  Polynomial b(*this);
  while (k) {
    if (k & 1) r = r * b;
    b = b * b;
    k >>= 1;
  }
  return r;
}

bool Polynomial::operator==(const Polynomial& o) const {
  return field_ == o.field_ && nvars_ == o.nvars_ && terms_ == o.terms_;
}

const std::pair<const Expvec, Scalar>& Polynomial::leading(const MonomialOrder& ord) const {
  if (terms_.empty()) throw Error(Status::InternalError, "leading term of zero");
  auto best = terms_.begin();
  for (auto it = std::next(terms_.begin()); it != terms_.end(); ++it)
    if (ord.greater(it->first, best->first)) best = it;
  return *best;
}

Polynomial Polynomial::monic(const MonomialOrder& ord) const {
  if (terms_.empty()) return *this;
  return scaled(leading(ord).second.inverse());
}

std::optional<Polynomial> Polynomial::divexact(const Polynomial& d) const {
  if (d.is_zero()) throw Error(Status::InternalError, "division by zero polynomial");
  check_compat(d);
  MonomialOrder ord;
  Polynomial rem(*this);
  Polynomial quo(field_, nvars_);
  const auto& dl = d.leading(ord);
  while (!rem.is_zero()) {
    const auto& rl = rem.leading(ord);
    if (!expvec_divides(dl.first, rl.first)) return std::nullopt;
    Expvec e = expvec_sub(rl.first, dl.first);
    Scalar c = rl.second / dl.second;
    quo.add_term(e, c);
    rem = rem - d.mul_term(e, c);
  }
  return quo;
}

Polynomial Polynomial::substitute(const std::map<int, Polynomial>& images) const {
  Polynomial r(field_, nvars_);
  for (const auto& [e, c] : terms_) {
    Polynomial t = constant(field_, nvars_, c);
    Expvec rest(e);
    for (const auto& [slot, img] : images) {
      if (e[slot] > 0) {
        t = t * img.pow(static_cast<unsigned>(e[slot]));
        rest[slot] = 0;
      }
    }
    r = r + t.mul_term(rest, Scalar::one(field_));
  }
  return r;
}

Polynomial Polynomial::eval_partial(const std::map<int, Scalar>& point) const {
  Polynomial r(field_, nvars_);
  for (const auto& [e, c] : terms_) {
    Scalar k = c;
    Expvec rest(e);
    for (const auto& [slot, val] : point) {
      for (int i = 0; i < e[slot]; ++i) k = k * val;
      rest[slot] = 0;
    }
    r.add_term(rest, k);
  }
  return r;
}

Polynomial Polynomial::coeff_in(int slot, int k) const {
  Polynomial r(field_, nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[slot] != k) continue;
    Expvec rest(e);
    rest[slot] = 0;
    r.add_term(rest, c);
  }
  return r;
}

Polynomial Polynomial::extended(int new_nvars) const {
  if (new_nvars < nvars_) throw Error(Status::InternalError, "extend shrinks arity");
  Polynomial r(field_, new_nvars);
  for (const auto& [e, c] : terms_) {
    Expvec we(e);
    we.resize(new_nvars, 0);
    r.terms_.emplace(std::move(we), c);
  }
  return r;
}

Polynomial Polynomial::restricted(int new_nvars) const {
  Polynomial r(field_, new_nvars);
  for (const auto& [e, c] : terms_) {
    for (int i = new_nvars; i < nvars_; ++i)
      if (e[i] != 0) throw Error(Status::InternalError, "restrict drops used variable");
    Expvec we(e.begin(), e.begin() + new_nvars);
    r.terms_.emplace(std::move(we), c);
  }
  return r;
}

Scalar Polynomial::unit_content() const {
  if (terms_.empty()) return Scalar::one(field_);
  return terms_.begin()->second;
}

std::string Polynomial::to_string(const std::vector<std::string>& var_names) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  // deterministic print: storage order reversed (largest lexicographic first)
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    std::string cs = c.to_string();
    bool neg = !cs.empty() && cs[0] == '-';
    if (first) {
      if (neg) { out << "-"; cs = cs.substr(1); }
      first = false;
    } else {
      out << (neg ? " - " : " + ");
      if (neg) cs = cs.substr(1);
    }
    std::string mono;
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += var_names[v];
      if (e[v] > 1) mono += "^" + std::to_string(e[v]);
    }
    if (mono.empty()) {
      out << cs;
    } else if (cs == "1") {
      out << mono;
    } else {
      out << cs << "*" << mono;
    }
  }
  return out.str();
}

namespace {

struct Lexer {
  const std::string& s;
  std::size_t i = 0;

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eof() {
    skip();
    return i >= s.size();
  }
  char peek() {
    skip();
    return i < s.size() ? s[i] : '\0';
  }
  bool accept(char c) {
    skip();
    if (i < s.size() && s[i] == c) { ++i; return true; }
    return false;
  }
  std::string number() {
    skip();
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i) throw Error(Status::ParseError, "expected number in polynomial at '" + s.substr(i, 8) + "'");
    std::string n = s.substr(i, j - i);
    i = j;
    return n;
  }
  std::string name() {
    skip();
    std::size_t j = i;
    while (j < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
      ++j;
    std::string n = s.substr(i, j - i);
    i = j;
    return n;
  }
};

long long to_ll(const std::string& digits) {
  if (digits.size() > 17)
    throw Error(Status::ParseError, "integer literal too large: " + digits);
  return std::stoll(digits);
}

} // namespace

Polynomial parse_polynomial(const std::string& text, const Field& f,
                            const std::vector<std::string>& var_names) {
  Lexer lx{text};
  const int n = static_cast<int>(var_names.size());
  Polynomial result(f, n);
  bool expect_term = true;
  int sign = 1;
  if (lx.accept('-')) sign = -1;
  else lx.accept('+');
  while (true) {
    // one term: *-joined factors
    Scalar coef = Scalar::from_int(f, sign);
    Expvec mono(n, 0);
    bool any_factor = false;
    while (true) {
      char c = lx.peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        long long num = to_ll(lx.number());
        if (lx.accept('/')) {
          long long den = to_ll(lx.number());
          coef = coef * Scalar::from_fraction(f, num, den);
        } else {
          coef = coef * Scalar::from_int(f, num);
        }
        any_factor = true;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string nm = lx.name();
        if (nm == "t")
          throw Error(Status::ParseError, "variable name 't' is reserved");
        auto it = std::find(var_names.begin(), var_names.end(), nm);
        if (it == var_names.end())
          throw Error(Status::ParseError, "unknown variable '" + nm + "'");
        int slot = static_cast<int>(it - var_names.begin());
        int pw = 1;
        if (lx.accept('^')) pw = static_cast<int>(to_ll(lx.number()));
        if (pw < 0) throw Error(Status::ParseError, "negative exponent");
        mono[slot] += pw;
        any_factor = true;
      } else {
        throw Error(Status::ParseError, "expected coefficient or variable in polynomial");
      }
      if (!lx.accept('*')) break;
    }
    if (!any_factor) throw Error(Status::ParseError, "empty term in polynomial");
    result.add_term(mono, coef);
    (void)expect_term;
    if (lx.eof()) break;
    if (lx.accept('+')) sign = 1;
    else if (lx.accept('-')) sign = -1;
    else throw Error(Status::ParseError, "unexpected character in polynomial: '" + std::string(1, lx.peek()) + "'");
  }
  return result;
}

} // namespace unimod

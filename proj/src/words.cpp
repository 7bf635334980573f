#include "words.hpp"

#include <algorithm>

namespace unimod {

RVector unit_vector(const RingPtr& ring, int size, int pos) {
  RVector v(static_cast<std::size_t>(size), RingElement::zero(ring));
  v[pos] = RingElement::one(ring);
  return v;
}

RVector apply_word(const ElementaryWord& w, const RVector& v) {
  if (static_cast<int>(v.size()) != w.size)
    throw Error(Status::InternalError, "word size does not match vector length");
  RVector out(v);
  for (const auto& g : w.gens) out[g.i] = out[g.i] + g.lambda * out[g.j];
  return out;
}

RVector apply_inverse(const ElementaryWord& w, const RVector& v) {
  return apply_word(inverse_word(w), v);
}

ElementaryWord inverse_word(const ElementaryWord& w) {
  ElementaryWord out;
  out.size = w.size;
  out.tag = w.tag;
  out.gens.reserve(w.gens.size());
  for (auto it = w.gens.rbegin(); it != w.gens.rend(); ++it) {
    ElementaryGen g{it->i, it->j, -it->lambda, std::nullopt};
    if (it->tag_quotient) g.tag_quotient = -*it->tag_quotient;
    out.gens.push_back(std::move(g));
  }
  return out;
}

ElementaryWord concat_words(const ElementaryWord& first, const ElementaryWord& second) {
  if (first.size != second.size)
    throw Error(Status::InternalError, "word sizes differ in concatenation");
  ElementaryWord out(first);
  out.gens.insert(out.gens.end(), second.gens.begin(), second.gens.end());
  if (!out.tag) out.tag = second.tag;
  return out;
}

void validate_word(const ElementaryWord& w, const RingPtr& ring) {
  for (const auto& g : w.gens) {
    if (g.i == g.j || g.i < 0 || g.j < 0 || g.i >= w.size || g.j >= w.size)
      throw Error(Status::InternalError, "malformed elementary generator");
    if (!g.lambda.ring()->same(*ring))
      throw Error(Status::InternalError, "generator parameter from a foreign ring");
    if (w.tagged()) {
      if (g.i != 0 && g.j != 0)
        throw Error(Status::InternalError,
                    "relative word contains an inner generator");
      if (g.i == 0) {
        if (!g.tag_quotient)
          throw Error(Status::InternalError,
                      "relative word misses a membership witness");
        if (!(*w.tag * *g.tag_quotient).equals(g.lambda))
          throw Error(Status::InternalError, "relative membership witness fails");
      }
    }
  }
}

RMatrix::RMatrix(RingPtr ring, int n) : ring_(std::move(ring)), n_(n) {
  a_.assign(static_cast<std::size_t>(n) * n, RingElement::zero(ring_));
}

RMatrix RMatrix::identity(const RingPtr& ring, int n) {
  RMatrix m(ring, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = RingElement::one(ring);
  return m;
}

RMatrix RMatrix::operator*(const RMatrix& o) const {
  RMatrix r(ring_, n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      if (at(i, k).is_zero()) continue;
      for (int j = 0; j < n_; ++j) {
        if (o.at(k, j).is_zero()) continue;
        r.at(i, j) = r.at(i, j) + at(i, k) * o.at(k, j);
      }
    }
  return r;
}

RVector RMatrix::operator*(const RVector& v) const {
  RVector r(static_cast<std::size_t>(n_), RingElement::zero(ring_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (!at(i, j).is_zero() && !v[j].is_zero()) r[i] = r[i] + at(i, j) * v[j];
  return r;
}

bool RMatrix::operator==(const RMatrix& o) const {
  if (n_ != o.n_) return false;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (!at(i, j).equals(o.at(i, j))) return false;
  return true;
}

bool RMatrix::is_identity() const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      if (i == j && !at(i, j).is_one()) return false;
      if (i != j && !at(i, j).is_zero()) return false;
    }
  return true;
}

namespace {

RingElement det_rec(const RMatrix& m, std::vector<int>& cols, int row) {
  const RingPtr& R = m.ring();
  if (static_cast<int>(cols.size()) == 1)
    return m.at(row, cols[0]);
  RingElement acc = RingElement::zero(R);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (m.at(row, cols[k]).is_zero()) continue;
    int c = cols[k];
    std::vector<int> rest;
    rest.reserve(cols.size() - 1);
    for (std::size_t t = 0; t < cols.size(); ++t)
      if (t != k) rest.push_back(cols[t]);
    RingElement minor = det_rec(m, rest, row + 1);
    RingElement term = m.at(row, cols[k]) * minor;
    if (k % 2) term = -term;
    acc = acc + term;
    (void)c;
  }
  return acc;
}

} // namespace

RingElement RMatrix::det() const {
  std::vector<int> cols(n_);
  for (int i = 0; i < n_; ++i) cols[i] = i;
  return det_rec(*this, cols, 0);
}

RMatrix RMatrix::adjugate() const {
  RMatrix adj(ring_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      // cofactor C_ji
      std::vector<int> cols;
      for (int c = 0; c < n_; ++c)
        if (c != i) cols.push_back(c);
      RMatrix sub(ring_, n_ - 1);
      int rr = 0;
      for (int r = 0; r < n_; ++r) {
        if (r == j) continue;
        for (int cc = 0; cc < n_ - 1; ++cc) sub.at(rr, cc) = at(r, cols[cc]);
        ++rr;
      }
      RingElement c = n_ == 1 ? RingElement::one(ring_) : sub.det();
      if ((i + j) % 2) c = -c;
      adj.at(i, j) = c;
    }
  return adj;
}

std::optional<RMatrix> RMatrix::inverse(const Config& cfg) const {
  RingElement d = det();
  UnitResult u = is_unit(d, cfg);
  if (u.status != Status::Ok) return std::nullopt;
  RMatrix adj = adjugate();
  RMatrix inv(ring_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) inv.at(i, j) = adj.at(i, j) * u.inverse;
  return inv;
}

RMatrix word_matrix(const ElementaryWord& w, const RingPtr& ring) {
  RMatrix m = RMatrix::identity(ring, w.size);
  // generators act in order: row i += lambda * row j
  for (const auto& g : w.gens)
    for (int c = 0; c < w.size; ++c)
      m.at(g.i, c) = m.at(g.i, c) + g.lambda * m.at(g.j, c);
  return m;
}

RMatrix complete_to_matrix(const RVector& v, const ElementaryWord& w) {
  if (v.empty()) throw Error(Status::InternalError, "empty vector");
  const RingPtr& R = v[0].ring();
  RVector image = apply_word(w, v);
  RVector e1 = unit_vector(R, w.size, 0);
  for (int i = 0; i < w.size; ++i)
    if (!image[i].equals(e1[i]))
      throw Error(Status::InternalError, "completion requires a reducing word");
  RMatrix m = word_matrix(inverse_word(w), R);
  for (int i = 0; i < w.size; ++i)
    if (!m.at(i, 0).equals(v[i]))
      throw Error(Status::InternalError, "completion first column mismatch");
  return m;
}

} // namespace unimod

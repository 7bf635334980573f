#pragma once

#include "ring.hpp"

namespace unimod {

// One transvection E_{ij}(lambda) = Id + lambda * e_{ij}: acting on a column
// vector, row i gains lambda times row j. Indices are 0-based internally and
// 1-based in all serialized forms.
struct ElementaryGen {
  int i = 0, j = 1;
  RingElement lambda;
  // witness lambda == tag * tag_quotient for Delta-type generators (i == 0)
  // of relative words
  std::optional<RingElement> tag_quotient;
};

// A word of elementary generators, applied in list order. A word tagged with
// s claims membership in the relative elementary group: generators touching
// the first row carry parameters in (s) with explicit quotient witnesses,
// and every generator involves the first row or first column.
struct ElementaryWord {
  int size = 0;
  std::vector<ElementaryGen> gens;
  std::optional<RingElement> tag;

  bool tagged() const { return tag.has_value(); }
};

using RVector = std::vector<RingElement>;

RVector unit_vector(const RingPtr& ring, int size, int pos);

// exact matrix-vector action of the word, generators in list order
RVector apply_word(const ElementaryWord& w, const RVector& v);
RVector apply_inverse(const ElementaryWord& w, const RVector& v);

ElementaryWord inverse_word(const ElementaryWord& w);
ElementaryWord concat_words(const ElementaryWord& first, const ElementaryWord& second);

// relative-shape and witness validation; throws on malformed words
void validate_word(const ElementaryWord& w, const RingPtr& ring);

// Square matrix over a ring.
class RMatrix {
public:
  RMatrix() = default;
  RMatrix(RingPtr ring, int n);
  static RMatrix identity(const RingPtr& ring, int n);

  int n() const { return n_; }
  const RingPtr& ring() const { return ring_; }
  RingElement& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const RingElement& at(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * n_ + j];
  }

  RMatrix operator*(const RMatrix& o) const;
  RVector operator*(const RVector& v) const;
  bool operator==(const RMatrix& o) const;
  bool is_identity() const;

  RingElement det() const; // exact cofactor expansion, desk sizes
  RMatrix adjugate() const;
  // exact inverse when det is a unit
  std::optional<RMatrix> inverse(const Config& cfg) const;

private:
  RingPtr ring_;
  int n_ = 0;
  std::vector<RingElement> a_;
};

RMatrix word_matrix(const ElementaryWord& w, const RingPtr& ring);

// Completion of a reduced unimodular vector: with apply_word(w, v) == e_1,
// returns M = matrix(w)^{-1}, whose first column is v and determinant is 1.
RMatrix complete_to_matrix(const RVector& v, const ElementaryWord& w);

} // namespace unimod

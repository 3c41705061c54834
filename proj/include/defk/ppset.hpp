#pragma once

#include <optional>
#include <string>
#include <vector>

#include "defk/module.hpp"

namespace defk {

// Dimension vector in N^k, plus a formal bottom for the empty set.
struct Colour {
  bool bottom = true;
  std::vector<long> dims;

  static Colour bot() { return Colour{}; }
  static Colour of(std::vector<long> d) { return Colour{false, std::move(d)}; }

  bool operator==(const Colour& o) const { return bottom == o.bottom && dims == o.dims; }
  bool operator!=(const Colour& o) const { return !(*this == o); }
  Colour operator+(const Colour& o) const;     // vector addition; bottom absorbs
  bool leq(const Colour& o) const;             // componentwise; bottom below all
  bool lt(const Colour& o) const { return leq(o) && *this != o; }
  int lex_cmp(const Colour& o) const;          // total order used for tie-breaks
  std::string str() const;
};

// pp-definable subgroup of M^n in canonical form: per component a reduced
// echelon basis of a subspace U_i of R_i^{1 x n q_i}, imposed on every
// coordinate slice of a vector. Structural equality is subgroup equality.
struct PPSubgroup {
  ModulePtr mod;
  int n = 0;
  std::vector<Mat> basis;

  static PPSubgroup full(const ModulePtr& m, int n);
  static PPSubgroup zero_group(const ModulePtr& m, int n);
  // Canonicalizes arbitrary spanning rows (one matrix per component, n q_i
  // columns).
  static PPSubgroup span(const ModulePtr& m, int n, std::vector<Mat> gens);
  // Solution space of x H = 0 for an n x m matrix over S.
  static PPSubgroup annihilator(const ModulePtr& m, const SMat& h);
  // First d_i standard coordinates per component.
  static PPSubgroup standard(const ModulePtr& m, int n, const std::vector<long>& dims);

  Colour colour() const;
  long dim(int i) const { return basis[i].rows; }
  bool contains_slicewise(const Vector& v) const;  // v in the subgroup
  bool leq(const PPSubgroup& o) const;             // subspace containment per component

  PPSubgroup intersect(const PPSubgroup& o) const;
  PPSubgroup sum(const PPSubgroup& o) const;
  PPSubgroup product(const PPSubgroup& o) const;     // in M^{n+n'}
  PPSubgroup embed_zero(int n2) const;               // extra coordinates pinned to 0
  PPSubgroup cylinder(int n2) const;                 // extra coordinates free

  bool operator==(const PPSubgroup& o) const;
  bool operator!=(const PPSubgroup& o) const { return !(*this == o); }
  int cmp(const PPSubgroup& o) const;

  std::string str() const;
};

// pp-definable subset of M^n: empty, or a coset rep + subgroup with the rep
// reduced slicewise to the unique representative vanishing on pivot
// coordinates; so structural equality is set equality.
struct PPSet {
  ModulePtr mod;
  int n = 0;
  bool empty = true;
  PPSubgroup sub;
  Vector rep;

  static PPSet empty_set(const ModulePtr& m, int n);
  static PPSet coset(PPSubgroup s, const Vector& rep);
  static PPSet full(const ModulePtr& m, int n) {
    return coset(PPSubgroup::full(m, n), Vector::zero(m, n));
  }
  static PPSet point(const Vector& v);
  static PPSet standard(const ModulePtr& m, int n, const std::vector<long>& dims) {
    return coset(PPSubgroup::standard(m, n, dims), Vector::zero(m, n));
  }

  bool contains(const Vector& v) const;
  bool subset_of(const PPSet& o) const;
  Colour colour() const { return empty ? Colour::bot() : sub.colour(); }
  bool is_point() const;

  PPSet intersect(const PPSet& o) const;
  PPSet translate(const Vector& t) const;
  PPSet product(const PPSet& o) const;
  PPSet embed_zero(int n2) const;

  bool operator==(const PPSet& o) const;
  bool operator!=(const PPSet& o) const { return !(*this == o); }
  int cmp(const PPSet& o) const;

  std::string str() const;
};

// Solutions of the pointwise affine system slice_t(x) g_i = slice_t(c) for
// every component i and index t (g_i has n q_i rows; c gives the right-hand
// slices, width = g_i's columns). Empty when some slice is unsolvable.
PPSet pp_solve(const ModulePtr& m, int n, const std::vector<Mat>& g, const Vector& c);

// Affine change of frame carrying a non-empty pp-set onto the standard coset
// of its colour: x |-> (x - d1) A with A invertible over S. Slicewise, A's
// component flats map U_i onto the leading-coordinate subspace.
struct StandardFrame {
  Vector d1;
  SMat a;
};
StandardFrame pp_iso_standard(const PPSet& p);

// Blocked reinterpretations over M(1,R) -> M(q,R); slice bases are carried
// verbatim (the slice width n q is unchanged).
PPSubgroup morita_ppsubgroup(const PPSubgroup& s, int q);
PPSet morita_ppset(const PPSet& p, int q);

}  // namespace defk

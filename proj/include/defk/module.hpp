#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "defk/ring.hpp"

namespace defk {

// Right S-module M = prod_i M_i, component i a direct sum of rank_i copies of
// the row module M_{1xq_i}(R_i). rank -1 stands for countable rank omega.
class ModuleDescriptor;
using ModulePtr = std::shared_ptr<const ModuleDescriptor>;

inline constexpr long kOmega = -1;

class ModuleDescriptor {
 public:
  static ModulePtr make(const RingPtr& ring, std::vector<long> ranks);

  const RingPtr& ring() const { return ring_; }
  int k() const { return static_cast<int>(ranks_.size()); }
  long rank(int i) const { return ranks_[i]; }
  bool component_infinite(int i) const;
  bool all_infinite() const;
  bool is_finite() const;       // finite as a set
  long long cardinality() const;  // 0 when infinite; SizeBound error beyond cap

  bool operator==(const ModuleDescriptor& o) const;
  bool operator!=(const ModuleDescriptor& o) const { return !(*this == o); }

  std::string rank_str() const;  // "rank(omega)", "rank(2, omega)", ...

 private:
  RingPtr ring_;
  std::vector<long> ranks_;
};

bool same_module(const ModulePtr& a, const ModulePtr& b);

// Element of M: per component a finitely supported map index -> 1xq_i row.
// Zero rows are never stored.
struct ModuleElement {
  ModulePtr mod;
  std::vector<std::map<long, Mat>> comps;

  static ModuleElement zero(const ModulePtr& m);
  // 1 at column col of the 1xq row at the given component/index.
  static ModuleElement unit(const ModulePtr& m, int comp, long idx, int col = 0);

  void set_entry(int comp, long idx, const Mat& row);  // prunes zero rows
  Mat entry(int comp, long idx) const;                 // zero row when absent
  bool is_zero() const;
  long max_index() const;  // largest support index across components, -1 if zero

  ModuleElement operator+(const ModuleElement& o) const;
  ModuleElement operator-(const ModuleElement& o) const;
  ModuleElement operator-() const;
  ModuleElement scalar_act(const RingElement& s) const;  // right action

  int cmp(const ModuleElement& o) const;
  bool operator==(const ModuleElement& o) const { return cmp(o) == 0; }
  bool operator!=(const ModuleElement& o) const { return cmp(o) != 0; }

  std::string str() const;
};

// Element of M^n.
struct Vector {
  ModulePtr mod;
  int n = 0;
  std::vector<ModuleElement> entries;

  static Vector zero(const ModulePtr& m, int n);

  bool is_zero() const;
  long max_index() const;

  // Coordinate slice: the 1 x (n q_i) row over R_i gathering entry rows at
  // one support index. All pp-conditions act on these slices.
  Mat slice(int comp, long idx) const;
  void set_slice(int comp, long idx, const Mat& row);

  // x * A for an n x n matrix over S: per component, slicewise flat product.
  Vector apply(const SMat& a) const;

  Vector operator+(const Vector& o) const;
  Vector operator-(const Vector& o) const;

  int cmp(const Vector& o) const;
  bool operator==(const Vector& o) const { return cmp(o) == 0; }
  bool operator!=(const Vector& o) const { return cmp(o) != 0; }

  std::string str() const;
};

// Zero-padding embedding M^n -> M^{n2}, n2 >= n.
Vector embed_vector(const Vector& v, int n2);

// Deterministic injective stream of nonzero module elements (distinct across
// l); needs an infinite component.
ModuleElement module_stream(const ModulePtr& m, unsigned long long l);

// All elements / vectors of a finite module, in a fixed order; SizeBound
// error when the count exceeds cap.
std::vector<ModuleElement> enumerate_module(const ModulePtr& m, long long cap);
std::vector<Vector> enumerate_vectors(const ModulePtr& m, int n, long long cap);

// Blocked reinterpretations along M(1,R) -> M(q,R): the module keeps its
// rank (each index now carries a 1xq row, so the underlying R-rank is
// multiplied by q); a tuple vector blocks q consecutive tuple coordinates
// into one, so its full coordinate slices are unchanged.
ModulePtr morita_module(const ModulePtr& m, int q);
Vector morita_vector(const Vector& v, int q);

}  // namespace defk

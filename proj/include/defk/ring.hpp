#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "defk/matrix.hpp"

namespace defk {

// A semisimple ring S = prod_i M(q_i, R_i) given by its component shape.
struct RingComponent {
  int q = 1;
  const DivisionRing* div = nullptr;
};

class RingDescriptor;
using RingPtr = std::shared_ptr<const RingDescriptor>;

class RingDescriptor {
 public:
  static RingPtr make(std::vector<RingComponent> comps);

  int k() const { return static_cast<int>(comps_.size()); }
  const RingComponent& comp(int i) const { return comps_[i]; }
  const std::vector<RingComponent>& comps() const { return comps_; }

  bool operator==(const RingDescriptor& o) const;
  bool operator!=(const RingDescriptor& o) const { return !(*this == o); }

  std::string name() const;  // e.g. "M(2, GF(5)) x M(1, QQ)"

 private:
  std::vector<RingComponent> comps_;
};

bool same_ring(const RingPtr& a, const RingPtr& b);

// An element of S: one q_i x q_i matrix per component.
struct RingElement {
  RingPtr ring;
  std::vector<Mat> comps;

  static RingElement zero(const RingPtr& s);
  static RingElement one(const RingPtr& s);
  static RingElement make(const RingPtr& s, std::vector<Mat> comps);

  RingElement operator+(const RingElement& o) const;
  RingElement operator-(const RingElement& o) const;
  RingElement operator*(const RingElement& o) const;
  bool is_unit() const;  // every component invertible
  std::optional<RingElement> invert() const;

  int cmp(const RingElement& o) const;
  bool operator==(const RingElement& o) const { return cmp(o) == 0; }
  bool operator!=(const RingElement& o) const { return cmp(o) != 0; }

  std::string str() const;
};

// x e_i for each central idempotent e_i; reassembling (summing) gives x back.
std::vector<RingElement> ring_decompose(const RingElement& x);

// An n x m matrix over S, stored per component as the flattened
// (n q_i) x (m q_i) matrix over R_i: S-entry (a,b) occupies the q_i x q_i
// block at rows [a q_i, (a+1) q_i), cols [b q_i, (b+1) q_i). Row vectors of
// blocked coordinate slices multiply these flats directly, which is the
// GL_n(M_q(R)) = GL_nq(R) identification in matrix form.
struct SMat {
  RingPtr ring;
  int rows = 0;
  int cols = 0;
  std::vector<Mat> flat;

  static SMat zero(const RingPtr& s, int rows, int cols);
  static SMat identity(const RingPtr& s, int n);
  static SMat from_elements(const RingPtr& s,
                            const std::vector<std::vector<RingElement>>& entries);

  RingElement entry(int a, int b) const;

  SMat operator+(const SMat& o) const;
  SMat operator-(const SMat& o) const;
  SMat operator*(const SMat& o) const;
  bool is_invertible() const;
  std::optional<SMat> invert() const;

  int cmp(const SMat& o) const;
  bool operator==(const SMat& o) const { return cmp(o) == 0; }
  bool operator!=(const SMat& o) const { return cmp(o) != 0; }

  std::string str() const;
};

// Blocked reinterpretation M(1, R) -> M(q, R) of the ring itself.
RingPtr morita_ring(const RingPtr& s, int q);

}  // namespace defk

#pragma once

#include <map>
#include <string>
#include <vector>

#include "defk/defmap.hpp"

namespace defk {

// Value of the abelianized automorphism colimit attached to one ring
// component: a point-permutation parity, plus finitely many levels d >= 1
// each carrying a Dieudonne class over R_i and a coset-permutation parity.
// Levels count raw R_i-dimensions; zero rows (trivial det, sign 0) are
// pruned, so structural equality is group-element equality.
struct K1Level {
  UnitClass det;
  int sign = 0;
};

struct K1Component {
  int sign0 = 0;
  std::map<long, K1Level> levels;
};

struct K1Class {
  RingPtr ring;
  std::vector<K1Component> comps;

  static K1Class zero(const RingPtr& s);
  bool is_zero() const;
  std::string str() const;
};

// Group operation / equality. Both insist on the same ring descriptor.
K1Class k1_add(const K1Class& a, const K1Class& b);
bool k1_eq(const K1Class& a, const K1Class& b);

// Class of a definable automorphism, stable under extension by the
// identity and under conjugation by definable bijections. The map must be
// an automorphism of its carrier, every component module must be infinite,
// and no component may be the excluded rank-one shape over GF(2).
K1Class k1_invariant(const PiecewiseAffineBijection& f);

// Class of an invertible n x n matrix over S: the Dieudonne class of each
// component flat, placed at level n q_i; all signs zero.
K1Class k1_of_gl(const SMat& a);

// Symbolic isomorphism type of an abelian group, built from cyclic and
// infinite cyclic summands, countable direct sums, and finite products.
// Direct sums are flattened and trivial summands dropped, but summand
// order is kept, so equality is structural.
struct GroupDescriptor {
  enum class Kind { Trivial, Cyclic, Integers, CountableSum, DirectSum };

  Kind kind = Kind::Trivial;
  mpz_class order;                    // Cyclic
  std::vector<GroupDescriptor> parts; // CountableSum: one; DirectSum: many

  static GroupDescriptor trivial();
  static GroupDescriptor cyclic(const mpz_class& m);  // pre: m >= 1
  static GroupDescriptor integers();
  static GroupDescriptor countable_sum(GroupDescriptor g);
  static GroupDescriptor direct_sum(std::vector<GroupDescriptor> parts);
  static GroupDescriptor finite_product(std::vector<GroupDescriptor> parts);
  // Abelianized unit group of one plugin, expanded into the basis above.
  static GroupDescriptor unit_group_ab(const DivisionRing* r);

  bool operator==(const GroupDescriptor& o) const;
  bool operator!=(const GroupDescriptor& o) const { return !(*this == o); }

  std::string str() const;
};

// Isomorphism type of the full invariant group for automorphisms over a
// module: C2 for finite modules; for all-infinite modules the product over
// components of Z2 + sum_{i>=1} (GL_{i q}(R)^ab + Z2), with the level index
// i counting S-coordinates (engine levels divided by q_i). Mixed
// finite/infinite modules and the excluded GF(2) shape are refused.
GroupDescriptor expected_k1_group(const RingPtr& ring, const ModulePtr& mod);

// Realizes a common restriction domain for the automorphism groups of two
// sets of dimension > m: the returned bijection g conjugates automorphisms
// of its chunk to automorphisms of d2 without changing k1_invariant.
ChunkResult transport_automorphism_group(const DefinableSet& d1,
                                         const DefinableSet& d2,
                                         const Colour& m);

}  // namespace defk

#pragma once

#include "defk/k1.hpp"

namespace defk {

// A finite module with its carrier spelled out. Ground truth for the
// symbolic engine is computed by enumeration on these.
struct FiniteStructure {
  ModulePtr mod;
  std::vector<ModuleElement> carrier;

  // requires a finite module with at least two elements
  static FiniteStructure make(const ModulePtr& m);
  long size() const { return static_cast<long>(carrier.size()); }
};

// One stage of the brute-force chain: the full symmetric group on a
// definable set of the given size, abelianized by closing the commutators
// of the transposition generators into a subgroup.
struct BruteStage {
  long set_size = 0;
  unsigned long group_order = 0;
  unsigned long commutator_order = 0;
  GroupDescriptor ab;
};

struct BruteK1Report {
  std::vector<BruteStage> stages;  // set sizes 2 .. |carrier|^max_power
  bool stabilized = false;         // at least two stages, last two agree
  GroupDescriptor value;           // descriptor of the last stage
  std::string str() const;
};

// Abelianizations of the symmetric groups along the cofinal chain of
// definable subsets of the powers up to max_power. pre: carrier size in
// 2..4, max_power in 1..2, and |carrier|^max_power <= 9.
BruteK1Report brute_k1_finite(const FiniteStructure& s, int max_power);

// Every point of d, block-major. Works over finite modules, and over
// infinite ones when every block is a punctured point cloud (colour zero).
std::vector<Vector> enumerate_set(const DefinableSet& d, long long cap = 1 << 17);

// Index permutation induced by f on enumerate_set(f.source); requires
// source = target and checks bijectivity pointwise.
std::vector<long> enumerate_perm(const PiecewiseAffineBijection& f,
                                 long long cap = 1 << 17);

// 0 for even, 1 for odd.
int permutation_parity(const std::vector<long>& perm);

struct AgreementReport {
  bool agree = false;
  std::string detail;
};

// support(f) against the enumerated set of moved points.
AgreementReport check_support(const PiecewiseAffineBijection& f);

// Reinterpret d over a copy of its module with the given ranks: same ring,
// identical block data. Subgroup bases and membership are slicewise, so the
// set means the same thing as long as every stored support index falls
// below the new rank of its component; indices past the bound are refused.
DefinableSet truncate_set(const DefinableSet& d, const std::vector<long>& ranks);

// k0 polynomial of d, computed symbolically over its own module, evaluated
// at the restricted cardinalities |R_i|^rank_i, against the enumerated
// cardinality of the rank-truncated set.
AgreementReport check_counts(const DefinableSet& d, const std::vector<long>& ranks);

// Level-0 sign reported by k1_invariant against the enumerated cycle
// parity, for a permutation of a zero-dimensional set over an infinite
// one-component module.
AgreementReport check_sign(const PiecewiseAffineBijection& f);

}  // namespace defk

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "defk/ppset.hpp"

namespace defk {

// A coset with finitely many proper subcosets removed.
struct Block {
  PPSet ambient;
  std::vector<PPSet> holes;  // non-empty proper subsets of ambient, deduplicated

  Colour colour() const { return ambient.colour(); }
  bool contains(const Vector& v) const;
  std::string str() const;
};

// Canonicalizes holes (clip to ambient, drop empty/covered/duplicate ones);
// nullopt when the region is provably empty.
std::optional<Block> make_block(const PPSet& ambient, std::vector<PPSet> holes);

// Finite disjoint union of blocks in one ambient power.
struct DefinableSet {
  ModulePtr mod;
  int n = 0;
  std::vector<Block> blocks;  // pairwise disjoint, non-empty

  static DefinableSet empty_set(const ModulePtr& m, int n);
  static DefinableSet full(const ModulePtr& m, int n);
  static DefinableSet of_ppset(const PPSet& p);

  bool is_empty() const { return blocks.empty(); }
  bool contains(const Vector& v) const;
  std::string str() const;
};

// Rewrites any finite block list into a pairwise-disjoint one with the same
// membership, pruning provably empty pieces.
DefinableSet normalize(const ModulePtr& m, int n, const std::vector<Block>& blocks);

DefinableSet ds_union(const DefinableSet& a, const DefinableSet& b);
DefinableSet ds_minus(const DefinableSet& a, const DefinableSet& b);
DefinableSet ds_intersect(const DefinableSet& a, const DefinableSet& b);
DefinableSet ds_product(const DefinableSet& a, const DefinableSet& b);

std::optional<Block> block_intersect(const Block& a, const Block& b);
bool ds_subset(const DefinableSet& a, const DefinableSet& b);
bool ds_equal(const DefinableSet& a, const DefinableSet& b);
DefinableSet ds_embed_zero(const DefinableSet& d, int n2);

// Componentwise maximum of ambient colours; bottom for the empty set.
Colour dim_of(const DefinableSet& d);

// Integer polynomial with exponents in N^k, one monomial X^d per colour d.
struct K0Class {
  int k = 1;
  std::map<std::vector<long>, mpz_class> terms;  // zero coefficients pruned

  static K0Class zero(int k);
  static K0Class monomial(const Colour& c, const mpz_class& coeff = 1);

  K0Class operator+(const K0Class& o) const;
  K0Class operator-(const K0Class& o) const;
  K0Class operator*(const K0Class& o) const;
  bool operator==(const K0Class& o) const { return k == o.k && terms == o.terms; }
  bool operator!=(const K0Class& o) const { return !(*this == o); }

  bool is_zero() const { return terms.empty(); }
  Colour degree() const;  // componentwise max exponent; bottom for 0
  mpz_class eval(const std::vector<mpz_class>& x) const;
  std::string str() const;
};

// Inclusion-exclusion over canonical coset intersections.
K0Class k0_class(const DefinableSet& d);

// Explicit member of the first block.
Vector find_point(const DefinableSet& d);

// Points of a coset over an all-finite module, in basis-index-major order.
std::vector<Vector> enumerate_ppset(const PPSet& p, long long cap);

DefinableSet morita_defset(const DefinableSet& d, int q);

}  // namespace defk

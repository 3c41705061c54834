#pragma once

#include <optional>
#include <string>
#include <vector>

#include "defk/defset.hpp"

namespace defk {

// One affine chart of a piecewise map: x |-> (x - d1) A + d2 on a block
// domain, with the image block kept alongside so partition checks on either
// side stay syntactic.
struct AffinePiece {
  Block dom;
  Vector d1;
  SMat a;  // invertible n x n over S
  Vector d2;
  Block img;  // affine image of dom, maintained eagerly

  Vector apply(const Vector& x) const;
  Vector apply_inverse(const Vector& y) const;
  std::string str() const;
};

// Affine images of pp-sets and blocks under x |-> (x - d1) A + d2.
PPSet affine_image_ppset(const PPSet& p, const Vector& d1, const SMat& a,
                         const Vector& d2);
Block affine_image_block(const Block& b, const Vector& d1, const SMat& a,
                         const Vector& d2);

// Shape-checks, rejects singular A and empty domains, computes the image.
AffinePiece make_piece(const Block& dom, const Vector& d1, const SMat& a,
                       const Vector& d2);

// Definable bijection between two definable sets in one power, given by
// finitely many affine charts whose domains partition the source and whose
// images partition the target.
struct PiecewiseAffineBijection {
  DefinableSet source;
  DefinableSet target;
  std::vector<AffinePiece> pieces;

  Vector apply(const Vector& x) const;          // InvalidMap off the source
  Vector apply_inverse(const Vector& y) const;  // InvalidMap off the target
  std::string str() const;
};

// Shape-checks only; partition defects are reported by validate, not here.
PiecewiseAffineBijection make_bijection(DefinableSet source, DefinableSet target,
                                        std::vector<AffinePiece> pieces);

// All violations as data: overlapping domains/images, uncovered or exceeded
// boundary sets. An empty result certifies a bijection.
std::vector<std::string> validate(const PiecewiseAffineBijection& f);

PiecewiseAffineBijection identity_map(const DefinableSet& d);

// f after g; the charts refine to the common decomposition.
PiecewiseAffineBijection compose(const PiecewiseAffineBijection& f,
                                 const PiecewiseAffineBijection& g);
PiecewiseAffineBijection invert(const PiecewiseAffineBijection& f);

// Image of a subset of the source, as a disjoint block union.
DefinableSet map_image(const PiecewiseAffineBijection& f, const DefinableSet& d);

// Restriction to a subset of the source; the target is the image.
PiecewiseAffineBijection restrict_map(const PiecewiseAffineBijection& f,
                                      const DefinableSet& d);

// Non-fixed locus of an automorphism, as a definable set: per chart the fixed
// set is the pp-solution of x (A - I) = d1 A - d2 inside the domain.
DefinableSet support(const PiecewiseAffineBijection& f);
Colour dim_of_map(const PiecewiseAffineBijection& f);

// Extends an automorphism of E to an automorphism of ambient (E subset of it)
// fixing ambient minus E pointwise; the support does not change.
PiecewiseAffineBijection extend_by_identity(const PiecewiseAffineBijection& f,
                                            const DefinableSet& ambient);

// Reinterprets an automorphism of a subset of M^n as acting on the zero-padded
// copy inside M^{n2}: charts gain identity action on the new coordinates.
PiecewiseAffineBijection embed_map(const PiecewiseAffineBijection& f, int n2);

// Blocked reinterpretation over M(1,R) -> M(q,R); chart matrices carry over
// verbatim as q-blocked flats.
PiecewiseAffineBijection morita_map(const PiecewiseAffineBijection& f, int q);

// A copy of d2 overlapping d1 in dimension >= m+1, with the bijection onto d2
// realizing it. Both inputs are embedded into the larger of the two powers
// first; the result lives there.
struct ChunkResult {
  DefinableSet chunk;
  PiecewiseAffineBijection g;  // chunk -> d2
};
ChunkResult common_chunk(const DefinableSet& d1, const DefinableSet& d2,
                         const Colour& m);

}  // namespace defk

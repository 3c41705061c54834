#include "defk/defmap.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "defk/error.hpp"

namespace defk {

namespace {

SMat smat_inverse(const SMat& a) {
  auto inv = a.invert();
  if (!inv) fail(Err::Singular, "chart matrix is not invertible");
  return *inv;
}

void check_same_power(const DefinableSet& a, const DefinableSet& b, const char* what) {
  if (!same_module(a.mod, b.mod) || a.n != b.n) fail(Err::InvalidMap, what);
}

}  // namespace

Vector AffinePiece::apply(const Vector& x) const { return (x - d1).apply(a) + d2; }

Vector AffinePiece::apply_inverse(const Vector& y) const {
  return (y - d2).apply(smat_inverse(a)) + d1;
}

std::string AffinePiece::str() const {
  return "piece(domain=" + dom.str() + ", d1=" + d1.str() + ", A=" + a.str() +
         ", d2=" + d2.str() + ")";
}

PPSet affine_image_ppset(const PPSet& p, const Vector& d1, const SMat& a,
                         const Vector& d2) {
  if (p.empty) return p;
  require(a.rows == p.n && a.cols == p.n, "chart matrix matches the power");
  std::vector<Mat> gens;
  gens.reserve(p.sub.basis.size());
  for (size_t i = 0; i < p.sub.basis.size(); ++i) gens.push_back(p.sub.basis[i] * a.flat[i]);
  PPSubgroup s = PPSubgroup::span(p.mod, p.n, std::move(gens));
  return PPSet::coset(std::move(s), (p.rep - d1).apply(a) + d2);
}

Block affine_image_block(const Block& b, const Vector& d1, const SMat& a,
                         const Vector& d2) {
  std::vector<PPSet> holes;
  holes.reserve(b.holes.size());
  for (const auto& h : b.holes) holes.push_back(affine_image_ppset(h, d1, a, d2));
  auto img = make_block(affine_image_ppset(b.ambient, d1, a, d2), std::move(holes));
  require(img.has_value(), "invertible charts keep blocks non-empty");
  return *img;
}

AffinePiece make_piece(const Block& dom, const Vector& d1, const SMat& a,
                       const Vector& d2) {
  const ModulePtr& m = dom.ambient.mod;
  int n = dom.ambient.n;
  if (!same_module(m, d1.mod) || !same_module(m, d2.mod))
    fail(Err::InvalidMap, "chart data from different modules");
  if (d1.n != n || d2.n != n || a.rows != n || a.cols != n)
    fail(Err::InvalidMap, "chart shape mismatch");
  if (!same_ring(a.ring, m->ring()))
    fail(Err::InvalidMap, "chart matrix over a different ring");
  if (!a.is_invertible()) fail(Err::InvalidMap, "chart matrix is not invertible");
  auto cdom = make_block(dom.ambient, dom.holes);
  if (!cdom) fail(Err::InvalidMap, "degenerate chart domain");
  Block img = affine_image_block(*cdom, d1, a, d2);
  return AffinePiece{std::move(*cdom), d1, a, d2, std::move(img)};
}

Vector PiecewiseAffineBijection::apply(const Vector& x) const {
  for (const auto& p : pieces)
    if (p.dom.contains(x)) return p.apply(x);
  fail(Err::InvalidMap, "point outside the source");
}

Vector PiecewiseAffineBijection::apply_inverse(const Vector& y) const {
  for (const auto& p : pieces)
    if (p.img.contains(y)) return p.apply_inverse(y);
  fail(Err::InvalidMap, "point outside the target");
}

std::string PiecewiseAffineBijection::str() const {
  std::string s = "map : " + source.str() + " -> " + target.str();
  for (const auto& p : pieces) s += "\n  " + p.str();
  return s;
}

PiecewiseAffineBijection make_bijection(DefinableSet source, DefinableSet target,
                                        std::vector<AffinePiece> pieces) {
  check_same_power(source, target, "source and target in different powers");
  for (const auto& p : pieces)
    if (!same_module(p.dom.ambient.mod, source.mod) || p.dom.ambient.n != source.n)
      fail(Err::InvalidMap, "chart in a different power");
  return PiecewiseAffineBijection{std::move(source), std::move(target), std::move(pieces)};
}

std::vector<std::string> validate(const PiecewiseAffineBijection& f) {
  std::vector<std::string> bad;
  auto tag = [](size_t i) { return std::to_string(i + 1); };
  for (size_t i = 0; i < f.pieces.size(); ++i)
    if (!f.pieces[i].a.is_invertible())
      bad.push_back("chart " + tag(i) + ": matrix not invertible");
  for (size_t i = 0; i < f.pieces.size(); ++i)
    for (size_t j = i + 1; j < f.pieces.size(); ++j) {
      if (block_intersect(f.pieces[i].dom, f.pieces[j].dom))
        bad.push_back("charts " + tag(i) + " and " + tag(j) + " have overlapping domains");
      if (block_intersect(f.pieces[i].img, f.pieces[j].img))
        bad.push_back("charts " + tag(i) + " and " + tag(j) + " have overlapping images");
    }
  std::vector<Block> doms, imgs;
  for (const auto& p : f.pieces) {
    doms.push_back(p.dom);
    imgs.push_back(p.img);
  }
  DefinableSet du = normalize(f.source.mod, f.source.n, doms);
  DefinableSet iu = normalize(f.source.mod, f.source.n, imgs);
  if (!ds_subset(f.source, du)) bad.push_back("chart domains do not cover the source");
  if (!ds_subset(du, f.source)) bad.push_back("chart domains exceed the source");
  if (!ds_subset(f.target, iu)) bad.push_back("chart images do not cover the target");
  if (!ds_subset(iu, f.target)) bad.push_back("chart images exceed the target");
  return bad;
}

PiecewiseAffineBijection identity_map(const DefinableSet& d) {
  Vector z = Vector::zero(d.mod, d.n);
  SMat id = SMat::identity(d.mod->ring(), d.n);
  std::vector<AffinePiece> pieces;
  pieces.reserve(d.blocks.size());
  for (const auto& b : d.blocks) pieces.push_back(make_piece(b, z, id, z));
  return make_bijection(d, d, std::move(pieces));
}

PiecewiseAffineBijection compose(const PiecewiseAffineBijection& f,
                                 const PiecewiseAffineBijection& g) {
  check_same_power(f.source, g.source, "boundary mismatch: maps act on different powers");
  if (!ds_equal(g.target, f.source))
    fail(Err::InvalidMap, "boundary mismatch: inner target differs from outer source");
  std::vector<AffinePiece> pieces;
  for (const auto& pg : g.pieces) {
    SMat gi = smat_inverse(pg.a);
    for (const auto& pf : f.pieces) {
      auto w = block_intersect(pg.img, pf.dom);
      if (!w) continue;
      Block dom = affine_image_block(*w, pg.d2, gi, pg.d1);
      Vector d2 = (pg.d2 - pf.d1).apply(pf.a) + pf.d2;
      pieces.push_back(make_piece(dom, pg.d1, pg.a * pf.a, d2));
    }
  }
  return make_bijection(g.source, f.target, std::move(pieces));
}

PiecewiseAffineBijection invert(const PiecewiseAffineBijection& f) {
  std::vector<AffinePiece> pieces;
  pieces.reserve(f.pieces.size());
  for (const auto& p : f.pieces)
    pieces.push_back(make_piece(p.img, p.d2, smat_inverse(p.a), p.d1));
  return make_bijection(f.target, f.source, std::move(pieces));
}

DefinableSet map_image(const PiecewiseAffineBijection& f, const DefinableSet& d) {
  check_same_power(f.source, d, "set in a different power");
  if (!ds_subset(d, f.source)) fail(Err::InvalidMap, "set outside the source");
  DefinableSet out{d.mod, d.n, {}};
  for (const auto& b : d.blocks)
    for (const auto& p : f.pieces)
      if (auto i = block_intersect(b, p.dom))
        out.blocks.push_back(affine_image_block(*i, p.d1, p.a, p.d2));
  return out;
}

PiecewiseAffineBijection restrict_map(const PiecewiseAffineBijection& f,
                                      const DefinableSet& d) {
  check_same_power(f.source, d, "set in a different power");
  if (!ds_subset(d, f.source)) fail(Err::InvalidMap, "set outside the source");
  std::vector<AffinePiece> pieces;
  for (const auto& b : d.blocks)
    for (const auto& p : f.pieces)
      if (auto i = block_intersect(b, p.dom))
        pieces.push_back(make_piece(*i, p.d1, p.a, p.d2));
  DefinableSet tgt{d.mod, d.n, {}};
  for (const auto& p : pieces) tgt.blocks.push_back(p.img);
  return make_bijection(d, std::move(tgt), std::move(pieces));
}

DefinableSet support(const PiecewiseAffineBijection& f) {
  if (!ds_equal(f.source, f.target)) fail(Err::InvalidMap, "support needs an automorphism");
  const ModulePtr& m = f.source.mod;
  int n = f.source.n;
  SMat id = SMat::identity(m->ring(), n);
  DefinableSet out{m, n, {}};
  for (const auto& p : f.pieces) {
    // fixed points of the chart: x (A - I) = d1 A - d2
    PPSet fixed = pp_solve(m, n, (p.a - id).flat, p.d1.apply(p.a) - p.d2);
    auto holes = p.dom.holes;
    holes.push_back(std::move(fixed));
    if (auto b = make_block(p.dom.ambient, std::move(holes))) out.blocks.push_back(*b);
  }
  return out;
}

Colour dim_of_map(const PiecewiseAffineBijection& f) { return dim_of(support(f)); }

PiecewiseAffineBijection extend_by_identity(const PiecewiseAffineBijection& f,
                                            const DefinableSet& ambient) {
  check_same_power(f.source, ambient, "ambient set in a different power");
  if (!ds_equal(f.source, f.target))
    fail(Err::InvalidMap, "only automorphisms extend by the identity");
  if (!ds_subset(f.source, ambient))
    fail(Err::PreconditionFailed, "the map's carrier is not inside the ambient set");
  Vector z = Vector::zero(ambient.mod, ambient.n);
  SMat id = SMat::identity(ambient.mod->ring(), ambient.n);
  auto pieces = f.pieces;
  for (const auto& b : ds_minus(ambient, f.source).blocks)
    pieces.push_back(make_piece(b, z, id, z));
  return make_bijection(ambient, ambient, std::move(pieces));
}

PiecewiseAffineBijection embed_map(const PiecewiseAffineBijection& f, int n2) {
  int n = f.source.n;
  if (n2 < n) fail(Err::PreconditionFailed, "embedding must not shrink the power");
  if (n2 == n) return f;
  const ModulePtr& m = f.source.mod;
  const RingPtr& ring = m->ring();
  auto extend = [&](const SMat& a) {
    SMat a2;
    a2.ring = ring;
    a2.rows = n2;
    a2.cols = n2;
    for (int i = 0; i < ring->k(); ++i) {
      int extra = (n2 - n) * ring->comp(i).q;
      a2.flat.push_back(block_diag(a.flat[i], Mat::identity(ring->comp(i).div, extra)));
    }
    return a2;
  };
  std::vector<AffinePiece> pieces;
  pieces.reserve(f.pieces.size());
  for (const auto& p : f.pieces) {
    std::vector<PPSet> holes;
    holes.reserve(p.dom.holes.size());
    for (const auto& h : p.dom.holes) holes.push_back(h.embed_zero(n2));
    auto dom = make_block(p.dom.ambient.embed_zero(n2), std::move(holes));
    require(dom.has_value(), "embedding keeps chart domains non-empty");
    pieces.push_back(make_piece(*dom, embed_vector(p.d1, n2), extend(p.a),
                                embed_vector(p.d2, n2)));
  }
  return make_bijection(ds_embed_zero(f.source, n2), ds_embed_zero(f.target, n2),
                        std::move(pieces));
}

PiecewiseAffineBijection morita_map(const PiecewiseAffineBijection& f, int q) {
  DefinableSet src = morita_defset(f.source, q);
  DefinableSet tgt = morita_defset(f.target, q);
  std::vector<AffinePiece> pieces;
  pieces.reserve(f.pieces.size());
  for (const auto& p : f.pieces) {
    std::vector<PPSet> holes;
    holes.reserve(p.dom.holes.size());
    for (const auto& h : p.dom.holes) holes.push_back(morita_ppset(h, q));
    auto dom = make_block(morita_ppset(p.dom.ambient, q), std::move(holes));
    require(dom.has_value(), "blocking keeps chart domains non-empty");
    SMat a2;
    a2.ring = src.mod->ring();
    a2.rows = p.a.rows / q;
    a2.cols = a2.rows;
    a2.flat = p.a.flat;  // the flat over R is the same matrix, reblocked
    pieces.push_back(make_piece(*dom, morita_vector(p.d1, q), a2, morita_vector(p.d2, q)));
  }
  return make_bijection(std::move(src), std::move(tgt), std::move(pieces));
}

namespace {

// One per-component exchange coset pair: c1 sits inside a maximal-dimension
// block of the first set, c2 inside one of the second, and the chart
// x -> (x - d1) A + d2 carries c1 onto c2. Holes are kept in c1 coordinates;
// a collapsed record (c1 == c2) swaps by the identity.
struct ChunkRec {
  PPSet c1, c2;
  bool collapsed = false;
  Vector d1, d2;
  SMat a, ainv;
  std::vector<PPSet> holes;
};

}  // namespace

ChunkResult common_chunk(const DefinableSet& d1in, const DefinableSet& d2in,
                         const Colour& m) {
  require(same_module(d1in.mod, d2in.mod), "one module for both sets");
  const ModulePtr& mod = d1in.mod;
  int k = mod->k();
  if (m.bottom || static_cast<int>(m.dims.size()) != k)
    fail(Err::PreconditionFailed, "overlap colour needs one entry per component");
  std::vector<long> mu(m.dims);
  for (auto& v : mu) v += 1;
  Colour tc = Colour::of(mu);
  int bign = std::max(d1in.n, d2in.n);
  DefinableSet dd1 = ds_embed_zero(d1in, bign);
  DefinableSet dd2 = ds_embed_zero(d2in, bign);
  if (!tc.leq(dim_of(dd1)) || !tc.leq(dim_of(dd2)))
    fail(Err::PreconditionFailed, "the sets are too small for the requested overlap");
  if (tc.leq(dim_of(ds_intersect(dd1, dd2)))) return {dd2, identity_map(dd2)};

  std::vector<ChunkRec> recs;
  for (int i = 0; i < k; ++i) {
    auto host = [&](const DefinableSet& d) -> const Block& {
      const Block* best = nullptr;
      for (const auto& b : d.blocks)
        if (!best || b.colour().dims[i] > best->colour().dims[i]) best = &b;
      return *best;
    };
    const Block& b1 = host(dd1);
    const Block& b2 = host(dd2);
    auto small_coset = [&](const Block& b) {
      std::vector<Mat> gens;
      for (int c = 0; c < k; ++c) {
        const Mat& base = b.ambient.sub.basis[c];
        if (c == i)
          gens.push_back(base.submat(0, 0, static_cast<int>(mu[i]), base.cols));
        else
          gens.push_back(Mat::zero(mod->ring()->comp(c).div, 0, base.cols));
      }
      Vector w = find_point(DefinableSet{mod, bign, {b}});
      return PPSet::coset(PPSubgroup::span(mod, bign, std::move(gens)), w);
    };
    ChunkRec rec;
    rec.c1 = small_coset(b1);
    rec.c2 = small_coset(b2);
    rec.collapsed = rec.c1 == rec.c2;
    if (!rec.collapsed) {
      StandardFrame f1 = pp_iso_standard(rec.c1);
      StandardFrame f2 = pp_iso_standard(rec.c2);
      rec.d1 = f1.d1;
      rec.d2 = f2.d1;
      rec.a = f1.a * smat_inverse(f2.a);
      rec.ainv = smat_inverse(rec.a);
      require(affine_image_ppset(rec.c1, rec.d1, rec.a, rec.d2) == rec.c2,
              "exchange chart carries one coset onto the other");
    }
    auto clip = [&](const PPSet& host_coset, const std::vector<PPSet>& hs, bool pull) {
      for (const auto& h : hs) {
        PPSet x = host_coset.intersect(h);
        if (x.empty) continue;
        rec.holes.push_back(pull && !rec.collapsed
                                ? affine_image_ppset(x, rec.d2, rec.ainv, rec.d1)
                                : std::move(x));
      }
    };
    clip(rec.c1, b1.holes, false);
    clip(rec.c2, b2.holes, true);
    recs.push_back(std::move(rec));
  }

  // Separate the 2k exchange cosets pairwise: an overlap becomes a hole of one
  // of the two (pulled to c1 coordinates), which removes it from both sides of
  // that record's exchange.
  std::vector<std::pair<int, int>> handles;
  for (size_t r = 0; r < recs.size(); ++r) {
    handles.emplace_back(static_cast<int>(r), 1);
    if (!recs[r].collapsed) handles.emplace_back(static_cast<int>(r), 2);
  }
  auto coset_of = [&](const std::pair<int, int>& h) -> const PPSet& {
    return h.second == 1 ? recs[h.first].c1 : recs[h.first].c2;
  };
  for (size_t p = 0; p < handles.size(); ++p)
    for (size_t r = p + 1; r < handles.size(); ++r) {
      PPSet inter = coset_of(handles[p]).intersect(coset_of(handles[r]));
      if (inter.empty) continue;
      ChunkRec& rec = recs[handles[p].first];
      rec.holes.push_back(handles[p].second == 1
                              ? std::move(inter)
                              : affine_image_ppset(inter, rec.d2, rec.ainv, rec.d1));
    }

  Vector z = Vector::zero(mod, bign);
  SMat id = SMat::identity(mod->ring(), bign);
  std::vector<AffinePiece> pieces;
  std::vector<Block> taken;
  for (const auto& rec : recs) {
    auto g1 = make_block(rec.c1, rec.holes);
    if (!g1) fail(Err::PreconditionFailed, "exchange coset collapsed during separation");
    if (rec.collapsed) {
      pieces.push_back(make_piece(*g1, z, id, z));
      taken.push_back(pieces.back().dom);
    } else {
      AffinePiece fwd = make_piece(*g1, rec.d1, rec.a, rec.d2);
      AffinePiece bwd = make_piece(fwd.img, rec.d2, rec.ainv, rec.d1);
      taken.push_back(fwd.dom);
      taken.push_back(bwd.dom);
      pieces.push_back(std::move(fwd));
      pieces.push_back(std::move(bwd));
    }
  }
  for (const auto& b :
       ds_minus(DefinableSet::full(mod, bign), DefinableSet{mod, bign, taken}).blocks)
    pieces.push_back(make_piece(b, z, id, z));
  PiecewiseAffineBijection h = make_bijection(DefinableSet::full(mod, bign),
                                              DefinableSet::full(mod, bign),
                                              std::move(pieces));
  DefinableSet chunk = map_image(h, dd2);
  return {chunk, restrict_map(h, chunk)};
}

}  // namespace defk

#include "defk/k1.hpp"

#include <algorithm>
#include <utility>

#include "defk/error.hpp"

namespace defk {

namespace {

// Accumulators keep the pruning invariant: no stored level row is trivial.
void acc_prune(K1Component& c, long level) {
  auto it = c.levels.find(level);
  if (it != c.levels.end() && it->second.sign == 0 && it->second.det.is_trivial())
    c.levels.erase(it);
}

void acc_det(K1Class& c, int i, long level, const UnitClass& u) {
  auto& comp = c.comps[static_cast<size_t>(i)];
  const DivisionRing* div = c.ring->comp(i).div;
  auto [it, fresh] = comp.levels.try_emplace(level, K1Level{UnitClass::trivial(div), 0});
  it->second.det = it->second.det.combine(u);
  acc_prune(comp, level);
}

void acc_sign(K1Class& c, int i, long level, int s) {
  if (s % 2 == 0) return;
  auto& comp = c.comps[static_cast<size_t>(i)];
  if (level == 0) {
    comp.sign0 ^= 1;
    return;
  }
  const DivisionRing* div = c.ring->comp(i).div;
  auto [it, fresh] = comp.levels.try_emplace(level, K1Level{UnitClass::trivial(div), 0});
  it->second.sign ^= 1;
  acc_prune(comp, level);
}

// Parity of a permutation given as an image table.
int perm_sign(const std::vector<int>& p) {
  std::vector<char> seen(p.size(), 0);
  int parity = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = static_cast<int>(i); !seen[j]; j = p[j]) {
      seen[j] = 1;
      ++len;
    }
    parity ^= (len - 1) & 1;
  }
  return parity;
}

// Cylinder over the component-i projection of a coset: the other components
// are freed, so cylinder equality is equality of the i-th factors.
PPSet comp_cylinder(const PPSet& p, int i) {
  const RingPtr& ring = p.mod->ring();
  PPSubgroup s = p.sub;
  for (int j = 0; j < p.mod->k(); ++j)
    if (j != i)
      s.basis[static_cast<size_t>(j)] =
          Mat::identity(ring->comp(j).div, p.n * ring->comp(j).q);
  return PPSet::coset(std::move(s), p.rep);
}

struct Peeler {
  ModulePtr mod;
  RingPtr ring;
  K1Class acc;

  // Conjugates the top cosets onto pairwise disjoint translates of the
  // standard coset of their colour, in one extra ambient coordinate. The
  // translates sit at distinct nonzero values of the fresh coordinate, so
  // they miss the embedded support and each other; afterwards the top layer
  // is a clean family of parallel cosets.
  static PiecewiseAffineBijection disentangle(const PiecewiseAffineBijection& h,
                                              const std::vector<PPSet>& cosets,
                                              const Colour& d) {
    const ModulePtr& mod = h.source.mod;
    int n = h.source.n;
    int n2 = n + 1;
    DefinableSet full2 = DefinableSet::full(mod, n2);
    PiecewiseAffineBijection lifted = extend_by_identity(embed_map(h, n2), full2);
    PiecewiseAffineBijection conj = identity_map(full2);
    for (size_t l = 0; l < cosets.size(); ++l) {
      PPSet from = cosets[l].embed_zero(n2);
      Vector w = Vector::zero(mod, n2);
      w.entries[static_cast<size_t>(n)] = module_stream(mod, l);
      PPSet to = PPSet::coset(PPSubgroup::standard(mod, n2, d.dims), w);
      StandardFrame fr = pp_iso_standard(from);
      auto ainv = fr.a.invert();
      require(ainv.has_value(), "frame matrices are invertible");
      std::vector<AffinePiece> ps;
      ps.push_back(make_piece(*make_block(from, {}), fr.d1, fr.a, w));
      ps.push_back(make_piece(*make_block(to, {}), w, *ainv, fr.d1));
      DefinableSet rest = ds_minus(
          full2, DefinableSet{mod, n2, {*make_block(from, {}), *make_block(to, {})}});
      Vector z = Vector::zero(mod, n2);
      SMat id = SMat::identity(mod->ring(), n2);
      for (const auto& b : rest.blocks) ps.push_back(make_piece(b, z, id, z));
      conj = compose(make_bijection(full2, full2, std::move(ps)), conj);
    }
    return compose(conj, compose(lifted, invert(conj)));
  }

  // One wreath layer at colour d: read off the coset permutation and the
  // cycle composites, then divide out the whole-coset model map.
  PiecewiseAffineBijection layer(PiecewiseAffineBijection h, const Colour& d,
                                 const std::vector<Block>& top) {
    int n = h.source.n;
    int k = mod->k();
    int m = static_cast<int>(top.size());
    std::vector<PPSet> amb;
    amb.reserve(top.size());
    for (const auto& b : top) amb.push_back(b.ambient);

    // Each top coset has exactly one chart covering its bulk; the image of
    // the coset under that chart is again a member of the layer.
    std::vector<const AffinePiece*> bulk(top.size(), nullptr);
    std::vector<int> sigma(top.size(), -1);
    for (int t = 0; t < m; ++t) {
      for (const auto& p : h.pieces) {
        auto ib = block_intersect(top[static_cast<size_t>(t)], p.dom);
        if (ib.has_value() && ib->colour() == d) {
          require(bulk[static_cast<size_t>(t)] == nullptr,
                  "one chart covers the bulk of a top coset");
          bulk[static_cast<size_t>(t)] = &p;
        }
      }
      require(bulk[static_cast<size_t>(t)] != nullptr,
              "some chart covers the bulk of a top coset");
      const AffinePiece* pc = bulk[static_cast<size_t>(t)];
      PPSet img = affine_image_ppset(amb[static_cast<size_t>(t)], pc->d1, pc->a, pc->d2);
      for (int s = 0; s < m; ++s)
        if (amb[static_cast<size_t>(s)] == img) sigma[static_cast<size_t>(t)] = s;
      require(sigma[static_cast<size_t>(t)] >= 0, "top cosets permute within the layer");
    }

    // Factor the permutation through the component projections.
    std::vector<std::vector<int>> part(static_cast<size_t>(k),
                                       std::vector<int>(top.size()));
    std::vector<std::vector<PPSet>> reps(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      for (int t = 0; t < m; ++t) {
        PPSet cyl = comp_cylinder(amb[static_cast<size_t>(t)], i);
        int id = -1;
        for (size_t r = 0; r < reps[static_cast<size_t>(i)].size(); ++r)
          if (reps[static_cast<size_t>(i)][r] == cyl) id = static_cast<int>(r);
        if (id < 0) {
          id = static_cast<int>(reps[static_cast<size_t>(i)].size());
          reps[static_cast<size_t>(i)].push_back(std::move(cyl));
        }
        part[static_cast<size_t>(i)][static_cast<size_t>(t)] = id;
      }
    }
    std::vector<std::vector<int>> psig(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      auto& pi = psig[static_cast<size_t>(i)];
      pi.assign(reps[static_cast<size_t>(i)].size(), -1);
      for (int t = 0; t < m; ++t) {
        int a = part[static_cast<size_t>(i)][static_cast<size_t>(t)];
        int b = part[static_cast<size_t>(i)][static_cast<size_t>(sigma[static_cast<size_t>(t)])];
        if (pi[static_cast<size_t>(a)] == -1)
          pi[static_cast<size_t>(a)] = b;
        else if (pi[static_cast<size_t>(a)] != b)
          fail(Err::UnsupportedDecomposition,
               "the coset permutation at level " + d.str() +
                   " does not factor through the ring components");
      }
      std::vector<char> hit(pi.size(), 0);
      for (int v : pi) {
        require(v >= 0, "every projection class is moved somewhere");
        if (hit[static_cast<size_t>(v)])
          fail(Err::UnsupportedDecomposition,
               "the coset permutation at level " + d.str() +
                   " does not factor through the ring components");
        hit[static_cast<size_t>(v)] = 1;
      }
    }

    // The factored permutations must reproduce the layer exactly: a product
    // combination they move has to be one of the supported cosets.
    if (k >= 2) {
      unsigned long long total = 1;
      for (int i = 0; i < k; ++i) total *= reps[static_cast<size_t>(i)].size();
      require(total <= 1u << 16, "the layer combination count stays small");
      std::vector<std::vector<int>> occ;
      for (int t = 0; t < m; ++t) {
        std::vector<int> key(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i)
          key[static_cast<size_t>(i)] = part[static_cast<size_t>(i)][static_cast<size_t>(t)];
        occ.push_back(std::move(key));
      }
      std::vector<int> u(static_cast<size_t>(k), 0);
      for (unsigned long long c = 0; c < total; ++c) {
        bool moved = false;
        for (int i = 0; i < k; ++i)
          if (psig[static_cast<size_t>(i)][static_cast<size_t>(u[static_cast<size_t>(i)])] !=
              u[static_cast<size_t>(i)])
            moved = true;
        if (moved && std::find(occ.begin(), occ.end(), u) == occ.end())
          fail(Err::UnsupportedDecomposition,
               "a moved product coset at level " + d.str() + " lies outside the support");
        for (int i = k - 1; i >= 0; --i) {
          auto& ui = u[static_cast<size_t>(i)];
          if (++ui < static_cast<int>(reps[static_cast<size_t>(i)].size())) break;
          ui = 0;
        }
      }
    }

    for (int i = 0; i < k; ++i)
      acc_sign(acc, i, d.dims[static_cast<size_t>(i)], perm_sign(psig[static_cast<size_t>(i)]));

    // Cycle composites, transported to the standard frame of the cycle's
    // least coset; only the block acting on the standard coordinates counts.
    std::vector<char> used(top.size(), 0);
    for (int t0 = 0; t0 < m; ++t0) {
      if (used[static_cast<size_t>(t0)]) continue;
      std::vector<int> cyc;
      for (int j = t0; !used[static_cast<size_t>(j)]; j = sigma[static_cast<size_t>(j)]) {
        used[static_cast<size_t>(j)] = 1;
        cyc.push_back(j);
      }
      size_t base = 0;
      for (size_t j = 1; j < cyc.size(); ++j)
        if (amb[static_cast<size_t>(cyc[j])].cmp(amb[static_cast<size_t>(cyc[base])]) < 0)
          base = j;
      std::rotate(cyc.begin(), cyc.begin() + static_cast<long>(base), cyc.end());
      SMat bc = SMat::identity(ring, n);
      for (int j : cyc) bc = bc * bulk[static_cast<size_t>(j)]->a;
      StandardFrame fr = pp_iso_standard(amb[static_cast<size_t>(cyc[0])]);
      auto fainv = fr.a.invert();
      require(fainv.has_value(), "frame matrices are invertible");
      SMat phi = (*fainv) * bc * fr.a;
      for (int i = 0; i < k; ++i) {
        long di = d.dims[static_cast<size_t>(i)];
        if (di == 0) continue;
        Mat g = phi.flat[static_cast<size_t>(i)].submat(0, 0, static_cast<int>(di),
                                                        static_cast<int>(di));
        auto u = dieudonne_det(g);
        require(u.has_value(), "transported cycle composites are invertible");
        acc_det(acc, i, di, *u);
      }
    }

    // Model map: the bulk charts extended to whole cosets, identity outside.
    std::vector<AffinePiece> ps;
    std::vector<Block> taken;
    for (int t = 0; t < m; ++t) {
      auto blk = make_block(amb[static_cast<size_t>(t)], {});
      require(blk.has_value(), "top cosets are non-empty");
      const AffinePiece* pc = bulk[static_cast<size_t>(t)];
      ps.push_back(make_piece(*blk, pc->d1, pc->a, pc->d2));
      taken.push_back(*blk);
    }
    DefinableSet full = DefinableSet::full(mod, n);
    DefinableSet rest = ds_minus(full, DefinableSet{mod, n, std::move(taken)});
    Vector z = Vector::zero(mod, n);
    SMat id = SMat::identity(ring, n);
    for (const auto& b : rest.blocks) ps.push_back(make_piece(b, z, id, z));
    auto w = make_bijection(full, full, std::move(ps));
    return compose(h, invert(w));
  }

  void run(PiecewiseAffineBijection h) {
    for (int guard = 0;; ++guard) {
      require(guard < 512, "the layer peeling terminates");
      DefinableSet s = support(h);
      if (s.is_empty()) return;

      // lex-greatest maximal ambient colour
      std::vector<Colour> cs;
      for (const auto& b : s.blocks)
        if (std::find(cs.begin(), cs.end(), b.colour()) == cs.end())
          cs.push_back(b.colour());
      Colour d = Colour::bot();
      for (const auto& c : cs) {
        bool maximal = true;
        for (const auto& o : cs)
          if (c.lt(o)) maximal = false;
        if (maximal && (d.bottom || d.lex_cmp(c) < 0)) d = c;
      }

      std::vector<Block> top;
      for (const auto& b : s.blocks)
        if (b.colour() == d) top.push_back(b);
      bool parallel = true;
      for (const auto& b : top)
        if (!(b.ambient.sub == top.front().ambient.sub)) parallel = false;
      if (top.size() >= 2 && !parallel) {
        std::vector<PPSet> cosets;
        for (const auto& b : top) cosets.push_back(b.ambient);
        h = disentangle(h, cosets, d);
        continue;
      }
      h = layer(std::move(h), d, top);
    }
  }
};

}  // namespace

K1Class K1Class::zero(const RingPtr& s) {
  K1Class c;
  c.ring = s;
  c.comps.resize(static_cast<size_t>(s->k()));
  return c;
}

bool K1Class::is_zero() const {
  for (const auto& c : comps)
    if (c.sign0 != 0 || !c.levels.empty()) return false;
  return true;
}

std::string K1Class::str() const {
  if (is_zero()) return "0";
  std::string out;
  for (size_t i = 0; i < comps.size(); ++i) {
    if (!out.empty()) out += "; ";
    out += "component " + std::to_string(i + 1) + ": sign0=" + std::to_string(comps[i].sign0);
    for (const auto& [level, row] : comps[i].levels)
      out += ", level " + std::to_string(level) + ": det=" + row.det.str() +
             ", sign=" + std::to_string(row.sign);
  }
  return out;
}

K1Class k1_add(const K1Class& a, const K1Class& b) {
  if (!same_ring(a.ring, b.ring))
    fail(Err::DescriptorMismatch, "k1 classes live over different rings");
  K1Class c = a;
  for (int i = 0; i < a.ring->k(); ++i) {
    const auto& src = b.comps[static_cast<size_t>(i)];
    if (src.sign0) c.comps[static_cast<size_t>(i)].sign0 ^= 1;
    for (const auto& [level, row] : src.levels) {
      acc_det(c, i, level, row.det);
      acc_sign(c, i, level, row.sign);
    }
  }
  return c;
}

bool k1_eq(const K1Class& a, const K1Class& b) {
  if (!same_ring(a.ring, b.ring))
    fail(Err::DescriptorMismatch, "k1 classes live over different rings");
  for (size_t i = 0; i < a.comps.size(); ++i) {
    const auto& x = a.comps[i];
    const auto& y = b.comps[i];
    if (x.sign0 != y.sign0) return false;
    if (x.levels.size() != y.levels.size()) return false;
    for (auto ix = x.levels.begin(), iy = y.levels.begin(); ix != x.levels.end(); ++ix, ++iy)
      if (ix->first != iy->first || ix->second.sign != iy->second.sign ||
          ix->second.det != iy->second.det)
        return false;
  }
  return true;
}

K1Class k1_invariant(const PiecewiseAffineBijection& f) {
  auto viol = validate(f);
  if (!viol.empty()) fail(Err::InvalidMap, "invalid map: " + viol.front());
  if (!ds_equal(f.source, f.target))
    fail(Err::InvalidMap, "k1 needs an automorphism: source and target differ");
  const ModulePtr& mod = f.source.mod;
  const RingPtr& ring = mod->ring();
  if (!mod->all_infinite())
    fail(Err::UnsupportedRing, "k1 needs every component module infinite");
  for (int i = 0; i < ring->k(); ++i)
    if (ring->comp(i).div == finite_field(2) && ring->comp(i).q == 1)
      fail(Err::UnsupportedRing, "rank one over GF(2) is outside the recipe");

  int n = f.source.n;
  DefinableSet full = DefinableSet::full(mod, n);
  PiecewiseAffineBijection g0 = extend_by_identity(f, full);

  Peeler pl{mod, ring, K1Class::zero(ring)};

  // The unique full-size chart carries the global affine part; its
  // translation drops out, its matrix lands at the top level per component.
  Colour fullc = PPSubgroup::full(mod, n).colour();
  const AffinePiece* top = nullptr;
  for (const auto& p : g0.pieces)
    if (p.dom.colour() == fullc) {
      require(top == nullptr, "full-size charts cannot be disjoint");
      top = &p;
    }
  require(top != nullptr, "a partition of the ambient power has a full-size part");
  for (int i = 0; i < ring->k(); ++i) {
    auto u = dieudonne_det(top->a.flat[static_cast<size_t>(i)]);
    require(u.has_value(), "chart matrices are invertible");
    acc_det(pl.acc, i, static_cast<long>(n) * ring->comp(i).q, *u);
  }
  auto glob = make_bijection(
      full, full,
      {make_piece(*make_block(PPSet::full(mod, n), {}), top->d1, top->a, top->d2)});
  pl.run(compose(g0, invert(glob)));
  return std::move(pl.acc);
}

K1Class k1_of_gl(const SMat& a) {
  require(a.rows == a.cols, "square matrix");
  K1Class c = K1Class::zero(a.ring);
  for (int i = 0; i < a.ring->k(); ++i) {
    auto u = dieudonne_det(a.flat[static_cast<size_t>(i)]);
    if (!u.has_value()) fail(Err::Singular, "a singular matrix has no k1 class");
    acc_det(c, i, static_cast<long>(a.rows) * a.ring->comp(i).q, *u);
  }
  return c;
}

GroupDescriptor GroupDescriptor::trivial() { return {}; }

GroupDescriptor GroupDescriptor::cyclic(const mpz_class& m) {
  require(m >= 1, "cyclic groups have positive order");
  if (m == 1) return trivial();
  GroupDescriptor g;
  g.kind = Kind::Cyclic;
  g.order = m;
  return g;
}

GroupDescriptor GroupDescriptor::integers() {
  GroupDescriptor g;
  g.kind = Kind::Integers;
  return g;
}

GroupDescriptor GroupDescriptor::countable_sum(GroupDescriptor g) {
  if (g.kind == Kind::Trivial) return trivial();
  GroupDescriptor s;
  s.kind = Kind::CountableSum;
  s.parts.push_back(std::move(g));
  return s;
}

GroupDescriptor GroupDescriptor::direct_sum(std::vector<GroupDescriptor> parts) {
  std::vector<GroupDescriptor> flat;
  for (auto& p : parts) {
    if (p.kind == Kind::Trivial) continue;
    if (p.kind == Kind::DirectSum)
      for (auto& q : p.parts) flat.push_back(std::move(q));
    else
      flat.push_back(std::move(p));
  }
  if (flat.empty()) return trivial();
  if (flat.size() == 1) return std::move(flat.front());
  GroupDescriptor g;
  g.kind = Kind::DirectSum;
  g.parts = std::move(flat);
  return g;
}

GroupDescriptor GroupDescriptor::finite_product(std::vector<GroupDescriptor> parts) {
  return direct_sum(std::move(parts));
}

GroupDescriptor GroupDescriptor::unit_group_ab(const DivisionRing* r) {
  if (r->finite()) {
    mpz_class card = 1;
    for (int j = 0; j < r->e; ++j) card *= static_cast<long>(r->p);
    return cyclic(card - 1);
  }
  if (r->kind == DivisionRing::Kind::Rationals)
    return direct_sum({cyclic(2), countable_sum(integers())});
  // quaternions: the abelianization is the positive rationals under the
  // reduced norm, free on the primes
  return countable_sum(integers());
}

bool GroupDescriptor::operator==(const GroupDescriptor& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::Cyclic && order != o.order) return false;
  if (parts.size() != o.parts.size()) return false;
  for (size_t i = 0; i < parts.size(); ++i)
    if (!(parts[i] == o.parts[i])) return false;
  return true;
}

std::string GroupDescriptor::str() const {
  switch (kind) {
    case Kind::Trivial:
      return "0";
    case Kind::Cyclic:
      // order-2 summands render as Z2, larger cyclic groups as C_n
      return order == 2 ? "Z2" : "C" + order.get_str();
    case Kind::Integers:
      return "Z";
    case Kind::CountableSum:
      return "sum_i (" + parts.front().str() + ")";
    case Kind::DirectSum: {
      std::string out;
      for (const auto& p : parts) {
        if (!out.empty()) out += " + ";
        out += p.str();
      }
      return out;
    }
  }
  return "0";
}

GroupDescriptor expected_k1_group(const RingPtr& ring, const ModulePtr& mod) {
  require(same_ring(ring, mod->ring()), "module over the given ring");
  if (mod->is_finite()) return GroupDescriptor::cyclic(2);
  if (!mod->all_infinite())
    fail(Err::UnsupportedRing, "mixed finite and infinite components have no closed formula");
  std::vector<GroupDescriptor> comps;
  for (int i = 0; i < ring->k(); ++i) {
    const auto& rc = ring->comp(i);
    if (rc.div == finite_field(2) && rc.q == 1)
      fail(Err::UnsupportedRing, "rank one over GF(2) is outside the recipe");
    std::vector<GroupDescriptor> parts;
    parts.push_back(GroupDescriptor::cyclic(2));
    if (rc.div == finite_field(2)) {
      // GL_m(GF(2)) abelianizes to C2 at m = 2 and is perfect for m >= 3,
      // so only a q = 2 component keeps a determinant term, at its first
      // level; every level keeps its permutation sign.
      if (rc.q == 2) {
        parts.push_back(GroupDescriptor::cyclic(2));
        parts.push_back(GroupDescriptor::cyclic(2));
      }
      parts.push_back(GroupDescriptor::countable_sum(GroupDescriptor::cyclic(2)));
    } else {
      parts.push_back(GroupDescriptor::countable_sum(GroupDescriptor::direct_sum(
          {GroupDescriptor::unit_group_ab(rc.div), GroupDescriptor::cyclic(2)})));
    }
    comps.push_back(GroupDescriptor::direct_sum(std::move(parts)));
  }
  return GroupDescriptor::finite_product(std::move(comps));
}

ChunkResult transport_automorphism_group(const DefinableSet& d1, const DefinableSet& d2,
                                         const Colour& m) {
  return common_chunk(d1, d2, m);
}

}  // namespace defk

#include "defk/defset.hpp"

#include <algorithm>
#include <sstream>

namespace defk {

namespace {

// all component modules finite as sets
bool all_finite(const ModulePtr& m) {
  for (int i = 0; i < m->k(); ++i)
    if (m->component_infinite(i)) return false;
  return true;
}

// Appends blocks covering P minus (R.ambient minus R.holes), pairwise disjoint
// and disjoint from R.
void subtract_block_into(const Block& p, const Block& r, std::vector<Block>& out) {
  PPSet inter = p.ambient.intersect(r.ambient);
  if (inter.empty) {
    out.push_back(p);
    return;
  }
  std::vector<PPSet> outsideHoles = p.holes;
  outsideHoles.push_back(inter);
  if (auto outside = make_block(p.ambient, std::move(outsideHoles))) out.push_back(*outside);
  // what survives inside r's ambient sits inside r's holes
  std::vector<PPSet> prev;
  for (const auto& h : r.holes) {
    PPSet q = inter.intersect(h);
    if (q.empty) continue;
    std::vector<PPSet> qHoles = p.holes;
    qHoles.insert(qHoles.end(), prev.begin(), prev.end());
    if (auto piece = make_block(q, std::move(qHoles))) out.push_back(*piece);
    prev.push_back(q);
  }
}

size_t count_violations(const Vector& x, const std::vector<PPSet>& holes) {
  size_t c = 0;
  for (const auto& h : holes)
    if (h.contains(x)) ++c;
  return c;
}

}  // namespace

bool Block::contains(const Vector& v) const {
  if (!ambient.contains(v)) return false;
  for (const auto& h : holes)
    if (h.contains(v)) return false;
  return true;
}

std::string Block::str() const {
  if (holes.empty()) return "block(" + ambient.str() + ")";
  std::string s = "block(" + ambient.str() + ", holes=[";
  for (size_t i = 0; i < holes.size(); ++i) {
    if (i) s += ", ";
    s += holes[i].str();
  }
  return s + "])";
}

std::optional<Block> make_block(const PPSet& ambient, std::vector<PPSet> holes) {
  if (ambient.empty) return std::nullopt;
  std::vector<PPSet> clipped;
  for (const auto& h : holes) {
    PPSet c = ambient.intersect(h);
    if (c.empty) continue;
    if (ambient.subset_of(c)) return std::nullopt;  // hole swallows the ambient
    clipped.push_back(std::move(c));
  }
  std::sort(clipped.begin(), clipped.end(),
            [](const PPSet& a, const PPSet& b) { return a.cmp(b) < 0; });
  clipped.erase(std::unique(clipped.begin(), clipped.end()), clipped.end());
  // keep maximal holes only (duplicates are already gone)
  std::vector<PPSet> kept;
  for (size_t i = 0; i < clipped.size(); ++i) {
    bool redundant = false;
    for (size_t j = 0; j < clipped.size() && !redundant; ++j)
      if (i != j && clipped[i].subset_of(clipped[j])) redundant = true;
    if (!redundant) kept.push_back(clipped[i]);
  }
  Block b{ambient, std::move(kept)};
  if (!b.holes.empty() && all_finite(ambient.mod)) {
    // proper holes can jointly cover a finite coset; decide by enumeration
    bool found = false;
    for (const auto& x : enumerate_ppset(ambient, 1LL << 20))
      if (b.contains(x)) {
        found = true;
        break;
      }
    if (!found) return std::nullopt;
  }
  return b;
}

DefinableSet DefinableSet::empty_set(const ModulePtr& m, int n) { return DefinableSet{m, n, {}}; }

DefinableSet DefinableSet::full(const ModulePtr& m, int n) {
  return of_ppset(PPSet::full(m, n));
}

DefinableSet DefinableSet::of_ppset(const PPSet& p) {
  DefinableSet d{p.mod, p.n, {}};
  if (!p.empty) d.blocks.push_back(Block{p, {}});
  return d;
}

bool DefinableSet::contains(const Vector& v) const {
  for (const auto& b : blocks)
    if (b.contains(v)) return true;
  return false;
}

std::string DefinableSet::str() const {
  if (blocks.empty()) return "empty";
  std::string s = "union(";
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (i) s += ", ";
    s += blocks[i].str();
  }
  return s + ")";
}

DefinableSet normalize(const ModulePtr& m, int n, const std::vector<Block>& blocks) {
  DefinableSet out{m, n, {}};
  for (const auto& b : blocks) {
    require(same_module(b.ambient.mod, m) && b.ambient.n == n, "block from a different power");
    auto cb = make_block(b.ambient, b.holes);
    if (!cb) continue;
    std::vector<Block> pieces{*cb};
    for (const auto& r : out.blocks) {
      std::vector<Block> next;
      for (const auto& p : pieces) subtract_block_into(p, r, next);
      pieces = std::move(next);
    }
    out.blocks.insert(out.blocks.end(), pieces.begin(), pieces.end());
  }
  return out;
}

DefinableSet ds_union(const DefinableSet& a, const DefinableSet& b) {
  require(same_module(a.mod, b.mod) && a.n == b.n, "union across powers");
  std::vector<Block> all = a.blocks;
  all.insert(all.end(), b.blocks.begin(), b.blocks.end());
  return normalize(a.mod, a.n, all);
}

DefinableSet ds_minus(const DefinableSet& a, const DefinableSet& b) {
  require(same_module(a.mod, b.mod) && a.n == b.n, "difference across powers");
  DefinableSet out{a.mod, a.n, {}};
  for (const auto& p0 : a.blocks) {
    std::vector<Block> pieces{p0};
    for (const auto& r : b.blocks) {
      std::vector<Block> next;
      for (const auto& p : pieces) subtract_block_into(p, r, next);
      pieces = std::move(next);
    }
    out.blocks.insert(out.blocks.end(), pieces.begin(), pieces.end());
  }
  return out;
}

std::optional<Block> block_intersect(const Block& a, const Block& b) {
  PPSet amb = a.ambient.intersect(b.ambient);
  if (amb.empty) return std::nullopt;
  std::vector<PPSet> holes = a.holes;
  holes.insert(holes.end(), b.holes.begin(), b.holes.end());
  return make_block(amb, std::move(holes));
}

DefinableSet ds_intersect(const DefinableSet& a, const DefinableSet& b) {
  require(same_module(a.mod, b.mod) && a.n == b.n, "intersection across powers");
  DefinableSet out{a.mod, a.n, {}};
  for (const auto& p : a.blocks)
    for (const auto& r : b.blocks)
      if (auto piece = block_intersect(p, r)) out.blocks.push_back(*piece);
  return out;
}

bool ds_subset(const DefinableSet& a, const DefinableSet& b) {
  return ds_minus(a, b).is_empty();
}

bool ds_equal(const DefinableSet& a, const DefinableSet& b) {
  return ds_subset(a, b) && ds_subset(b, a);
}

DefinableSet ds_embed_zero(const DefinableSet& d, int n2) {
  require(n2 >= d.n, "embedding must not shrink the power");
  DefinableSet out{d.mod, n2, {}};
  for (const auto& b : d.blocks) {
    std::vector<PPSet> holes;
    holes.reserve(b.holes.size());
    for (const auto& h : b.holes) holes.push_back(h.embed_zero(n2));
    auto eb = make_block(b.ambient.embed_zero(n2), std::move(holes));
    require(eb.has_value(), "embedding kept each block non-empty");
    out.blocks.push_back(*eb);
  }
  return out;
}

DefinableSet ds_product(const DefinableSet& a, const DefinableSet& b) {
  require(same_module(a.mod, b.mod), "product across modules");
  DefinableSet out{a.mod, a.n + b.n, {}};
  for (const auto& p : a.blocks)
    for (const auto& r : b.blocks) {
      std::vector<PPSet> holes;
      for (const auto& h : p.holes) holes.push_back(h.product(r.ambient));
      for (const auto& h : r.holes) holes.push_back(p.ambient.product(h));
      auto piece = make_block(p.ambient.product(r.ambient), std::move(holes));
      require(piece.has_value(), "product of non-empty blocks is non-empty");
      out.blocks.push_back(*piece);
    }
  return out;
}

Colour dim_of(const DefinableSet& d) {
  if (d.blocks.empty()) return Colour::bot();
  std::vector<long> dims(d.mod->k(), 0);
  for (const auto& b : d.blocks) {
    Colour c = b.colour();
    for (int i = 0; i < d.mod->k(); ++i) dims[i] = std::max(dims[i], c.dims[i]);
  }
  return Colour::of(std::move(dims));
}

K0Class K0Class::zero(int k) { return K0Class{k, {}}; }

K0Class K0Class::monomial(const Colour& c, const mpz_class& coeff) {
  if (c.bottom || coeff == 0) return zero(c.bottom ? 1 : static_cast<int>(c.dims.size()));
  K0Class out{static_cast<int>(c.dims.size()), {}};
  out.terms[c.dims] = coeff;
  return out;
}

K0Class K0Class::operator+(const K0Class& o) const {
  require(k == o.k, "K0 classes over different component counts");
  K0Class out = *this;
  for (const auto& [e, c] : o.terms) {
    mpz_class s = out.terms.count(e) ? out.terms[e] + c : c;
    if (s == 0)
      out.terms.erase(e);
    else
      out.terms[e] = s;
  }
  return out;
}

K0Class K0Class::operator-(const K0Class& o) const {
  K0Class neg = o;
  for (auto& [e, c] : neg.terms) c = -c;
  return *this + neg;
}

K0Class K0Class::operator*(const K0Class& o) const {
  require(k == o.k, "K0 classes over different component counts");
  K0Class out = zero(k);
  for (const auto& [e1, c1] : terms)
    for (const auto& [e2, c2] : o.terms) {
      std::vector<long> e(k);
      for (int i = 0; i < k; ++i) e[i] = e1[i] + e2[i];
      mpz_class s = (out.terms.count(e) ? out.terms[e] : mpz_class(0)) + c1 * c2;
      if (s == 0)
        out.terms.erase(e);
      else
        out.terms[e] = s;
    }
  return out;
}

Colour K0Class::degree() const {
  if (terms.empty()) return Colour::bot();
  std::vector<long> d(k, 0);
  for (const auto& [e, c] : terms)
    for (int i = 0; i < k; ++i) d[i] = std::max(d[i], e[i]);
  return Colour::of(std::move(d));
}

mpz_class K0Class::eval(const std::vector<mpz_class>& x) const {
  require(static_cast<int>(x.size()) == k, "one value per component");
  mpz_class total = 0;
  for (const auto& [e, c] : terms) {
    mpz_class t = c;
    for (int i = 0; i < k; ++i) {
      mpz_class p;
      mpz_pow_ui(p.get_mpz_t(), x[i].get_mpz_t(), static_cast<unsigned long>(e[i]));
      t *= p;
    }
    total += t;
  }
  return total;
}

std::string K0Class::str() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    mpz_class c = it->second;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    mpz_class a = abs(c);
    bool constant = true;
    for (long e : it->first) constant = constant && e == 0;
    if (constant) {
      os << a.get_str();
    } else {
      if (a != 1) os << a.get_str() << "*";
      os << "X^" << Colour::of(it->first).str();
    }
  }
  return os.str();
}

namespace {

void k0_rec(const PPSet& cur, const std::vector<PPSet>& holes, size_t from, int parity,
            K0Class& out) {
  out = out + K0Class::monomial(cur.colour(), parity);
  for (size_t j = from; j < holes.size(); ++j) {
    PPSet next = cur.intersect(holes[j]);
    if (next.empty) continue;
    k0_rec(next, holes, j + 1, -parity, out);
  }
}

}  // namespace

K0Class k0_class(const DefinableSet& d) {
  for (int i = 0; i < d.mod->k(); ++i)
    if (!d.mod->component_infinite(i))
      fail(Err::UnsupportedRing, "K0 classes need every component module infinite");
  K0Class out = K0Class::zero(d.mod->k());
  for (const auto& b : d.blocks) {
    if (b.holes.size() > 20) fail(Err::SizeBound, "too many holes for inclusion-exclusion");
    k0_rec(b.ambient, b.holes, 0, 1, out);
  }
  return out;
}

std::vector<Vector> enumerate_ppset(const PPSet& p, long long cap) {
  if (p.empty) return {};
  const ModulePtr& m = p.mod;
  struct Digit {
    int comp;
    long idx;
    int srow;
    long long radix;
  };
  std::vector<Digit> digits;
  long long total = 1;
  for (int i = 0; i < m->k(); ++i) {
    if (m->component_infinite(i))
      fail(Err::SizeBound, "cannot enumerate an infinite component module");
    long long card = m->ring()->comp(i).div->cardinality();
    for (long t = 0; t < m->rank(i); ++t)
      for (int r = 0; r < p.sub.basis[i].rows; ++r) {
        digits.push_back(Digit{i, t, r, card});
        total *= card;
        if (total > cap) fail(Err::SizeBound, "coset too large to enumerate");
      }
  }
  std::vector<Vector> out;
  std::vector<long long> c(digits.size(), 0);
  while (true) {
    Vector x = p.rep;
    for (size_t d = 0; d < digits.size(); ++d) {
      if (c[d] == 0) continue;
      const Digit& dg = digits[d];
      Scalar lam = scalar_at(m->ring()->comp(dg.comp).div, static_cast<unsigned long long>(c[d]));
      Mat add = scalar_mul(lam, p.sub.basis[dg.comp].row(dg.srow));
      x.set_slice(dg.comp, dg.idx, x.slice(dg.comp, dg.idx) + add);
    }
    out.push_back(std::move(x));
    size_t d = digits.size();
    while (d > 0 && ++c[d - 1] == digits[d - 1].radix) c[--d] = 0;
    if (d == 0) break;
  }
  return out;
}

Vector find_point(const DefinableSet& d) {
  if (d.blocks.empty()) fail(Err::EmptySet, "no point in the empty set");
  const Block& b = d.blocks.front();
  const ModulePtr& m = d.mod;

  if (all_finite(m)) {
    for (const auto& x : enumerate_ppset(b.ambient, 1LL << 20))
      if (b.contains(x)) return x;
    fail(Err::EmptySet, "no point in the block");
  }

  Vector x = b.ambient.rep;
  long fresh = x.max_index();
  for (const auto& h : b.holes) fresh = std::max(fresh, h.rep.max_index());
  ++fresh;

  size_t violations = count_violations(x, b.holes);
  size_t guard = b.holes.size() + 2;
  while (violations > 0 && guard-- > 0) {
    const PPSet* hole = nullptr;
    for (const auto& h : b.holes)
      if (h.contains(x)) {
        hole = &h;
        break;
      }
    // pick a direction inside the ambient subgroup that exits this hole,
    // preferring a component where escape room is infinite
    int comp = -1;
    int urow = -1;
    for (int pass = 0; pass < 2 && comp < 0; ++pass)
      for (int i = 0; i < m->k() && comp < 0; ++i) {
        if (pass == 0 && !m->component_infinite(i)) continue;
        for (int r = 0; r < b.ambient.sub.basis[i].rows; ++r)
          if (!row_space_contains(hole->sub.basis[i], b.ambient.sub.basis[i].row(r))) {
            comp = i;
            urow = r;
            break;
          }
      }
    require(comp >= 0, "a proper subcoset must drop dimension somewhere");

    bool moved = false;
    if (m->rank(comp) == kOmega) {
      Vector step = Vector::zero(m, d.n);
      step.set_slice(comp, fresh++, b.ambient.sub.basis[comp].row(urow));
      Vector x2 = x + step;
      size_t v2 = count_violations(x2, b.holes);
      require(v2 < violations, "a fresh coordinate must escape the hole");
      x = std::move(x2);
      violations = v2;
      moved = true;
    } else {
      const DivisionRing* div = m->ring()->comp(comp).div;
      unsigned long long lamLimit =
          div->finite() ? static_cast<unsigned long long>(div->cardinality())
                        : b.holes.size() + 2;
      for (long t = 0; t < m->rank(comp) && !moved; ++t)
        for (int r = 0; r < b.ambient.sub.basis[comp].rows && !moved; ++r) {
          if (row_space_contains(hole->sub.basis[comp], b.ambient.sub.basis[comp].row(r)))
            continue;
          for (unsigned long long li = 1; li < 1 + lamLimit && !moved; ++li) {
            Scalar lam = scalar_at(div, li);
            if (lam.is_zero()) continue;
            Vector step = Vector::zero(m, d.n);
            step.set_slice(comp, t, scalar_mul(lam, b.ambient.sub.basis[comp].row(r)));
            Vector x2 = x + step;
            size_t v2 = count_violations(x2, b.holes);
            if (v2 < violations) {
              x = std::move(x2);
              violations = v2;
              moved = true;
            }
          }
        }
      if (!moved) fail(Err::SizeBound, "point search exhausted in a finite component");
    }
    require(moved, "escape move must exist");
  }
  require(violations == 0, "hole escape must terminate");
  return x;
}

DefinableSet morita_defset(const DefinableSet& d, int q) {
  if (d.n % q != 0) fail(Err::PreconditionFailed, "dimension not expressible in the target shape");
  DefinableSet out{morita_module(d.mod, q), d.n / q, {}};
  for (const auto& b : d.blocks) {
    Block nb{morita_ppset(b.ambient, q), {}};
    for (const auto& h : b.holes) nb.holes.push_back(morita_ppset(h, q));
    out.blocks.push_back(std::move(nb));
  }
  return out;
}

}  // namespace defk

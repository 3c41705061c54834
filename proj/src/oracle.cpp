#include "defk/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>

namespace defk {

namespace {

using Perm = std::vector<unsigned char>;

Perm pid(int n) {
  Perm p(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = static_cast<unsigned char>(i);
  return p;
}

// apply b first, then a
Perm pmul(const Perm& a, const Perm& b) {
  Perm c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[b[i]];
  return c;
}

Perm pinv(const Perm& a) {
  Perm c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[a[i]] = static_cast<unsigned char>(i);
  return c;
}

// BFS closure of the generated subgroup
std::set<Perm> span_group(int n, const std::vector<Perm>& gens) {
  std::set<Perm> grp{pid(n)};
  std::vector<Perm> frontier{pid(n)};
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (const auto& g : frontier)
      for (const auto& s : gens) {
        Perm h = pmul(g, s);
        if (grp.insert(h).second) next.push_back(std::move(h));
      }
    frontier = std::move(next);
  }
  return grp;
}

// Abelianization of Sym(n) from first principles: close the commutators of
// the transposition generators into a subgroup, conjugate until normal, and
// read off the quotient. The quotient is cyclic because all transpositions
// land in one class.
BruteStage sym_ab(int n) {
  std::vector<Perm> gens;
  for (int i = 0; i + 1 < n; ++i) {
    Perm t = pid(n);
    std::swap(t[static_cast<size_t>(i)], t[static_cast<size_t>(i) + 1]);
    gens.push_back(std::move(t));
  }
  std::set<Perm> seeds;
  for (const auto& s : gens)
    for (const auto& t : gens) {
      Perm c = pmul(pmul(pinv(s), pinv(t)), pmul(s, t));
      if (c != pid(n)) seeds.insert(std::move(c));
    }
  std::vector<Perm> sg(seeds.begin(), seeds.end());
  std::set<Perm> h = span_group(n, sg);
  for (;;) {
    std::vector<Perm> extra;
    for (const auto& g : gens) {
      for (const auto& x : h) {
        Perm c = pmul(pmul(pinv(g), x), g);
        if (!h.count(c)) extra.push_back(std::move(c));
      }
      if (!extra.empty()) break;
    }
    if (extra.empty()) break;
    for (auto& e : extra) sg.push_back(std::move(e));
    h = span_group(n, sg);
  }
  unsigned long order = 1;
  for (int i = 2; i <= n; ++i) order *= static_cast<unsigned long>(i);
  BruteStage st;
  st.set_size = n;
  st.group_order = order;
  st.commutator_order = static_cast<unsigned long>(h.size());
  st.ab = GroupDescriptor::cyclic(static_cast<long>(order / h.size()));
  return st;
}

}  // namespace

FiniteStructure FiniteStructure::make(const ModulePtr& m) {
  if (!m->is_finite()) fail(Err::SizeBound, "the carrier must be a finite module");
  FiniteStructure s;
  s.mod = m;
  s.carrier = enumerate_module(m, 64);
  if (s.carrier.size() < 2)
    fail(Err::PreconditionFailed, "a finite structure needs at least two elements");
  return s;
}

std::string BruteK1Report::str() const {
  std::string out = "chain:";
  for (const auto& st : stages)
    out += " |E|=" + std::to_string(st.set_size) + " -> " + st.ab.str() + ";";
  out += stabilized ? " stabilized at " : " not stabilized, last stage ";
  out += value.str();
  return out;
}

BruteK1Report brute_k1_finite(const FiniteStructure& s, int max_power) {
  long c = s.size();
  if (c < 2 || c > 4) fail(Err::SizeBound, "carrier size must be between 2 and 4");
  if (max_power < 1 || max_power > 2) fail(Err::SizeBound, "max power must be 1 or 2");
  long top = 1;
  for (int i = 0; i < max_power; ++i) top *= c;
  if (top > 9) fail(Err::SizeBound, "size bound exceeded: |carrier|^power > 9");
  BruteK1Report r;
  for (long n = 2; n <= top; ++n) r.stages.push_back(sym_ab(static_cast<int>(n)));
  r.stabilized = r.stages.size() >= 2 &&
                 r.stages[r.stages.size() - 1].ab == r.stages[r.stages.size() - 2].ab;
  r.value = r.stages.back().ab;
  return r;
}

std::vector<Vector> enumerate_set(const DefinableSet& d, long long cap) {
  std::vector<Vector> out;
  if (d.mod->is_finite()) {
    for (const auto& b : d.blocks)
      for (auto& v : enumerate_ppset(b.ambient, cap)) {
        if (!b.contains(v)) continue;
        out.push_back(std::move(v));
        if (static_cast<long long>(out.size()) > cap)
          fail(Err::SizeBound, "instance too large");
      }
    return out;
  }
  for (const auto& b : d.blocks) {
    Colour c = b.colour();
    bool zero = !c.bottom &&
                std::all_of(c.dims.begin(), c.dims.end(), [](long x) { return x == 0; });
    if (!zero)
      fail(Err::SizeBound, "instance too large: a positive-dimensional block over an "
                           "infinite module cannot be enumerated");
    out.push_back(b.ambient.rep);  // a point has no proper holes
  }
  return out;
}

std::vector<long> enumerate_perm(const PiecewiseAffineBijection& f, long long cap) {
  if (!ds_equal(f.source, f.target))
    fail(Err::InvalidMap, "only an automorphism induces a permutation: source and "
                          "target differ");
  std::vector<Vector> pts = enumerate_set(f.source, cap);
  std::vector<long> order(pts.size());
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    return pts[static_cast<size_t>(a)].cmp(pts[static_cast<size_t>(b)]) < 0;
  });
  auto locate = [&](const Vector& v) -> long {
    long lo = 0, hi = static_cast<long>(pts.size());
    while (lo < hi) {
      long mid = lo + (hi - lo) / 2;
      int c = pts[static_cast<size_t>(order[static_cast<size_t>(mid)])].cmp(v);
      if (c == 0) return order[static_cast<size_t>(mid)];
      if (c < 0)
        lo = mid + 1;
      else
        hi = mid;
    }
    return -1;
  };
  std::vector<long> perm(pts.size(), -1);
  std::vector<char> hit(pts.size(), 0);
  for (size_t i = 0; i < pts.size(); ++i) {
    long j = locate(f.apply(pts[i]));
    if (j < 0) fail(Err::InvalidMap, "an image point escapes the target");
    if (hit[static_cast<size_t>(j)])
      fail(Err::InvalidMap, "two points share an image");
    hit[static_cast<size_t>(j)] = 1;
    perm[i] = j;
  }
  return perm;
}

int permutation_parity(const std::vector<long>& perm) {
  std::vector<char> seen(perm.size(), 0);
  int parity = 0;
  for (size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    long len = 0;
    for (long j = static_cast<long>(i); !seen[static_cast<size_t>(j)];
         j = perm[static_cast<size_t>(j)]) {
      seen[static_cast<size_t>(j)] = 1;
      ++len;
    }
    parity ^= static_cast<int>((len - 1) & 1);
  }
  return parity;
}

AgreementReport check_support(const PiecewiseAffineBijection& f) {
  std::vector<Vector> pts = enumerate_set(f.source);
  std::vector<Vector> moved;
  for (auto& v : pts)
    if (f.apply(v) != v) moved.push_back(std::move(v));
  std::vector<Vector> sym = enumerate_set(support(f));
  auto lt = [](const Vector& a, const Vector& b) { return a.cmp(b) < 0; };
  std::sort(moved.begin(), moved.end(), lt);
  std::sort(sym.begin(), sym.end(), lt);
  bool ok = moved.size() == sym.size() &&
            std::equal(moved.begin(), moved.end(), sym.begin(),
                       [](const Vector& a, const Vector& b) { return a == b; });
  AgreementReport r;
  r.agree = ok;
  r.detail = "support: symbolic " + std::to_string(sym.size()) + " points, enumerated " +
             std::to_string(moved.size()) + (ok ? ", equal" : ", DIFFERENT");
  return r;
}

DefinableSet truncate_set(const DefinableSet& d, const std::vector<long>& ranks) {
  if (static_cast<int>(ranks.size()) != d.mod->ring()->k())
    fail(Err::PreconditionFailed, "one rank per ring component");
  ModulePtr fm = ModuleDescriptor::make(d.mod->ring(), ranks);
  auto move_element = [&](const ModuleElement& e) {
    ModuleElement out = ModuleElement::zero(fm);
    for (int i = 0; i < static_cast<int>(e.comps.size()); ++i)
      for (const auto& [idx, row] : e.comps[static_cast<size_t>(i)]) {
        if (fm->rank(i) != kOmega && idx >= fm->rank(i))
          fail(Err::SizeBound, "the set uses indices beyond the restricted rank");
        out.set_entry(i, idx, row);
      }
    return out;
  };
  auto move_ppset = [&](const PPSet& p) {
    require(!p.empty, "truncating a non-empty coset");
    PPSet out;
    out.mod = fm;
    out.n = p.n;
    out.empty = false;
    out.sub = PPSubgroup{fm, p.n, p.sub.basis};
    out.rep = Vector::zero(fm, p.n);
    for (int j = 0; j < p.n; ++j)
      out.rep.entries[static_cast<size_t>(j)] =
          move_element(p.rep.entries[static_cast<size_t>(j)]);
    return out;
  };
  DefinableSet out;
  out.mod = fm;
  out.n = d.n;
  for (const auto& b : d.blocks) {
    Block nb;
    nb.ambient = move_ppset(b.ambient);
    for (const auto& h : b.holes) nb.holes.push_back(move_ppset(h));
    out.blocks.push_back(std::move(nb));
  }
  return out;
}

AgreementReport check_counts(const DefinableSet& d, const std::vector<long>& ranks) {
  DefinableSet fin = truncate_set(d, ranks);
  if (!fin.mod->is_finite())
    fail(Err::PreconditionFailed, "counting needs a finite restriction");
  const RingPtr& ring = d.mod->ring();
  std::vector<mpz_class> x;
  for (int i = 0; i < ring->k(); ++i) {
    mpz_class xi = 1;
    for (long j = 0; j < ranks[static_cast<size_t>(i)]; ++j)
      xi *= static_cast<long>(ring->comp(i).div->cardinality());
    x.push_back(xi);
  }
  mpz_class predicted = k0_class(d).eval(x);
  std::vector<Vector> pts = enumerate_set(fin);
  bool ok = predicted == static_cast<long>(pts.size());
  AgreementReport r;
  r.agree = ok;
  r.detail = "count: k0 evaluates to " + predicted.get_str() + ", enumeration finds " +
             std::to_string(pts.size()) + (ok ? ", equal" : ", DIFFERENT");
  return r;
}

AgreementReport check_sign(const PiecewiseAffineBijection& f) {
  if (f.source.mod->ring()->k() != 1)
    fail(Err::PreconditionFailed, "the sign check needs a single ring component");
  int parity = permutation_parity(enumerate_perm(f));
  K1Class c = k1_invariant(f);
  bool ok = c.comps[0].sign0 == parity && c.comps[0].levels.empty();
  AgreementReport r;
  r.agree = ok;
  r.detail = "sign: engine reports sign0 " + std::to_string(c.comps[0].sign0) +
             (c.comps[0].levels.empty() ? "" : " plus higher levels") +
             ", enumeration finds parity " + std::to_string(parity) +
             (ok ? ", equal" : ", DIFFERENT");
  return r;
}

}  // namespace defk

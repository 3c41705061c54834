#include "defk/ppset.hpp"

#include <sstream>

namespace defk {

Colour Colour::operator+(const Colour& o) const {
  if (bottom || o.bottom) return bot();
  require(dims.size() == o.dims.size(), "colour length mismatch");
  Colour c = *this;
  for (size_t i = 0; i < dims.size(); ++i) c.dims[i] += o.dims[i];
  return c;
}

bool Colour::leq(const Colour& o) const {
  if (bottom) return true;
  if (o.bottom) return false;
  require(dims.size() == o.dims.size(), "colour length mismatch");
  for (size_t i = 0; i < dims.size(); ++i)
    if (dims[i] > o.dims[i]) return false;
  return true;
}

int Colour::lex_cmp(const Colour& o) const {
  if (bottom != o.bottom) return bottom ? -1 : 1;
  if (bottom) return 0;
  require(dims.size() == o.dims.size(), "colour length mismatch");
  for (size_t i = 0; i < dims.size(); ++i)
    if (dims[i] != o.dims[i]) return dims[i] < o.dims[i] ? -1 : 1;
  return 0;
}

std::string Colour::str() const {
  if (bottom) return "bottom";
  if (dims.size() == 1) return std::to_string(dims[0]);
  std::string s = "(";
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

PPSubgroup PPSubgroup::full(const ModulePtr& m, int n) {
  PPSubgroup s;
  s.mod = m;
  s.n = n;
  for (const auto& c : m->ring()->comps()) s.basis.push_back(Mat::identity(c.div, n * c.q));
  return s;
}

PPSubgroup PPSubgroup::zero_group(const ModulePtr& m, int n) {
  PPSubgroup s;
  s.mod = m;
  s.n = n;
  for (const auto& c : m->ring()->comps()) s.basis.push_back(Mat::zero(c.div, 0, n * c.q));
  return s;
}

PPSubgroup PPSubgroup::span(const ModulePtr& m, int n, std::vector<Mat> gens) {
  if (static_cast<int>(gens.size()) != m->k())
    fail(Err::PreconditionFailed, "span needs one generator matrix per component");
  PPSubgroup s;
  s.mod = m;
  s.n = n;
  for (int i = 0; i < m->k(); ++i) {
    const RingComponent& c = m->ring()->comp(i);
    if (gens[i].ring != c.div || gens[i].cols != n * c.q)
      fail(Err::PreconditionFailed, "generator rows must have n*q columns over the component");
    s.basis.push_back(row_space(gens[i]));
  }
  return s;
}

PPSubgroup PPSubgroup::annihilator(const ModulePtr& m, const SMat& h) {
  require(same_ring(m->ring(), h.ring), "annihilator over a different ring");
  PPSubgroup s;
  s.mod = m;
  s.n = h.rows;
  for (int i = 0; i < m->k(); ++i) s.basis.push_back(left_kernel(h.flat[i]));
  return s;
}

PPSubgroup PPSubgroup::standard(const ModulePtr& m, int n, const std::vector<long>& dims) {
  if (static_cast<int>(dims.size()) != m->k())
    fail(Err::PreconditionFailed, "one dimension per component");
  PPSubgroup s;
  s.mod = m;
  s.n = n;
  for (int i = 0; i < m->k(); ++i) {
    const RingComponent& c = m->ring()->comp(i);
    if (dims[i] < 0 || dims[i] > static_cast<long>(n) * c.q)
      fail(Err::PreconditionFailed, "standard dimension out of range");
    s.basis.push_back(Mat::identity(c.div, n * c.q).submat(0, 0, static_cast<int>(dims[i]), n * c.q));
  }
  return s;
}

Colour PPSubgroup::colour() const {
  std::vector<long> d;
  for (const auto& b : basis) d.push_back(b.rows);
  return Colour::of(std::move(d));
}

bool PPSubgroup::contains_slicewise(const Vector& v) const {
  require(same_module(mod, v.mod) && v.n == n, "vector from a different power");
  for (int i = 0; i < mod->k(); ++i) {
    std::map<long, bool> support;
    for (int j = 0; j < n; ++j)
      for (const auto& [idx, row] : v.entries[j].comps[i]) support[idx] = true;
    for (const auto& [idx, _] : support)
      if (!row_space_contains(basis[i], v.slice(i, idx))) return false;
  }
  return true;
}

bool PPSubgroup::leq(const PPSubgroup& o) const {
  require(same_module(mod, o.mod) && n == o.n, "subgroup shape mismatch");
  for (int i = 0; i < mod->k(); ++i)
    if (!row_space_leq(basis[i], o.basis[i])) return false;
  return true;
}

PPSubgroup PPSubgroup::intersect(const PPSubgroup& o) const {
  require(same_module(mod, o.mod) && n == o.n, "subgroup shape mismatch");
  PPSubgroup s;
  s.mod = mod;
  s.n = n;
  for (int i = 0; i < mod->k(); ++i) s.basis.push_back(intersect_row_spaces(basis[i], o.basis[i]));
  return s;
}

PPSubgroup PPSubgroup::sum(const PPSubgroup& o) const {
  require(same_module(mod, o.mod) && n == o.n, "subgroup shape mismatch");
  PPSubgroup s;
  s.mod = mod;
  s.n = n;
  for (int i = 0; i < mod->k(); ++i) s.basis.push_back(sum_row_spaces(basis[i], o.basis[i]));
  return s;
}

PPSubgroup PPSubgroup::product(const PPSubgroup& o) const {
  require(same_module(mod, o.mod), "subgroup module mismatch");
  PPSubgroup s;
  s.mod = mod;
  s.n = n + o.n;
  for (int i = 0; i < mod->k(); ++i) s.basis.push_back(row_space(block_diag(basis[i], o.basis[i])));
  return s;
}

PPSubgroup PPSubgroup::embed_zero(int n2) const {
  require(n2 >= n, "embedding cannot drop coordinates");
  PPSubgroup s;
  s.mod = mod;
  s.n = n2;
  for (int i = 0; i < mod->k(); ++i) {
    int q = mod->ring()->comp(i).q;
    s.basis.push_back(hcat(basis[i], Mat::zero(basis[i].ring, basis[i].rows, (n2 - n) * q)));
  }
  return s;
}

PPSubgroup PPSubgroup::cylinder(int n2) const {
  require(n2 >= n, "embedding cannot drop coordinates");
  PPSubgroup s;
  s.mod = mod;
  s.n = n2;
  for (int i = 0; i < mod->k(); ++i) {
    int q = mod->ring()->comp(i).q;
    int extra = (n2 - n) * q;
    Mat top = hcat(basis[i], Mat::zero(basis[i].ring, basis[i].rows, extra));
    Mat bottom = hcat(Mat::zero(basis[i].ring, extra, n * q), Mat::identity(basis[i].ring, extra));
    s.basis.push_back(row_space(vcat(top, bottom)));
  }
  return s;
}

bool PPSubgroup::operator==(const PPSubgroup& o) const { return cmp(o) == 0; }

int PPSubgroup::cmp(const PPSubgroup& o) const {
  require(same_module(mod, o.mod), "subgroup module mismatch");
  if (n != o.n) return n < o.n ? -1 : 1;
  for (int i = 0; i < mod->k(); ++i) {
    int c = basis[i].cmp(o.basis[i]);
    if (c != 0) return c;
  }
  return 0;
}

std::string PPSubgroup::str() const {
  std::ostringstream os;
  os << "span";
  if (mod->k() == 1) return "span" + basis[0].str();
  os << "(";
  for (int i = 0; i < mod->k(); ++i) {
    if (i) os << ", ";
    os << basis[i].str();
  }
  os << ")";
  return os.str();
}

PPSet PPSet::empty_set(const ModulePtr& m, int n) {
  PPSet p;
  p.mod = m;
  p.n = n;
  p.empty = true;
  return p;
}

PPSet PPSet::coset(PPSubgroup s, const Vector& rep) {
  require(same_module(s.mod, rep.mod) && s.n == rep.n, "rep from a different power");
  PPSet p;
  p.mod = s.mod;
  p.n = s.n;
  p.empty = false;
  // slicewise reduction jumps to the unique rep vanishing on pivot columns
  Vector r = Vector::zero(rep.mod, rep.n);
  for (int i = 0; i < s.mod->k(); ++i) {
    std::map<long, bool> support;
    for (int j = 0; j < rep.n; ++j)
      for (const auto& [idx, row] : rep.entries[j].comps[i]) support[idx] = true;
    for (const auto& [idx, _] : support)
      r.set_slice(i, idx, reduce_by_row_space(s.basis[i], rep.slice(i, idx)));
  }
  p.sub = std::move(s);
  p.rep = std::move(r);
  return p;
}

PPSet PPSet::point(const Vector& v) { return coset(PPSubgroup::zero_group(v.mod, v.n), v); }

bool PPSet::contains(const Vector& v) const {
  if (empty) return false;
  return sub.contains_slicewise(v - rep);
}

bool PPSet::subset_of(const PPSet& o) const {
  if (empty) return true;
  if (o.empty) return false;
  return sub.leq(o.sub) && o.contains(rep);
}

bool PPSet::is_point() const {
  if (empty) return false;
  for (int i = 0; i < mod->k(); ++i)
    if (sub.dim(i) != 0) return false;
  return true;
}

PPSet PPSet::intersect(const PPSet& o) const {
  require(same_module(mod, o.mod) && n == o.n, "intersection across powers");
  if (empty || o.empty) return empty_set(mod, n);
  // solve u1 - u2 = o.rep - rep slicewise over the stacked bases
  Vector d = o.rep - rep;
  Vector u1 = Vector::zero(mod, n);
  for (int i = 0; i < mod->k(); ++i) {
    Mat stacked = vcat(sub.basis[i], o.sub.basis[i]);
    std::map<long, bool> support;
    for (int j = 0; j < n; ++j)
      for (const auto& [idx, row] : d.entries[j].comps[i]) support[idx] = true;
    for (const auto& [idx, _] : support) {
      auto mu = solve_left(stacked, d.slice(i, idx));
      if (!mu) return empty_set(mod, n);
      Mat a = mu->submat(0, 0, 1, sub.basis[i].rows) * sub.basis[i];
      u1.set_slice(i, idx, a);
    }
  }
  return coset(sub.intersect(o.sub), rep + u1);
}

PPSet PPSet::translate(const Vector& t) const {
  if (empty) return *this;
  return coset(sub, rep + t);
}

PPSet PPSet::product(const PPSet& o) const {
  require(same_module(mod, o.mod), "product across modules");
  if (empty || o.empty) return empty_set(mod, n + o.n);
  Vector r = Vector::zero(mod, n + o.n);
  for (int j = 0; j < n; ++j) r.entries[j] = rep.entries[j];
  for (int j = 0; j < o.n; ++j) r.entries[n + j] = o.rep.entries[j];
  return coset(sub.product(o.sub), r);
}

PPSet PPSet::embed_zero(int n2) const {
  if (empty) return empty_set(mod, n2);
  return coset(sub.embed_zero(n2), embed_vector(rep, n2));
}

bool PPSet::operator==(const PPSet& o) const { return cmp(o) == 0; }

int PPSet::cmp(const PPSet& o) const {
  require(same_module(mod, o.mod), "pp-set module mismatch");
  if (n != o.n) return n < o.n ? -1 : 1;
  if (empty != o.empty) return empty ? -1 : 1;
  if (empty) return 0;
  int c = sub.cmp(o.sub);
  if (c != 0) return c;
  return rep.cmp(o.rep);
}

std::string PPSet::str() const {
  if (empty) return "empty";
  return "coset(rep=" + rep.str() + ", " + sub.str() + ")";
}

PPSet pp_solve(const ModulePtr& m, int n, const std::vector<Mat>& g, const Vector& c) {
  require(static_cast<int>(g.size()) == m->k(), "one system matrix per component");
  PPSubgroup s;
  s.mod = m;
  s.n = n;
  for (int i = 0; i < m->k(); ++i) {
    require(g[i].rows == n * m->ring()->comp(i).q, "system row count mismatch");
    s.basis.push_back(left_kernel(g[i]));
  }
  Vector rep = Vector::zero(m, n);
  for (int i = 0; i < m->k(); ++i) {
    std::map<long, bool> support;
    for (int j = 0; j < c.n; ++j)
      for (const auto& [idx, row] : c.entries[j].comps[i]) support[idx] = true;
    for (const auto& [idx, _] : support) {
      Mat rhs = c.slice(i, idx);
      require(rhs.cols == g[i].cols, "right-hand slice width mismatch");
      auto sol = solve_left(g[i], rhs);
      if (!sol) return PPSet::empty_set(m, n);
      rep.set_slice(i, idx, *sol);
    }
  }
  return PPSet::coset(std::move(s), rep);
}

StandardFrame pp_iso_standard(const PPSet& p) {
  if (p.empty) fail(Err::EmptySet, "no frame for the empty set");
  SMat a;
  a.ring = p.mod->ring();
  a.rows = p.n;
  a.cols = p.n;
  for (int i = 0; i < p.mod->k(); ++i) {
    const Mat& b = p.sub.basis[i];
    int w = b.cols;
    // rows: the basis, then unit rows at non-pivot columns; invertible, and
    // its inverse carries U onto the span of the leading coordinates
    std::vector<bool> pivot(w, false);
    for (int r = 0; r < b.rows; ++r)
      for (int cidx = 0; cidx < w; ++cidx)
        if (!b.at(r, cidx).is_zero()) {
          pivot[cidx] = true;
          break;
        }
    Mat frame = b;
    for (int cidx = 0; cidx < w; ++cidx) {
      if (pivot[cidx]) continue;
      Mat unit = Mat::zero(b.ring, 1, w);
      unit.at(0, cidx) = Scalar::one(b.ring);
      frame = vcat(frame, unit);
    }
    auto inv = mat_invert(frame);
    require(inv.has_value(), "frame completion must be invertible");
    a.flat.push_back(*inv);
  }
  return StandardFrame{p.rep, std::move(a)};
}

PPSubgroup morita_ppsubgroup(const PPSubgroup& s, int q) {
  ModulePtr target = morita_module(s.mod, q);
  if (s.n % q != 0) fail(Err::PreconditionFailed, "dimension not expressible in the target shape");
  PPSubgroup out;
  out.mod = target;
  out.n = s.n / q;
  out.basis = s.basis;  // slice width n*1 = (n/q)*q: carried verbatim
  return out;
}

PPSet morita_ppset(const PPSet& p, int q) {
  if (p.empty) {
    if (p.n % q != 0)
      fail(Err::PreconditionFailed, "dimension not expressible in the target shape");
    return PPSet::empty_set(morita_module(p.mod, q), p.n / q);
  }
  return PPSet::coset(morita_ppsubgroup(p.sub, q), morita_vector(p.rep, q));
}

}  // namespace defk

#include "defk/module.hpp"

#include <sstream>

namespace defk {

namespace {
constexpr long long kCardCap = 1LL << 40;
}

ModulePtr ModuleDescriptor::make(const RingPtr& ring, std::vector<long> ranks) {
  if (static_cast<int>(ranks.size()) != ring->k())
    fail(Err::PreconditionFailed, "module needs one rank per ring component");
  for (long r : ranks)
    if (r != kOmega && r < 1) fail(Err::PreconditionFailed, "component rank must be >= 1 or omega");
  auto m = std::make_shared<ModuleDescriptor>();
  m->ring_ = ring;
  m->ranks_ = std::move(ranks);
  return m;
}

bool ModuleDescriptor::component_infinite(int i) const {
  return ranks_[i] == kOmega || !ring_->comp(i).div->finite();
}

bool ModuleDescriptor::all_infinite() const {
  for (int i = 0; i < k(); ++i)
    if (!component_infinite(i)) return false;
  return true;
}

bool ModuleDescriptor::is_finite() const {
  for (int i = 0; i < k(); ++i)
    if (component_infinite(i)) return false;
  return true;
}

long long ModuleDescriptor::cardinality() const {
  if (!is_finite()) return 0;
  long long card = 1;
  for (int i = 0; i < k(); ++i) {
    long long base = ring_->comp(i).div->cardinality();
    long long exp = static_cast<long long>(ring_->comp(i).q) * ranks_[i];
    for (long long j = 0; j < exp; ++j) {
      if (card > kCardCap / base) fail(Err::SizeBound, "module too large to enumerate");
      card *= base;
    }
  }
  return card;
}

bool ModuleDescriptor::operator==(const ModuleDescriptor& o) const {
  return same_ring(ring_, o.ring_) && ranks_ == o.ranks_;
}

std::string ModuleDescriptor::rank_str() const {
  std::ostringstream os;
  os << "rank(";
  for (int i = 0; i < k(); ++i) {
    if (i) os << ", ";
    if (ranks_[i] == kOmega)
      os << "omega";
    else
      os << ranks_[i];
  }
  os << ")";
  return os.str();
}

bool same_module(const ModulePtr& a, const ModulePtr& b) {
  return a == b || (a && b && *a == *b);
}

ModuleElement ModuleElement::zero(const ModulePtr& m) {
  ModuleElement x;
  x.mod = m;
  x.comps.resize(m->k());
  return x;
}

ModuleElement ModuleElement::unit(const ModulePtr& m, int comp, long idx, int col) {
  ModuleElement x = zero(m);
  const DivisionRing* d = m->ring()->comp(comp).div;
  Mat row = Mat::zero(d, 1, m->ring()->comp(comp).q);
  row.at(0, col) = Scalar::one(d);
  x.set_entry(comp, idx, row);
  return x;
}

void ModuleElement::set_entry(int comp, long idx, const Mat& row) {
  const RingComponent& c = mod->ring()->comp(comp);
  require(row.ring == c.div && row.rows == 1 && row.cols == c.q, "entry row shape mismatch");
  if (idx < 0 || (mod->rank(comp) != kOmega && idx >= mod->rank(comp)))
    fail(Err::PreconditionFailed, "support index out of the component's rank");
  if (row.is_zero())
    comps[comp].erase(idx);
  else
    comps[comp][idx] = row;
}

Mat ModuleElement::entry(int comp, long idx) const {
  auto it = comps[comp].find(idx);
  if (it != comps[comp].end()) return it->second;
  return Mat::zero(mod->ring()->comp(comp).div, 1, mod->ring()->comp(comp).q);
}

bool ModuleElement::is_zero() const {
  for (const auto& c : comps)
    if (!c.empty()) return false;
  return true;
}

long ModuleElement::max_index() const {
  long m = -1;
  for (const auto& c : comps)
    if (!c.empty()) m = std::max(m, c.rbegin()->first);
  return m;
}

ModuleElement ModuleElement::operator+(const ModuleElement& o) const {
  require(same_module(mod, o.mod), "module element descriptor mismatch");
  ModuleElement x = *this;
  for (int i = 0; i < mod->k(); ++i)
    for (const auto& [idx, row] : o.comps[i]) x.set_entry(i, idx, x.entry(i, idx) + row);
  return x;
}

ModuleElement ModuleElement::operator-() const {
  ModuleElement x = *this;
  for (auto& c : x.comps)
    for (auto& [idx, row] : c) row = Mat::zero(row.ring, 1, row.cols) - row;
  return x;
}

ModuleElement ModuleElement::operator-(const ModuleElement& o) const { return *this + (-o); }

ModuleElement ModuleElement::scalar_act(const RingElement& s) const {
  require(same_ring(mod->ring(), s.ring), "scalar from a different ring");
  ModuleElement x = zero(mod);
  for (int i = 0; i < mod->k(); ++i)
    for (const auto& [idx, row] : comps[i]) x.set_entry(i, idx, row * s.comps[i]);
  return x;
}

int ModuleElement::cmp(const ModuleElement& o) const {
  require(same_module(mod, o.mod), "module element descriptor mismatch");
  for (int i = 0; i < mod->k(); ++i) {
    auto a = comps[i].begin(), b = o.comps[i].begin();
    while (a != comps[i].end() || b != o.comps[i].end()) {
      if (a == comps[i].end()) return -1;
      if (b == o.comps[i].end()) return 1;
      if (a->first != b->first) return a->first < b->first ? -1 : 1;
      int c = a->second.cmp(b->second);
      if (c != 0) return c;
      ++a;
      ++b;
    }
  }
  return 0;
}

namespace {

std::string row_str(const Mat& row) {
  if (row.cols == 1) return row.at(0, 0).str();
  std::string s = "[";
  for (int j = 0; j < row.cols; ++j) {
    if (j) s += ", ";
    s += row.at(0, j).str();
  }
  return s + "]";
}

std::string component_str(const ModuleElement& x, int i) {
  const auto& c = x.comps[i];
  if (c.empty()) return "0";
  long hi = c.rbegin()->first;
  std::string s = "[";
  for (long t = 0; t <= hi; ++t) {
    if (t) s += ", ";
    s += row_str(x.entry(i, t));
  }
  return s + "]";
}

}  // namespace

std::string ModuleElement::str() const {
  if (mod->k() == 1) return component_str(*this, 0);
  std::string s = "(";
  for (int i = 0; i < mod->k(); ++i) {
    if (i) s += ", ";
    s += component_str(*this, i);
  }
  return s + ")";
}

Vector Vector::zero(const ModulePtr& m, int n) {
  require(n >= 1, "tuple power must be >= 1");
  Vector v;
  v.mod = m;
  v.n = n;
  v.entries.assign(n, ModuleElement::zero(m));
  return v;
}

bool Vector::is_zero() const {
  for (const auto& e : entries)
    if (!e.is_zero()) return false;
  return true;
}

long Vector::max_index() const {
  long m = -1;
  for (const auto& e : entries) m = std::max(m, e.max_index());
  return m;
}

Mat Vector::slice(int comp, long idx) const {
  int q = mod->ring()->comp(comp).q;
  Mat s = Mat::zero(mod->ring()->comp(comp).div, 1, n * q);
  for (int j = 0; j < n; ++j) {
    Mat row = entries[j].entry(comp, idx);
    for (int c = 0; c < q; ++c) s.at(0, j * q + c) = row.at(0, c);
  }
  return s;
}

void Vector::set_slice(int comp, long idx, const Mat& row) {
  int q = mod->ring()->comp(comp).q;
  require(row.rows == 1 && row.cols == n * q, "slice shape mismatch");
  for (int j = 0; j < n; ++j) entries[j].set_entry(comp, idx, row.submat(0, j * q, 1, q));
}

Vector Vector::apply(const SMat& a) const {
  require(same_ring(mod->ring(), a.ring) && a.rows == n && a.cols == n, "matrix shape mismatch");
  Vector out = zero(mod, n);
  for (int i = 0; i < mod->k(); ++i) {
    std::map<long, bool> support;
    for (int j = 0; j < n; ++j)
      for (const auto& [idx, row] : entries[j].comps[i]) support[idx] = true;
    for (const auto& [idx, _] : support) out.set_slice(i, idx, slice(i, idx) * a.flat[i]);
  }
  return out;
}

Vector Vector::operator+(const Vector& o) const {
  require(same_module(mod, o.mod) && n == o.n, "vector shape mismatch");
  Vector v = *this;
  for (int j = 0; j < n; ++j) v.entries[j] = v.entries[j] + o.entries[j];
  return v;
}

Vector Vector::operator-(const Vector& o) const {
  require(same_module(mod, o.mod) && n == o.n, "vector shape mismatch");
  Vector v = *this;
  for (int j = 0; j < n; ++j) v.entries[j] = v.entries[j] - o.entries[j];
  return v;
}

int Vector::cmp(const Vector& o) const {
  require(same_module(mod, o.mod), "vector descriptor mismatch");
  if (n != o.n) return n < o.n ? -1 : 1;
  for (int j = 0; j < n; ++j) {
    int c = entries[j].cmp(o.entries[j]);
    if (c != 0) return c;
  }
  return 0;
}

std::string Vector::str() const {
  std::string s = "[";
  for (int j = 0; j < n; ++j) {
    if (j) s += ", ";
    s += entries[j].str();
  }
  return s + "]";
}

Vector embed_vector(const Vector& v, int n2) {
  require(n2 >= v.n, "embedding cannot drop coordinates");
  Vector out = Vector::zero(v.mod, n2);
  for (int j = 0; j < v.n; ++j) out.entries[j] = v.entries[j];
  return out;
}

ModuleElement module_stream(const ModulePtr& m, unsigned long long l) {
  for (int i = 0; i < m->k(); ++i) {
    if (!m->component_infinite(i)) continue;
    const DivisionRing* d = m->ring()->comp(i).div;
    ModuleElement x = ModuleElement::zero(m);
    if (!d->finite()) {
      Mat row = Mat::zero(d, 1, m->ring()->comp(i).q);
      row.at(0, 0) = scalar_at(d, l + 1);  // stream indices >= 1 are nonzero
      x.set_entry(i, 0, row);
    } else {
      // rank omega: walk the support index instead
      x = ModuleElement::unit(m, i, static_cast<long>(l));
    }
    return x;
  }
  fail(Err::PreconditionFailed, "element stream needs an infinite component");
}

std::vector<ModuleElement> enumerate_module(const ModulePtr& m, long long cap) {
  if (!m->is_finite()) fail(Err::SizeBound, "cannot enumerate an infinite module");
  long long card = m->cardinality();
  if (card > cap) fail(Err::SizeBound, "module enumeration exceeds the cap");
  // odometer over (component, index, column) digits in scalar encoding order
  std::vector<ModuleElement> out;
  out.reserve(static_cast<size_t>(card));
  struct Digit {
    int comp;
    long idx;
    int col;
    long long base;
  };
  std::vector<Digit> digits;
  for (int i = 0; i < m->k(); ++i) {
    const RingComponent& c = m->ring()->comp(i);
    for (long t = 0; t < m->rank(i); ++t)
      for (int col = 0; col < c.q; ++col) digits.push_back({i, t, col, c.div->cardinality()});
  }
  std::vector<long long> v(digits.size(), 0);
  while (true) {
    ModuleElement x = ModuleElement::zero(m);
    for (size_t d = 0; d < digits.size(); ++d) {
      if (v[d] == 0) continue;
      Mat row = x.entry(digits[d].comp, digits[d].idx);
      row.at(0, digits[d].col) = Scalar::ff(m->ring()->comp(digits[d].comp).div, v[d]);
      x.set_entry(digits[d].comp, digits[d].idx, row);
    }
    out.push_back(std::move(x));
    size_t d = 0;
    while (d < digits.size() && ++v[d] == digits[d].base) v[d++] = 0;
    if (d == digits.size()) break;
  }
  return out;
}

std::vector<Vector> enumerate_vectors(const ModulePtr& m, int n, long long cap) {
  long long card = m->cardinality();
  if (card == 0) fail(Err::SizeBound, "cannot enumerate an infinite module");
  long long total = 1;
  for (int j = 0; j < n; ++j) {
    if (card != 0 && total > cap / card) fail(Err::SizeBound, "vector enumeration exceeds the cap");
    total *= card;
  }
  std::vector<ModuleElement> elems = enumerate_module(m, cap);
  std::vector<Vector> out;
  out.reserve(static_cast<size_t>(total));
  std::vector<size_t> idx(n, 0);
  while (true) {
    Vector v = Vector::zero(m, n);
    for (int j = 0; j < n; ++j) v.entries[j] = elems[idx[j]];
    out.push_back(std::move(v));
    int j = 0;
    while (j < n && ++idx[j] == elems.size()) idx[j++] = 0;
    if (j == n) break;
  }
  return out;
}

ModulePtr morita_module(const ModulePtr& m, int q) {
  RingPtr target = morita_ring(m->ring(), q);  // checks the source shape
  return ModuleDescriptor::make(target, {m->rank(0)});
}

Vector morita_vector(const Vector& v, int q) {
  ModulePtr target = morita_module(v.mod, q);
  if (v.n % q != 0)
    fail(Err::PreconditionFailed, "dimension not expressible in the target shape");
  int n2 = v.n / q;
  Vector out = Vector::zero(target, n2);
  for (int j = 0; j < n2; ++j) {
    ModuleElement e = ModuleElement::zero(target);
    // gather q consecutive tuple coordinates into the 1xq rows
    std::map<long, bool> support;
    for (int c = 0; c < q; ++c)
      for (const auto& [idx, row] : v.entries[j * q + c].comps[0]) support[idx] = true;
    for (const auto& [idx, _] : support) {
      Mat row = Mat::zero(target->ring()->comp(0).div, 1, q);
      for (int c = 0; c < q; ++c) row.at(0, c) = v.entries[j * q + c].entry(0, idx).at(0, 0);
      e.set_entry(0, idx, row);
    }
    out.entries[j] = e;
  }
  return out;
}

}  // namespace defk

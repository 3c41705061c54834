#include "defk/ring.hpp"

#include <sstream>

namespace defk {

RingPtr RingDescriptor::make(std::vector<RingComponent> comps) {
  if (comps.empty()) fail(Err::PreconditionFailed, "ring needs at least one component");
  for (const auto& c : comps) {
    if (c.q < 1) fail(Err::PreconditionFailed, "matrix size q must be >= 1");
    require(c.div != nullptr, "component without a division-ring plugin");
  }
  auto r = std::make_shared<RingDescriptor>();
  r->comps_ = std::move(comps);
  return r;
}

bool RingDescriptor::operator==(const RingDescriptor& o) const {
  if (comps_.size() != o.comps_.size()) return false;
  for (size_t i = 0; i < comps_.size(); ++i)
    if (comps_[i].q != o.comps_[i].q || comps_[i].div != o.comps_[i].div) return false;
  return true;
}

std::string RingDescriptor::name() const {
  std::ostringstream os;
  for (int i = 0; i < k(); ++i) {
    if (i) os << " x ";
    os << "M(" << comps_[i].q << ", " << comps_[i].div->name() << ")";
  }
  return os.str();
}

bool same_ring(const RingPtr& a, const RingPtr& b) {
  return a == b || (a && b && *a == *b);
}

RingElement RingElement::zero(const RingPtr& s) {
  RingElement x;
  x.ring = s;
  for (const auto& c : s->comps()) x.comps.push_back(Mat::zero(c.div, c.q, c.q));
  return x;
}

RingElement RingElement::one(const RingPtr& s) {
  RingElement x;
  x.ring = s;
  for (const auto& c : s->comps()) x.comps.push_back(Mat::identity(c.div, c.q));
  return x;
}

RingElement RingElement::make(const RingPtr& s, std::vector<Mat> comps) {
  if (static_cast<int>(comps.size()) != s->k())
    fail(Err::PreconditionFailed, "ring element needs one matrix per component");
  for (int i = 0; i < s->k(); ++i) {
    const auto& c = s->comp(i);
    if (comps[i].ring != c.div || comps[i].rows != c.q || comps[i].cols != c.q)
      fail(Err::PreconditionFailed, "component matrix has the wrong shape");
  }
  RingElement x;
  x.ring = s;
  x.comps = std::move(comps);
  return x;
}

RingElement RingElement::operator+(const RingElement& o) const {
  require(same_ring(ring, o.ring), "ring element descriptor mismatch");
  RingElement x;
  x.ring = ring;
  for (size_t i = 0; i < comps.size(); ++i) x.comps.push_back(comps[i] + o.comps[i]);
  return x;
}

RingElement RingElement::operator-(const RingElement& o) const {
  require(same_ring(ring, o.ring), "ring element descriptor mismatch");
  RingElement x;
  x.ring = ring;
  for (size_t i = 0; i < comps.size(); ++i) x.comps.push_back(comps[i] - o.comps[i]);
  return x;
}

RingElement RingElement::operator*(const RingElement& o) const {
  require(same_ring(ring, o.ring), "ring element descriptor mismatch");
  RingElement x;
  x.ring = ring;
  for (size_t i = 0; i < comps.size(); ++i) x.comps.push_back(comps[i] * o.comps[i]);
  return x;
}

bool RingElement::is_unit() const {
  for (const auto& m : comps)
    if (!mat_invert(m)) return false;
  return true;
}

std::optional<RingElement> RingElement::invert() const {
  RingElement x;
  x.ring = ring;
  for (const auto& m : comps) {
    auto inv = mat_invert(m);
    if (!inv) return std::nullopt;
    x.comps.push_back(*inv);
  }
  return x;
}

int RingElement::cmp(const RingElement& o) const {
  require(same_ring(ring, o.ring), "ring element descriptor mismatch");
  for (size_t i = 0; i < comps.size(); ++i) {
    int c = comps[i].cmp(o.comps[i]);
    if (c != 0) return c;
  }
  return 0;
}

std::string RingElement::str() const {
  if (ring->k() == 1) return comps[0].str();
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < comps.size(); ++i) {
    if (i) os << ", ";
    os << comps[i].str();
  }
  os << ")";
  return os.str();
}

std::vector<RingElement> ring_decompose(const RingElement& x) {
  std::vector<RingElement> parts;
  for (int i = 0; i < x.ring->k(); ++i) {
    RingElement p = RingElement::zero(x.ring);
    p.comps[i] = x.comps[i];
    parts.push_back(std::move(p));
  }
  return parts;
}

SMat SMat::zero(const RingPtr& s, int rows, int cols) {
  SMat m;
  m.ring = s;
  m.rows = rows;
  m.cols = cols;
  for (const auto& c : s->comps()) m.flat.push_back(Mat::zero(c.div, rows * c.q, cols * c.q));
  return m;
}

SMat SMat::identity(const RingPtr& s, int n) {
  SMat m;
  m.ring = s;
  m.rows = n;
  m.cols = n;
  for (const auto& c : s->comps()) m.flat.push_back(Mat::identity(c.div, n * c.q));
  return m;
}

SMat SMat::from_elements(const RingPtr& s, const std::vector<std::vector<RingElement>>& entries) {
  int nr = static_cast<int>(entries.size());
  int nc = nr == 0 ? 0 : static_cast<int>(entries[0].size());
  SMat m = zero(s, nr, nc);
  for (int a = 0; a < nr; ++a) {
    require(static_cast<int>(entries[a].size()) == nc, "ragged matrix over S");
    for (int b = 0; b < nc; ++b) {
      const RingElement& x = entries[a][b];
      require(same_ring(x.ring, s), "entry from a different ring");
      for (int i = 0; i < s->k(); ++i) {
        int q = s->comp(i).q;
        for (int r = 0; r < q; ++r)
          for (int c = 0; c < q; ++c) m.flat[i].at(a * q + r, b * q + c) = x.comps[i].at(r, c);
      }
    }
  }
  return m;
}

RingElement SMat::entry(int a, int b) const {
  require(a >= 0 && a < rows && b >= 0 && b < cols, "entry out of range");
  RingElement x = RingElement::zero(ring);
  for (int i = 0; i < ring->k(); ++i) {
    int q = ring->comp(i).q;
    x.comps[i] = flat[i].submat(a * q, b * q, q, q);
  }
  return x;
}

SMat SMat::operator+(const SMat& o) const {
  require(same_ring(ring, o.ring), "matrix over S: descriptor mismatch");
  SMat m = *this;
  for (size_t i = 0; i < flat.size(); ++i) m.flat[i] = flat[i] + o.flat[i];
  return m;
}

SMat SMat::operator-(const SMat& o) const {
  require(same_ring(ring, o.ring), "matrix over S: descriptor mismatch");
  SMat m = *this;
  for (size_t i = 0; i < flat.size(); ++i) m.flat[i] = flat[i] - o.flat[i];
  return m;
}

SMat SMat::operator*(const SMat& o) const {
  require(same_ring(ring, o.ring) && cols == o.rows, "matrix over S: shape mismatch");
  SMat m;
  m.ring = ring;
  m.rows = rows;
  m.cols = o.cols;
  for (size_t i = 0; i < flat.size(); ++i) m.flat.push_back(flat[i] * o.flat[i]);
  return m;
}

bool SMat::is_invertible() const {
  if (rows != cols) return false;
  for (const auto& f : flat)
    if (!mat_invert(f)) return false;
  return true;
}

std::optional<SMat> SMat::invert() const {
  if (rows != cols) return std::nullopt;
  SMat m;
  m.ring = ring;
  m.rows = rows;
  m.cols = cols;
  for (const auto& f : flat) {
    auto inv = mat_invert(f);
    if (!inv) return std::nullopt;
    m.flat.push_back(*inv);
  }
  return m;
}

int SMat::cmp(const SMat& o) const {
  require(same_ring(ring, o.ring), "matrix over S: descriptor mismatch");
  if (rows != o.rows) return rows < o.rows ? -1 : 1;
  if (cols != o.cols) return cols < o.cols ? -1 : 1;
  for (size_t i = 0; i < flat.size(); ++i) {
    int c = flat[i].cmp(o.flat[i]);
    if (c != 0) return c;
  }
  return 0;
}

std::string SMat::str() const {
  std::ostringstream os;
  os << "[";
  for (int a = 0; a < rows; ++a) {
    if (a) os << ", ";
    os << "[";
    for (int b = 0; b < cols; ++b) {
      if (b) os << ", ";
      os << entry(a, b).str();
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

RingPtr morita_ring(const RingPtr& s, int q) {
  if (s->k() != 1 || s->comp(0).q != 1)
    fail(Err::PreconditionFailed, "blocked reinterpretation starts from a single M(1, R) component");
  if (q < 1) fail(Err::PreconditionFailed, "target matrix size must be >= 1");
  return RingDescriptor::make({{q, s->comp(0).div}});
}

}  // namespace defk

#include "defk/scalar.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace defk {

namespace {

long long mod_p(long long v, long long p) {
  long long r = v % p;
  return r < 0 ? r + p : r;
}

bool is_prime(long long p) {
  if (p < 2) return false;
  for (long long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// --- dense polynomials over F_p, coefficients low->high, no trailing zeros ---

using Poly = std::vector<long long>;

void ptrim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int pdeg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

Poly pmul(const Poly& a, const Poly& b, long long p) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] = mod_p(c[i + j] + a[i] * b[j], p);
  ptrim(c);
  return c;
}

Poly psub(Poly a, const Poly& b, long long p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) a[i] = mod_p(a[i] - b[i], p);
  ptrim(a);
  return a;
}

long long inv_mod_p(long long a, long long p) {
  // Extended Euclid on integers.
  long long t = 0, nt = 1, r = p, nr = mod_p(a, p);
  while (nr != 0) {
    long long q = r / nr;
    t -= q * nt;
    std::swap(t, nt);
    r -= q * nr;
    std::swap(r, nr);
  }
  require(r == 1, "inverse of zero residue");
  return mod_p(t, p);
}

// a = q*b + r with deg r < deg b; returns {q, r}. pre: b nonzero.
std::pair<Poly, Poly> pdivmod(Poly a, const Poly& b, long long p) {
  require(!b.empty(), "poly division by zero");
  Poly q;
  long long lead_inv = inv_mod_p(b.back(), p);
  while (pdeg(a) >= pdeg(b)) {
    int shift = pdeg(a) - pdeg(b);
    long long coef = mod_p(a.back() * lead_inv, p);
    if (static_cast<int>(q.size()) < shift + 1) q.resize(shift + 1, 0);
    q[shift] = coef;
    Poly sub(shift + 1, 0);
    sub[shift] = coef;
    a = psub(a, pmul(sub, b, p), p);
  }
  ptrim(q);
  return {q, a};
}

bool pdivides(const Poly& g, const Poly& f, long long p) { return pdivmod(f, g, p).second.empty(); }

// Monic f irreducible over F_p, by trial division up to degree deg(f)/2.
bool pirreducible(const Poly& f, long long p) {
  int n = pdeg(f);
  for (int d = 1; 2 * d <= n; ++d) {
    // all monic g of degree d, coefficient vectors counted in base p
    long long count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (long long v = 0; v < count; ++v) {
      Poly g(d + 1, 0);
      long long t = v;
      for (int i = 0; i < d; ++i) {
        g[i] = t % p;
        t /= p;
      }
      g[d] = 1;
      if (pdivides(g, f, p)) return false;
    }
  }
  return true;
}

// First irreducible monic x^e + c_{e-1}x^{e-1} + ... + c_0 in base-p counter
// order of the encoding value sum c_i p^i. Returned as the c-vector (size e).
std::vector<long long> find_modulus(long long p, int e) {
  long long count = 1;
  for (int i = 0; i < e; ++i) count *= p;
  for (long long v = 0; v < count; ++v) {
    Poly f(e + 1, 0);
    long long t = v;
    for (int i = 0; i < e; ++i) {
      f[i] = t % p;
      t /= p;
    }
    f[e] = 1;
    if (pirreducible(f, p)) {
      f.pop_back();
      f.resize(e, 0);
      return f;
    }
  }
  require(false, "no irreducible modulus found");
  return {};
}

std::mutex g_intern_mu;

}  // namespace

long long DivisionRing::cardinality() const {
  if (!finite()) return 0;
  long long c = 1;
  for (int i = 0; i < e; ++i) c *= p;
  return c;
}

std::string DivisionRing::name() const {
  switch (kind) {
    case Kind::Rationals: return "QQ";
    case Kind::Quaternions: return "HQ";
    case Kind::Finite:
      return e == 1 ? "GF(" + std::to_string(p) + ")"
                    : "GF(" + std::to_string(p) + "," + std::to_string(e) + ")";
  }
  return "?";
}

const DivisionRing* finite_field(long long p, int e) {
  if (!is_prime(p)) fail(Err::PreconditionFailed, "finite field characteristic must be prime");
  if (e < 1) fail(Err::PreconditionFailed, "finite field extension degree must be >= 1");
  // keep p^e inside a long long with ample slack
  long double size = 1;
  for (int i = 0; i < e; ++i) size *= static_cast<long double>(p);
  if (size > 1e12L) fail(Err::SizeBound, "finite field too large");

  static std::map<std::pair<long long, int>, std::unique_ptr<DivisionRing>> registry;
  std::lock_guard<std::mutex> lk(g_intern_mu);
  auto& slot = registry[{p, e}];
  if (!slot) {
    slot = std::make_unique<DivisionRing>();
    slot->kind = DivisionRing::Kind::Finite;
    slot->p = p;
    slot->e = e;
    if (e > 1) slot->modulus = find_modulus(p, e);
  }
  return slot.get();
}

const DivisionRing* rationals() {
  static DivisionRing r{DivisionRing::Kind::Rationals, 0, 1, {}};
  return &r;
}

const DivisionRing* quaternions() {
  static DivisionRing r{DivisionRing::Kind::Quaternions, 0, 1, {}};
  return &r;
}

const DivisionRing* ring_by_name(const std::string& s) {
  if (s == "QQ") return rationals();
  if (s == "HQ") return quaternions();
  if (s.rfind("GF(", 0) == 0 && s.back() == ')') {
    std::string inner = s.substr(3, s.size() - 4);
    auto comma = inner.find(',');
    try {
      if (comma == std::string::npos) return finite_field(std::stoll(inner));
      return finite_field(std::stoll(inner.substr(0, comma)), std::stoi(inner.substr(comma + 1)));
    } catch (const std::logic_error&) {
      // fall through to the parse failure below
    }
  }
  fail(Err::ParseError, "unknown ring plugin '" + s + "'");
}

// --- Scalar ---

Scalar ff_raw(const DivisionRing* r, std::vector<long long> c) {
  Scalar s;
  s.ring_ = r;
  s.v_ = std::move(c);
  return s;
}

namespace {

Scalar make_ffe(const DivisionRing* r, std::vector<long long> c) {
  c.resize(r->e, 0);
  for (auto& x : c) x = mod_p(x, r->p);
  return ff_raw(r, std::move(c));
}

}  // namespace

Scalar Scalar::zero(const DivisionRing* r) { return from_int(r, 0); }
Scalar Scalar::one(const DivisionRing* r) { return from_int(r, 1); }

Scalar Scalar::from_int(const DivisionRing* r, long long v) {
  Scalar s;
  s.ring_ = r;
  switch (r->kind) {
    case DivisionRing::Kind::Finite:
      if (r->e == 1) {
        s.v_ = mod_p(v, r->p);
      } else {
        // integers embed via the prime subfield
        std::vector<long long> c(r->e, 0);
        c[0] = mod_p(v, r->p);
        s.v_ = std::move(c);
      }
      break;
    case DivisionRing::Kind::Rationals: s.v_ = mpq_class(static_cast<long>(v)); break;
    case DivisionRing::Kind::Quaternions:
      s.v_ = std::array<mpq_class, 4>{mpq_class(static_cast<long>(v)), 0, 0, 0};
      break;
  }
  return s;
}

Scalar Scalar::ff(const DivisionRing* r, long long v) {
  if (!r->finite()) fail(Err::PreconditionFailed, "ff literal on non-finite plugin");
  long long card = r->cardinality();
  v = mod_p(v, card);
  if (r->e == 1) return from_int(r, v);
  std::vector<long long> c(r->e, 0);
  for (int i = 0; i < r->e; ++i) {
    c[i] = v % r->p;
    v /= r->p;
  }
  return make_ffe(r, std::move(c));
}

Scalar Scalar::rat(mpq_class v) {
  Scalar s;
  s.ring_ = rationals();
  v.canonicalize();
  s.v_ = std::move(v);
  return s;
}

Scalar Scalar::quat(mpq_class a, mpq_class b, mpq_class c, mpq_class d) {
  Scalar s;
  s.ring_ = quaternions();
  a.canonicalize();
  b.canonicalize();
  c.canonicalize();
  d.canonicalize();
  s.v_ = std::array<mpq_class, 4>{std::move(a), std::move(b), std::move(c), std::move(d)};
  return s;
}

bool Scalar::is_zero() const {
  require(ring_ != nullptr, "scalar without plugin");
  switch (ring_->kind) {
    case DivisionRing::Kind::Finite:
      if (ring_->e == 1) return std::get<long long>(v_) == 0;
      for (long long c : std::get<std::vector<long long>>(v_))
        if (c != 0) return false;
      return true;
    case DivisionRing::Kind::Rationals: return std::get<mpq_class>(v_) == 0;
    case DivisionRing::Kind::Quaternions: {
      const auto& q = std::get<std::array<mpq_class, 4>>(v_);
      return q[0] == 0 && q[1] == 0 && q[2] == 0 && q[3] == 0;
    }
  }
  return false;
}

bool Scalar::is_one() const { return *this == one(ring_); }

Scalar Scalar::operator-() const {
  switch (ring_->kind) {
    case DivisionRing::Kind::Finite:
      if (ring_->e == 1) return from_int(ring_, -std::get<long long>(v_));
      else {
        auto c = std::get<std::vector<long long>>(v_);
        for (auto& x : c) x = mod_p(-x, ring_->p);
        return ff_raw(ring_, std::move(c));
      }
    case DivisionRing::Kind::Rationals: return rat(-std::get<mpq_class>(v_));
    case DivisionRing::Kind::Quaternions: {
      const auto& q = std::get<std::array<mpq_class, 4>>(v_);
      return quat(-q[0], -q[1], -q[2], -q[3]);
    }
  }
  return {};
}

Scalar Scalar::operator+(const Scalar& o) const {
  require(ring_ == o.ring_, "scalar plugin mismatch");
  switch (ring_->kind) {
    case DivisionRing::Kind::Finite:
      if (ring_->e == 1) return from_int(ring_, std::get<long long>(v_) + std::get<long long>(o.v_));
      else {
        auto a = std::get<std::vector<long long>>(v_);
        const auto& b = std::get<std::vector<long long>>(o.v_);
        for (int i = 0; i < ring_->e; ++i) a[i] = mod_p(a[i] + b[i], ring_->p);
        return ff_raw(ring_, std::move(a));
      }
    case DivisionRing::Kind::Rationals:
      return rat(std::get<mpq_class>(v_) + std::get<mpq_class>(o.v_));
    case DivisionRing::Kind::Quaternions: {
      const auto& a = std::get<std::array<mpq_class, 4>>(v_);
      const auto& b = std::get<std::array<mpq_class, 4>>(o.v_);
      return quat(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]);
    }
  }
  return {};
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
  require(ring_ == o.ring_, "scalar plugin mismatch");
  switch (ring_->kind) {
    case DivisionRing::Kind::Finite:
      if (ring_->e == 1) return from_int(ring_, std::get<long long>(v_) * std::get<long long>(o.v_));
      else {
        const auto& a = std::get<std::vector<long long>>(v_);
        const auto& b = std::get<std::vector<long long>>(o.v_);
        long long p = ring_->p;
        int e = ring_->e;
        std::vector<long long> c(2 * e - 1, 0);
        for (int i = 0; i < e; ++i)
          for (int j = 0; j < e; ++j) c[i + j] = mod_p(c[i + j] + a[i] * b[j], p);
        // fold x^i (i >= e) through x^e = -modulus tail
        for (int i = 2 * e - 2; i >= e; --i) {
          long long t = c[i];
          if (t == 0) continue;
          c[i] = 0;
          for (int j = 0; j < e; ++j) c[i - e + j] = mod_p(c[i - e + j] - t * ring_->modulus[j], p);
        }
        c.resize(e);
        return ff_raw(ring_, std::move(c));
      }
    case DivisionRing::Kind::Rationals:
      return rat(std::get<mpq_class>(v_) * std::get<mpq_class>(o.v_));
    case DivisionRing::Kind::Quaternions: {
      const auto& a = std::get<std::array<mpq_class, 4>>(v_);
      const auto& b = std::get<std::array<mpq_class, 4>>(o.v_);
      return quat(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
                  a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
                  a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
                  a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]);
    }
  }
  return {};
}

Scalar Scalar::inv() const {
  if (is_zero()) fail(Err::Singular, "inverse of zero scalar");
  switch (ring_->kind) {
    case DivisionRing::Kind::Finite:
      if (ring_->e == 1) return from_int(ring_, inv_mod_p(std::get<long long>(v_), ring_->p));
      else {
        // extended Euclid against the modulus; invariant r == s * this  (mod m)
        long long p = ring_->p;
        Poly m = ring_->modulus;
        m.resize(ring_->e, 0);
        m.push_back(1);
        Poly r0 = m, r1 = std::get<std::vector<long long>>(v_);
        ptrim(r1);
        Poly s0 = {}, s1 = {1};
        while (!r1.empty()) {
          auto [q, rem] = pdivmod(r0, r1, p);
          Poly s2 = psub(s0, pmul(q, s1, p), p);
          r0 = std::move(r1);
          r1 = std::move(rem);
          s0 = std::move(s1);
          s1 = std::move(s2);
        }
        require(pdeg(r0) == 0, "gcd with irreducible modulus not constant");
        long long c = inv_mod_p(r0[0], p);
        Poly u = pmul(s0, Poly{c}, p);
        u.resize(ring_->e, 0);
        return ff_raw(ring_, std::move(u));
      }
    case DivisionRing::Kind::Rationals: return rat(1 / std::get<mpq_class>(v_));
    case DivisionRing::Kind::Quaternions: {
      const auto& q = std::get<std::array<mpq_class, 4>>(v_);
      mpq_class n = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
      return quat(q[0] / n, -q[1] / n, -q[2] / n, -q[3] / n);
    }
  }
  return {};
}

int Scalar::cmp(const Scalar& o) const {
  require(ring_ == o.ring_, "scalar plugin mismatch");
  switch (ring_->kind) {
    case DivisionRing::Kind::Finite: {
      long long a = encode(), b = o.encode();
      return a < b ? -1 : a > b ? 1 : 0;
    }
    case DivisionRing::Kind::Rationals:
      return mpq_cmp(std::get<mpq_class>(v_).get_mpq_t(), std::get<mpq_class>(o.v_).get_mpq_t());
    case DivisionRing::Kind::Quaternions: {
      const auto& a = std::get<std::array<mpq_class, 4>>(v_);
      const auto& b = std::get<std::array<mpq_class, 4>>(o.v_);
      for (int i = 0; i < 4; ++i) {
        int c = mpq_cmp(a[i].get_mpq_t(), b[i].get_mpq_t());
        if (c != 0) return c;
      }
      return 0;
    }
  }
  return 0;
}

long long Scalar::encode() const {
  require(ring_->finite(), "encode on non-finite scalar");
  if (ring_->e == 1) return std::get<long long>(v_);
  const auto& c = std::get<std::vector<long long>>(v_);
  long long v = 0;
  for (int i = ring_->e - 1; i >= 0; --i) v = v * ring_->p + c[i];
  return v;
}

const mpq_class& Scalar::rational() const { return std::get<mpq_class>(v_); }
const std::array<mpq_class, 4>& Scalar::quaternion() const {
  return std::get<std::array<mpq_class, 4>>(v_);
}

Scalar Scalar::reduced_norm() const {
  switch (ring_->kind) {
    case DivisionRing::Kind::Rationals: return *this;
    case DivisionRing::Kind::Quaternions: {
      const auto& q = std::get<std::array<mpq_class, 4>>(v_);
      return rat(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    }
    case DivisionRing::Kind::Finite:
      fail(Err::PreconditionFailed, "reduced norm over finite plugin is not rational");
  }
  return {};
}

std::string Scalar::str() const {
  switch (ring_->kind) {
    case DivisionRing::Kind::Finite: return std::to_string(encode());
    case DivisionRing::Kind::Rationals: return std::get<mpq_class>(v_).get_str();
    case DivisionRing::Kind::Quaternions: {
      const auto& q = std::get<std::array<mpq_class, 4>>(v_);
      std::ostringstream os;
      os << "(" << q[0].get_str() << ", " << q[1].get_str() << ", " << q[2].get_str() << ", "
         << q[3].get_str() << ")";
      return os.str();
    }
  }
  return "?";
}

Scalar scalar_at(const DivisionRing* r, unsigned long long idx) {
  switch (r->kind) {
    case DivisionRing::Kind::Finite:
      return Scalar::ff(r, static_cast<long long>(idx % static_cast<unsigned long long>(r->cardinality())));
    case DivisionRing::Kind::Rationals: {
      if (idx == 0) return Scalar::zero(r);
      // Calkin-Wilf walk 1, 1/2, 2, 1/3, 3/2, ... interleaved with negatives.
      static std::vector<mpq_class> walk = {mpq_class(1)};
      unsigned long long pos = (idx - 1) / 2;
      while (walk.size() <= pos) {
        const mpq_class& q = walk.back();
        mpz_class fl = q.get_num() / q.get_den();  // floor for positive q
        mpq_class next = 1 / (2 * mpq_class(fl) - q + 1);
        next.canonicalize();
        walk.push_back(next);
      }
      mpq_class v = walk[pos];
      return Scalar::rat(idx % 2 == 1 ? v : -v);
    }
    case DivisionRing::Kind::Quaternions: {
      Scalar q = scalar_at(rationals(), idx);
      return Scalar::quat(q.rational(), 0, 0, 0);
    }
  }
  return {};
}

// --- UnitClass ---

UnitClass UnitClass::trivial(const DivisionRing* r) {
  UnitClass u;
  u.ring_ = r;
  u.nf_ = r->commutative() ? Scalar::one(r) : Scalar::one(rationals());
  return u;
}

UnitClass UnitClass::of_unit(const Scalar& u) {
  if (u.is_zero()) fail(Err::Singular, "unit class of zero");
  UnitClass c;
  c.ring_ = u.ring();
  c.nf_ = u.ring()->commutative() ? u : u.reduced_norm();
  return c;
}

bool UnitClass::is_trivial() const { return nf_.is_one(); }

UnitClass UnitClass::combine(const UnitClass& o) const {
  require(ring_ == o.ring_, "unit class plugin mismatch");
  UnitClass c;
  c.ring_ = ring_;
  c.nf_ = nf_ * o.nf_;
  return c;
}

UnitClass UnitClass::inverse() const {
  UnitClass c;
  c.ring_ = ring_;
  c.nf_ = nf_.inv();
  return c;
}

bool UnitClass::operator==(const UnitClass& o) const {
  require(ring_ == o.ring_, "unit class plugin mismatch");
  return nf_ == o.nf_;
}

std::string UnitClass::str() const {
  return ring_->commutative() ? nf_.str() : "nrd:" + nf_.str();
}

}  // namespace defk

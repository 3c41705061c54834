#pragma once

#include <gmpxx.h>

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "defk/error.hpp"

namespace defk {

// A division-ring plugin. Instances are interned: pointer equality is plugin
// equality. Supported plugins: GF(p^e), the rationals, and the rational
// quaternions.
struct DivisionRing {
  enum class Kind { Finite, Rationals, Quaternions };

  Kind kind;
  long long p = 0;                 // Finite
  int e = 1;                       // Finite
  std::vector<long long> modulus;  // Finite, e>1: x^e + sum modulus[i]*x^i

  bool finite() const { return kind == Kind::Finite; }
  bool commutative() const { return kind != Kind::Quaternions; }
  // p^e for finite plugins, 0 for the infinite ones.
  long long cardinality() const;
  std::string name() const;
};

const DivisionRing* finite_field(long long p, int e = 1);
const DivisionRing* rationals();
const DivisionRing* quaternions();
// Accepts the spelled forms "GF(5)", "GF(2,3)", "QQ", "HQ".
const DivisionRing* ring_by_name(const std::string& s);

// Exact scalar of one plugin. Finite-field elements of extension degree e>1
// are polynomial residues; their integer spelling is the base-p digit
// encoding value = sum c_i p^i of the coefficient vector.
class Scalar {
 public:
  Scalar() = default;

  static Scalar zero(const DivisionRing* r);
  static Scalar one(const DivisionRing* r);
  static Scalar from_int(const DivisionRing* r, long long v);
  // Finite fields: element with encoding value v (0 <= v < p^e).
  static Scalar ff(const DivisionRing* r, long long v);
  static Scalar rat(mpq_class v);
  static Scalar quat(mpq_class a, mpq_class b, mpq_class c, mpq_class d);

  const DivisionRing* ring() const { return ring_; }
  bool is_zero() const;
  bool is_one() const;

  Scalar operator-() const;
  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar inv() const;  // pre: nonzero

  bool operator==(const Scalar& o) const { return cmp(o) == 0; }
  bool operator!=(const Scalar& o) const { return cmp(o) != 0; }
  // Total order among scalars of one plugin (used for canonical containers).
  int cmp(const Scalar& o) const;

  // Finite fields only: the base-p encoding value.
  long long encode() const;
  const mpq_class& rational() const;
  const std::array<mpq_class, 4>& quaternion() const;

  // Reduced norm, as a rational scalar. Commutative plugins: the element
  // itself (rationals) / taken over to QQ is not defined there, so finite
  // fields are rejected. Quaternions: a^2+b^2+c^2+d^2.
  Scalar reduced_norm() const;

  std::string str() const;

 private:
  const DivisionRing* ring_ = nullptr;
  // Finite e=1: long long; finite e>1: coefficient vector (size e, low->high);
  // rationals: mpq_class; quaternions: (a,b,c,d).
  std::variant<long long, std::vector<long long>, mpq_class, std::array<mpq_class, 4>> v_;

  friend Scalar ff_raw(const DivisionRing*, std::vector<long long>);
};

// Deterministic injective enumeration of the plugin's scalars; for finite
// plugins the index wraps at p^e. Index 0 is always zero. Rationals follow
// the Calkin-Wilf walk interleaved with negatives; quaternions run along the
// rational line.
Scalar scalar_at(const DivisionRing* r, unsigned long long idx);

// An element of the abelianized unit group of one plugin, in normal form:
// commutative plugins store the unit itself, quaternions the positive
// reduced norm (the commutator subgroup is exactly the norm-one units).
class UnitClass {
 public:
  UnitClass() = default;

  static UnitClass trivial(const DivisionRing* r);
  static UnitClass of_unit(const Scalar& u);  // pre: u nonzero

  const DivisionRing* ring() const { return ring_; }
  bool is_trivial() const;
  UnitClass combine(const UnitClass& o) const;
  UnitClass inverse() const;
  bool operator==(const UnitClass& o) const;
  bool operator!=(const UnitClass& o) const { return !(*this == o); }

  std::string str() const;

 private:
  const DivisionRing* ring_ = nullptr;
  Scalar nf_;  // commutative: the unit; quaternions: rational norm
};

}  // namespace defk

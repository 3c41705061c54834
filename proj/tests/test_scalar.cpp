#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>
#include <string>

#include "defk/scalar.hpp"
#include "doctest.h"

using namespace defk;

TEST_CASE("prime field arithmetic") {
  const DivisionRing* f5 = finite_field(5);
  CHECK(f5->cardinality() == 5);
  CHECK(f5->name() == "GF(5)");
  CHECK(Scalar::from_int(f5, 2) * Scalar::from_int(f5, 3) == Scalar::one(f5));
  CHECK(Scalar::from_int(f5, 7) == Scalar::ff(f5, 2));
  CHECK(Scalar::from_int(f5, 2).inv() == Scalar::from_int(f5, 3));
  CHECK(-Scalar::one(f5) == Scalar::ff(f5, 4));
  CHECK((Scalar::ff(f5, 4) + Scalar::ff(f5, 3)).encode() == 2);

  const DivisionRing* f7 = finite_field(7);
  for (long long v = 1; v < 7; ++v)
    CHECK(Scalar::ff(f7, v) * Scalar::ff(f7, v).inv() == Scalar::one(f7));
}

TEST_CASE("characteristic must be prime and sizes are capped") {
  CHECK_THROWS_AS(finite_field(4), EngineError);
  CHECK_THROWS_AS(finite_field(6), EngineError);
  try {
    finite_field(4);
  } catch (const EngineError& e) {
    CHECK(e.code() == Err::PreconditionFailed);
  }
  try {
    finite_field(2, 50);
  } catch (const EngineError& e) {
    CHECK(e.code() == Err::SizeBound);
  }
}

TEST_CASE("extension fields pick the first irreducible modulus") {
  const DivisionRing* f8 = finite_field(2, 3);
  // x^3 + x + 1, the first irreducible cubic in counter order over GF(2)
  CHECK(f8->modulus == std::vector<long long>{1, 1, 0});
  CHECK(f8->cardinality() == 8);
  CHECK(f8->name() == "GF(2,3)");

  Scalar x = Scalar::ff(f8, 2);
  CHECK(x * x * x == Scalar::ff(f8, 3));  // x^3 = x + 1
  Scalar p = Scalar::one(f8);
  for (int i = 0; i < 7; ++i) p = p * x;
  CHECK(p == Scalar::one(f8));  // x generates the order-7 unit group

  for (long long v = 1; v < 8; ++v)
    CHECK(Scalar::ff(f8, v) * Scalar::ff(f8, v).inv() == Scalar::one(f8));

  CHECK(finite_field(2, 2)->modulus == std::vector<long long>{1, 1});  // x^2+x+1
  CHECK(finite_field(3, 2)->modulus == std::vector<long long>{1, 0});  // x^2+1
  Scalar y = Scalar::ff(finite_field(3, 2), 3);                        // y = x
  CHECK(y * y == Scalar::ff(finite_field(3, 2), 2));                   // x^2 = -1

  // encode round trip covers every element
  for (long long v = 0; v < 9; ++v) CHECK(Scalar::ff(finite_field(3, 2), v).encode() == v);
}

TEST_CASE("rational arithmetic is canonical") {
  const DivisionRing* q = rationals();
  CHECK(q->cardinality() == 0);
  CHECK(Scalar::rat(mpq_class(2, 4)).str() == "1/2");
  Scalar a = Scalar::rat(mpq_class(1, 2));
  Scalar b = Scalar::rat(mpq_class(1, 3));
  CHECK((a + b).str() == "5/6");
  CHECK((a + b).inv().str() == "6/5");
  CHECK((a - a).is_zero());
  CHECK(Scalar::from_int(q, -3).str() == "-3");
  CHECK_THROWS_AS(Scalar::zero(q).inv(), EngineError);
}

TEST_CASE("quaternion arithmetic") {
  Scalar i = Scalar::quat(0, 1, 0, 0);
  Scalar j = Scalar::quat(0, 0, 1, 0);
  Scalar k = Scalar::quat(0, 0, 0, 1);
  CHECK(i * j == k);
  CHECK(j * i == -k);
  CHECK(i * i == -Scalar::one(quaternions()));
  CHECK(j * k == i);
  CHECK(k * i == j);

  Scalar u = Scalar::quat(1, 0, mpq_class(-1, 2), 3);
  CHECK(u.reduced_norm() == Scalar::rat(mpq_class(41, 4)));
  CHECK(u * u.inv() == Scalar::one(quaternions()));
  CHECK(u.inv() * u == Scalar::one(quaternions()));
  CHECK(u.str() == "(1, 0, -1/2, 3)");
}

TEST_CASE("plugins are interned and named") {
  CHECK(ring_by_name("GF(5)") == finite_field(5));
  CHECK(ring_by_name("GF(2,3)") == finite_field(2, 3));
  CHECK(ring_by_name("QQ") == rationals());
  CHECK(ring_by_name("HQ") == quaternions());
  CHECK_THROWS_AS(ring_by_name("ZZ"), EngineError);
  CHECK_THROWS_AS(ring_by_name("GF(x)"), EngineError);
}

TEST_CASE("scalar streams are deterministic and injective") {
  const DivisionRing* f5 = finite_field(5);
  for (long long v = 0; v < 5; ++v) CHECK(scalar_at(f5, v) == Scalar::ff(f5, v));
  CHECK(scalar_at(f5, 5) == Scalar::zero(f5));  // wraps

  const DivisionRing* q = rationals();
  CHECK(scalar_at(q, 0).is_zero());
  CHECK(scalar_at(q, 1) == Scalar::from_int(q, 1));
  CHECK(scalar_at(q, 2) == Scalar::from_int(q, -1));
  CHECK(scalar_at(q, 3) == Scalar::rat(mpq_class(1, 2)));
  CHECK(scalar_at(q, 4) == Scalar::rat(mpq_class(-1, 2)));
  CHECK(scalar_at(q, 5) == Scalar::from_int(q, 2));
  CHECK(scalar_at(q, 7) == Scalar::rat(mpq_class(1, 3)));

  std::set<std::string> seen;
  for (unsigned long long n = 0; n < 50; ++n) seen.insert(scalar_at(q, n).str());
  CHECK(seen.size() == 50);

  CHECK(scalar_at(quaternions(), 3) == Scalar::quat(mpq_class(1, 2), 0, 0, 0));
}

TEST_CASE("unit classes: commutative normal form is the unit itself") {
  const DivisionRing* f5 = finite_field(5);
  UnitClass two = UnitClass::of_unit(Scalar::ff(f5, 2));
  UnitClass three = UnitClass::of_unit(Scalar::ff(f5, 3));
  CHECK(two.combine(three) == UnitClass::trivial(f5));
  CHECK(two.inverse() == three);
  CHECK(two != three);
  CHECK(two.str() == "2");
  CHECK_THROWS_AS(UnitClass::of_unit(Scalar::zero(f5)), EngineError);

  CHECK(UnitClass::of_unit(Scalar::from_int(rationals(), -2)).str() == "-2");
}

TEST_CASE("unit classes: quaternion normal form is the reduced norm") {
  Scalar i = Scalar::quat(0, 1, 0, 0);
  CHECK(UnitClass::of_unit(i) == UnitClass::trivial(quaternions()));
  UnitClass c = UnitClass::of_unit(Scalar::quat(1, 1, 0, 0));
  CHECK(c.str() == "nrd:2");
  CHECK(c.combine(c).str() == "nrd:4");
  CHECK(c.combine(c.inverse()) == UnitClass::trivial(quaternions()));
}

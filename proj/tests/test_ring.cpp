#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "defk/ring.hpp"
#include "doctest.h"

using namespace defk;

namespace {

RingPtr sample_ring() {
  return RingDescriptor::make({{2, finite_field(5)}, {1, rationals()}});
}

RingElement random_element(const RingPtr& s, std::mt19937_64& rng) {
  RingElement x = RingElement::zero(s);
  for (int i = 0; i < s->k(); ++i)
    for (auto& v : x.comps[i].a) {
      const DivisionRing* d = s->comp(i).div;
      v = d->finite() ? Scalar::ff(d, static_cast<long long>(rng() % d->cardinality()))
                      : Scalar::from_int(d, static_cast<long long>(rng() % 7) - 3);
    }
  return x;
}

}  // namespace

TEST_CASE("descriptors") {
  RingPtr s = sample_ring();
  CHECK(s->k() == 2);
  CHECK(s->name() == "M(2, GF(5)) x M(1, QQ)");
  CHECK(same_ring(s, RingDescriptor::make({{2, finite_field(5)}, {1, rationals()}})));
  CHECK(!same_ring(s, RingDescriptor::make({{1, finite_field(5)}})));
  CHECK_THROWS_AS(RingDescriptor::make({}), EngineError);
  CHECK_THROWS_AS(RingDescriptor::make({{0, rationals()}}), EngineError);
}

TEST_CASE("componentwise arithmetic and units") {
  RingPtr s = sample_ring();
  RingElement one = RingElement::one(s);
  RingElement zero = RingElement::zero(s);
  CHECK(one.is_unit());
  CHECK(!zero.is_unit());
  CHECK(one + zero == one);
  CHECK(one * one == one);

  // unit iff every component is invertible
  RingElement x = one;
  x.comps[0] = Mat::from_ints(finite_field(5), {{1, 1}, {1, 1}});
  CHECK(!x.is_unit());
  x.comps[0] = Mat::from_ints(finite_field(5), {{0, 1}, {1, 0}});
  CHECK(x.is_unit());
  RingElement xi = *x.invert();
  CHECK(x * xi == one);
  CHECK(xi * x == one);

  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 20; ++iter) {
    RingElement a = random_element(s, rng), b = random_element(s, rng), c = random_element(s, rng);
    CHECK((a + b) * c == a * c + b * c);
    CHECK(c * (a + b) == c * a + c * b);
  }
}

TEST_CASE("idempotent decomposition") {
  RingPtr s = sample_ring();
  std::mt19937_64 rng(29);
  RingElement x = random_element(s, rng);
  auto parts = ring_decompose(x);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].comps[1].is_zero());
  CHECK(parts[1].comps[0].is_zero());
  CHECK(parts[0] + parts[1] == x);

  RingPtr s1 = RingDescriptor::make({{1, rationals()}});
  RingElement y = RingElement::one(s1);
  CHECK(ring_decompose(y).size() == 1);
  CHECK(ring_decompose(y)[0] == y);
}

TEST_CASE("matrices over S flatten blockwise") {
  RingPtr s = sample_ring();
  std::mt19937_64 rng(31);

  std::vector<std::vector<RingElement>> rows(2);
  for (auto& row : rows)
    for (int b = 0; b < 2; ++b) row.push_back(random_element(s, rng));
  SMat m = SMat::from_elements(s, rows);
  CHECK(m.flat[0].rows == 4);  // component q = 2 flattens 2x2 -> 4x4
  CHECK(m.flat[1].rows == 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(m.entry(a, b) == rows[a][b]);

  // product of S-matrices = product of flats (the GL identification)
  SMat i2 = SMat::identity(s, 2);
  CHECK(m * i2 == m);
  std::vector<std::vector<RingElement>> rows2(2);
  for (auto& row : rows2)
    for (int b = 0; b < 2; ++b) row.push_back(random_element(s, rng));
  SMat m2 = SMat::from_elements(s, rows2);
  SMat prod = m * m2;
  for (int i = 0; i < s->k(); ++i) CHECK(prod.flat[i] == m.flat[i] * m2.flat[i]);

  if (m.is_invertible()) {
    SMat mi = *m.invert();
    CHECK(m * mi == i2);
    CHECK(mi * m == i2);
  }
}

TEST_CASE("blocked ring reinterpretation") {
  RingPtr r = RingDescriptor::make({{1, finite_field(5)}});
  RingPtr m2 = morita_ring(r, 2);
  CHECK(m2->name() == "M(2, GF(5))");
  CHECK_THROWS_AS(morita_ring(m2, 2), EngineError);
  CHECK_THROWS_AS(morita_ring(sample_ring(), 2), EngineError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "defk/defset.hpp"

using namespace defk;

namespace {

ModulePtr f5_omega() {
  static ModulePtr m =
      ModuleDescriptor::make(RingDescriptor::make({{1, finite_field(5)}}), {kOmega});
  return m;
}

ModulePtr qq_rank1() {
  static ModulePtr m = ModuleDescriptor::make(RingDescriptor::make({{1, rationals()}}), {1});
  return m;
}

ModulePtr f5_rank1() {
  static ModulePtr m = ModuleDescriptor::make(RingDescriptor::make({{1, finite_field(5)}}), {1});
  return m;
}

Vector vec_at(const ModulePtr& m, int n, long idx, std::vector<long long> row) {
  Vector v = Vector::zero(m, n);
  v.set_slice(0, idx, Mat::from_ints(m->ring()->comp(0).div, {row}));
  return v;
}

PPSet line(const ModulePtr& m, std::vector<long long> dir, const Vector& through) {
  return PPSet::coset(
      PPSubgroup::span(m, static_cast<int>(dir.size()),
                       {Mat::from_ints(m->ring()->comp(0).div, {dir})}),
      through);
}

K0Class k0_term(std::vector<long> e, long c) {
  return K0Class::monomial(Colour::of(std::move(e)), mpz_class(c));
}

}  // namespace

TEST_CASE("block construction canonicalizes holes") {
  auto m = f5_omega();
  PPSet amb = PPSet::full(m, 1);
  PPSet origin = PPSet::point(Vector::zero(m, 1));

  auto b = make_block(amb, {origin, origin, PPSet::empty_set(m, 1)});
  REQUIRE(b.has_value());
  CHECK(b->holes.size() == 1);
  CHECK(b->holes[0] == origin);
  CHECK_FALSE(b->contains(Vector::zero(m, 1)));
  CHECK(b->contains(vec_at(m, 1, 0, {1})));
  CHECK(b->contains(vec_at(m, 1, 7, {3})));

  // a hole that swallows the ambient kills the block
  CHECK_FALSE(make_block(amb, {amb}).has_value());
  CHECK_FALSE(make_block(PPSet::empty_set(m, 1), {}).has_value());

  // nested holes: only the maximal one is kept
  PPSet l = line(m, {1, 0}, Vector::zero(m, 2));
  auto b2 = make_block(PPSet::full(m, 2), {l, PPSet::point(Vector::zero(m, 2))});
  REQUIRE(b2.has_value());
  CHECK(b2->holes.size() == 1);
  CHECK(b2->holes[0] == l);
}

TEST_CASE("finite modules: holes can cover a coset jointly") {
  auto m = f5_rank1();
  PPSet amb = PPSet::full(m, 1);
  std::vector<PPSet> allPts;
  for (long long v = 0; v < 5; ++v) allPts.push_back(PPSet::point(vec_at(m, 1, 0, {v})));

  auto covered = make_block(amb, allPts);
  CHECK_FALSE(covered.has_value());

  auto nearly = make_block(amb, {allPts[0], allPts[1], allPts[2], allPts[3]});
  REQUIRE(nearly.has_value());
  CHECK(find_point(DefinableSet{m, 1, {*nearly}}) == vec_at(m, 1, 0, {4}));
}

TEST_CASE("enumerate_ppset lists coset points in a fixed order") {
  auto m = f5_rank1();
  auto pts = enumerate_ppset(PPSet::full(m, 1), 100);
  REQUIRE(pts.size() == 5);
  CHECK(pts[0] == Vector::zero(m, 1));
  CHECK(pts[1] == vec_at(m, 1, 0, {1}));
  CHECK(pts[4] == vec_at(m, 1, 0, {4}));

  // a line in M^2 has 5 points
  auto lp = enumerate_ppset(line(m, {1, 3}, Vector::zero(m, 2)), 100);
  CHECK(lp.size() == 5);
  for (const auto& x : lp) CHECK(line(m, {1, 3}, Vector::zero(m, 2)).contains(x));

  CHECK_THROWS_AS(enumerate_ppset(PPSet::full(m, 10), 100), EngineError);
  CHECK_THROWS_AS(enumerate_ppset(PPSet::full(f5_omega(), 1), 100), EngineError);
}

TEST_CASE("normalize splits overlapping cosets") {
  auto m = f5_omega();
  Vector zero2 = Vector::zero(m, 2);
  PPSet l1 = line(m, {1, 0}, zero2);
  PPSet l2 = line(m, {0, 1}, zero2);

  DefinableSet d = normalize(m, 2, {Block{l1, {}}, Block{l2, {}}});
  REQUIRE(d.blocks.size() == 2);
  CHECK(d.blocks[0].ambient == l1);
  CHECK(d.blocks[0].holes.empty());
  CHECK(d.blocks[1].ambient == l2);
  REQUIRE(d.blocks[1].holes.size() == 1);
  CHECK(d.blocks[1].holes[0] == PPSet::point(zero2));

  // membership is preserved and the pieces are disjoint
  std::vector<Vector> samples = {zero2,
                                 vec_at(m, 2, 0, {3, 0}),
                                 vec_at(m, 2, 0, {0, 2}),
                                 vec_at(m, 2, 0, {1, 1}),
                                 vec_at(m, 2, 4, {2, 0})};
  for (const auto& x : samples) {
    bool in = l1.contains(x) || l2.contains(x);
    CHECK(d.contains(x) == in);
    int hits = 0;
    for (const auto& b : d.blocks) hits += b.contains(x) ? 1 : 0;
    CHECK(hits == (in ? 1 : 0));
  }

  CHECK(k0_class(d) == k0_term({1}, 2) - k0_term({0}, 1));

  // a single block normalizes to itself
  DefinableSet single = normalize(m, 2, {Block{l1, {PPSet::point(zero2)}}});
  REQUIRE(single.blocks.size() == 1);
  CHECK(single.blocks[0].ambient == l1);
  CHECK(single.blocks[0].holes.size() == 1);
}

TEST_CASE("dimension vectors") {
  auto m = f5_omega();
  CHECK(dim_of(DefinableSet::empty_set(m, 2)) == Colour::bot());
  CHECK(dim_of(DefinableSet::of_ppset(PPSet::point(Vector::zero(m, 2)))) == Colour::of({0}));
  CHECK(dim_of(DefinableSet::full(m, 2)) == Colour::of({2}));

  auto s2 = RingDescriptor::make({{1, finite_field(5)}, {1, rationals()}});
  auto m2 = ModuleDescriptor::make(s2, {kOmega, kOmega});
  CHECK(dim_of(DefinableSet::full(m2, 2)) == Colour::of({2, 2}));

  // max is taken per component across blocks
  PPSet st10 = PPSet::standard(m2, 1, {1, 0});
  PPSet st01 = PPSet::standard(m2, 1, {0, 1});
  DefinableSet mix = normalize(m2, 1, {Block{st10, {}}, Block{st01, {}}});
  CHECK(dim_of(mix) == Colour::of({1, 1}));
}

TEST_CASE("K0 classes: frozen polynomials and ring laws") {
  auto m = f5_omega();
  CHECK(k0_class(DefinableSet::full(m, 2)) == k0_term({2}, 1));
  CHECK(k0_class(DefinableSet::empty_set(m, 2)).is_zero());

  // M minus a point
  DefinableSet punctured{m, 1, {*make_block(PPSet::full(m, 1),
                                            {PPSet::point(Vector::zero(m, 1))})}};
  K0Class xm1 = k0_class(punctured);
  CHECK(xm1 == k0_term({1}, 1) - k0_term({0}, 1));
  CHECK(xm1.str() == "X^1 - 1");
  CHECK(xm1.degree() == Colour::of({1}));
  CHECK(dim_of(punctured) == xm1.degree());

  // eval: over a rank-r truncation, X = 5^r counts points
  CHECK(xm1.eval({mpz_class(5)}) == 4);
  CHECK(xm1.eval({mpz_class(25)}) == 24);

  // additivity over disjoint union, multiplicativity over products
  Vector zero2 = Vector::zero(m, 2);
  DefinableSet l1 = DefinableSet::of_ppset(line(m, {1, 0}, zero2));
  DefinableSet l2 = DefinableSet::of_ppset(line(m, {0, 1}, zero2));
  DefinableSet uni = ds_union(l1, l2);
  DefinableSet inter = ds_intersect(l1, l2);
  CHECK(k0_class(uni) + k0_class(inter) == k0_class(l1) + k0_class(l2));

  DefinableSet prod = ds_product(punctured, punctured);
  CHECK(k0_class(prod) == xm1 * xm1);
  CHECK(k0_class(prod).str() == "X^2 - 2*X^1 + 1");
  CHECK(dim_of(prod) == Colour::of({2}));

  // finite component modules have no K0 class here
  CHECK_THROWS_AS(k0_class(DefinableSet::full(f5_rank1(), 1)), EngineError);
}

TEST_CASE("set algebra preserves membership") {
  auto m = f5_omega();
  Vector zero2 = Vector::zero(m, 2);
  PPSet l1 = line(m, {1, 0}, zero2);
  PPSet l2 = line(m, {0, 1}, zero2);
  DefinableSet d1 = ds_union(DefinableSet::of_ppset(l1), DefinableSet::of_ppset(l2));
  DefinableSet d2 = DefinableSet::of_ppset(l2);

  DefinableSet diff = ds_minus(d1, d2);
  DefinableSet inter = ds_intersect(d1, d2);

  std::vector<Vector> samples = {zero2,
                                 vec_at(m, 2, 0, {3, 0}),
                                 vec_at(m, 2, 0, {0, 2}),
                                 vec_at(m, 2, 3, {0, 1}),
                                 vec_at(m, 2, 0, {1, 1})};
  for (const auto& x : samples) {
    CHECK(diff.contains(x) == (d1.contains(x) && !d2.contains(x)));
    CHECK(inter.contains(x) == (d1.contains(x) && d2.contains(x)));
  }

  DefinableSet prod = ds_product(d2, d2);
  CHECK(prod.n == 4);
  CHECK(prod.contains(vec_at(m, 4, 0, {0, 2, 0, 3})));
  CHECK_FALSE(prod.contains(vec_at(m, 4, 0, {1, 2, 0, 3})));
}

TEST_CASE("find_point escapes holes") {
  auto m = f5_omega();

  CHECK(find_point(DefinableSet::full(m, 1)).is_zero());
  CHECK_THROWS_AS(find_point(DefinableSet::empty_set(m, 1)), EngineError);

  // M minus the origin: the first basis vector
  DefinableSet punctured{m, 1, {*make_block(PPSet::full(m, 1),
                                            {PPSet::point(Vector::zero(m, 1))})}};
  Vector e1 = Vector::zero(m, 1);
  e1.set_slice(0, 0, Mat::from_ints(finite_field(5), {{1}}));
  CHECK(find_point(punctured) == e1);

  // a coset minus two parallel subcosets, escape through a fresh index
  Vector zero2 = Vector::zero(m, 2);
  PPSet plane = PPSet::full(m, 2);
  DefinableSet holey{m, 2, {*make_block(plane, {line(m, {1, 0}, zero2),
                                                line(m, {0, 1}, zero2),
                                                line(m, {1, 1}, zero2)})}};
  Vector w = find_point(holey);
  CHECK(holey.contains(w));

  // finite rank over an infinite plugin: scalar-stream escape
  auto q1 = qq_rank1();
  std::vector<PPSet> pts;
  for (long long v : {0, 1, 2})
    pts.push_back(PPSet::point(vec_at(q1, 1, 0, {v})));
  DefinableSet gaps{q1, 1, {*make_block(PPSet::full(q1, 1), pts)}};
  CHECK(find_point(gaps) == vec_at(q1, 1, 0, {-1}));
}

TEST_CASE("blocks with equal ambient always intersect") {
  auto m = f5_omega();
  Vector zero2 = Vector::zero(m, 2);
  PPSet amb = PPSet::full(m, 2);
  Block b1 = *make_block(amb, {line(m, {1, 0}, zero2)});
  Block b2 = *make_block(amb, {line(m, {0, 1}, zero2), line(m, {1, 2}, zero2)});

  DefinableSet inter = ds_intersect(DefinableSet{m, 2, {b1}}, DefinableSet{m, 2, {b2}});
  REQUIRE_FALSE(inter.is_empty());
  Vector w = find_point(inter);
  CHECK(b1.contains(w));
  CHECK(b2.contains(w));
}

TEST_CASE("tuple blocking of definable sets") {
  auto m = f5_omega();
  Vector zero2 = Vector::zero(m, 2);
  DefinableSet d{m, 2, {*make_block(PPSet::full(m, 2), {line(m, {1, 3}, zero2)})}};
  DefinableSet md = morita_defset(d, 2);
  CHECK(md.n == 1);
  CHECK(md.mod->ring()->comp(0).q == 2);

  Vector inside = vec_at(m, 2, 0, {0, 1});   // not on the removed line
  Vector onLine = vec_at(m, 2, 0, {2, 1});   // 2*(1,3) = (2,1)
  CHECK(d.contains(inside));
  CHECK_FALSE(d.contains(onLine));
  CHECK(md.contains(morita_vector(inside, 2)));
  CHECK_FALSE(md.contains(morita_vector(onLine, 2)));

  CHECK_THROWS_AS(morita_defset(DefinableSet::full(m, 3), 2), EngineError);
}

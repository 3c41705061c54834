#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "defk/oracle.hpp"

using namespace defk;

namespace {

ModulePtr f3_fin(long rank = 1) {
  return ModuleDescriptor::make(RingDescriptor::make({{1, finite_field(3)}}), {rank});
}

ModulePtr f5_omega() {
  static ModulePtr m =
      ModuleDescriptor::make(RingDescriptor::make({{1, finite_field(5)}}), {kOmega});
  return m;
}

Vector vec_at(const ModulePtr& m, int n, long idx, std::vector<long long> row) {
  Vector v = Vector::zero(m, n);
  v.set_slice(0, idx, Mat::from_ints(m->ring()->comp(0).div, {row}));
  return v;
}

Block blk(const PPSet& amb, std::vector<PPSet> holes = {}) {
  auto b = make_block(amb, std::move(holes));
  REQUIRE(b.has_value());
  return *b;
}

// permutation of d given by point -> point charts; identity off the listed points
PiecewiseAffineBijection perm_map(const DefinableSet& d,
                                  const std::vector<std::pair<Vector, Vector>>& moves) {
  const ModulePtr& m = d.mod;
  Vector z = Vector::zero(m, d.n);
  SMat id = SMat::identity(m->ring(), d.n);
  std::vector<AffinePiece> pieces;
  DefinableSet rest = d;
  for (const auto& [from, to] : moves) {
    pieces.push_back(make_piece(blk(PPSet::point(from)), z, id, to - from));
    rest = ds_minus(rest, DefinableSet::of_ppset(PPSet::point(from)));
  }
  for (const auto& b : rest.blocks) pieces.push_back(make_piece(b, z, id, z));
  return make_bijection(d, d, std::move(pieces));
}

}  // namespace

TEST_CASE("finite structures: carrier enumeration and size gates") {
  FiniteStructure s = FiniteStructure::make(f3_fin());
  CHECK(s.size() == 3);

  CHECK_THROWS_WITH_AS(FiniteStructure::make(f5_omega()),
                       doctest::Contains("finite"), EngineError);
  // a one-element carrier cannot even be written down: ranks start at 1,
  // so every finite module has at least |R| >= 2 elements
  CHECK_THROWS_WITH_AS(f3_fin(0), doctest::Contains("rank must be"), EngineError);
}

TEST_CASE("brute-force k1 chain over GF(3)") {
  FiniteStructure s = FiniteStructure::make(f3_fin());

  BruteK1Report r1 = brute_k1_finite(s, 1);
  CHECK(r1.stages.size() == 2);  // sets of sizes 2 and 3
  CHECK(r1.stages[0].group_order == 2);
  CHECK(r1.stages[0].commutator_order == 1);
  CHECK(r1.stages[1].group_order == 6);
  CHECK(r1.stages[1].commutator_order == 3);
  CHECK(r1.stabilized);
  CHECK(r1.value == GroupDescriptor::cyclic(2));

  BruteK1Report r2 = brute_k1_finite(s, 2);
  CHECK(r2.stages.size() == 8);  // sizes 2 .. 9
  for (const auto& st : r2.stages) CHECK(st.ab == GroupDescriptor::cyclic(2));
  CHECK(r2.stages.back().group_order == 362880);
  CHECK(r2.stages.back().commutator_order == 181440);
  CHECK(r2.stabilized);
  CHECK(r2.value == GroupDescriptor::cyclic(2));
  CHECK(r2.str().find("stabilized at Z2") != std::string::npos);
}

TEST_CASE("brute-force k1 chain: bounds") {
  ModulePtr m4 = ModuleDescriptor::make(RingDescriptor::make({{1, finite_field(2)}}), {2});
  FiniteStructure s4 = FiniteStructure::make(m4);
  CHECK(s4.size() == 4);
  CHECK(brute_k1_finite(s4, 1).value == GroupDescriptor::cyclic(2));
  CHECK_THROWS_WITH_AS(brute_k1_finite(s4, 2), doctest::Contains("size bound"),
                       EngineError);

  ModulePtr m5 = ModuleDescriptor::make(RingDescriptor::make({{1, finite_field(5)}}), {1});
  CHECK_THROWS_WITH_AS(brute_k1_finite(FiniteStructure::make(m5), 1),
                       doctest::Contains("between 2 and 4"), EngineError);
  CHECK_THROWS_WITH_AS(brute_k1_finite(s4, 0), doctest::Contains("1 or 2"), EngineError);

  ModulePtr m2 = ModuleDescriptor::make(RingDescriptor::make({{1, finite_field(2)}}), {1});
  BruteK1Report r = brute_k1_finite(FiniteStructure::make(m2), 2);
  CHECK(r.stages.size() == 3);  // sizes 2, 3, 4
  CHECK(r.stabilized);
}

TEST_CASE("set enumeration over finite modules") {
  ModulePtr m = f3_fin(1);
  CHECK(enumerate_set(DefinableSet::full(m, 1)).size() == 3);
  CHECK(enumerate_set(DefinableSet::full(m, 2)).size() == 9);

  PPSet u = PPSet::standard(m, 2, {1});
  CHECK(enumerate_set(DefinableSet::of_ppset(u)).size() == 3);
  DefinableSet punctured{m, 2, {blk(u, {PPSet::point(Vector::zero(m, 2))})}};
  CHECK(enumerate_set(punctured).size() == 2);

  // zero-dimensional sets enumerate even over an infinite module
  const auto& mw = f5_omega();
  DefinableSet pts = ds_union(
      DefinableSet::of_ppset(PPSet::point(vec_at(mw, 1, 0, {1}))),
      DefinableSet::of_ppset(PPSet::point(vec_at(mw, 1, 3, {2}))));
  CHECK(enumerate_set(pts).size() == 2);
  CHECK_THROWS_WITH_AS(enumerate_set(DefinableSet::full(mw, 1)),
                       doctest::Contains("too large"), EngineError);
}

TEST_CASE("counting agrees with the k0 polynomial on finite restrictions") {
  ModulePtr m =
      ModuleDescriptor::make(RingDescriptor::make({{1, finite_field(3)}}), {kOmega});
  CHECK(check_counts(DefinableSet::full(m, 2), {1}).agree);  // 3^2

  PPSet u = PPSet::standard(m, 2, {1});
  CHECK(check_counts(DefinableSet::of_ppset(u), {1}).agree);  // 3
  CHECK(check_counts(DefinableSet::of_ppset(u), {2}).agree);  // 9: colour 1 at rank 2
  DefinableSet plane_minus_line =
      ds_minus(DefinableSet::full(m, 2), DefinableSet::of_ppset(u));
  AgreementReport r = check_counts(plane_minus_line, {1});  // 9 - 3
  CHECK(r.agree);
  CHECK(r.detail.find("6") != std::string::npos);

  // overlapping union, counted by inclusion-exclusion
  PPSet diag = PPSet::coset(
      PPSubgroup::span(m, 2, {Mat::from_ints(finite_field(3), {{1, 1}})}),
      Vector::zero(m, 2));
  DefinableSet uni =
      ds_union(DefinableSet::of_ppset(u), DefinableSet::of_ppset(diag));
  CHECK(check_counts(uni, {1}).agree);  // 3 + 3 - 1
  CHECK(check_counts(uni, {2}).agree);

  // a product ring restriction
  ModulePtr mm = ModuleDescriptor::make(
      RingDescriptor::make({{1, finite_field(2)}, {1, finite_field(3)}}),
      {kOmega, kOmega});
  CHECK(check_counts(DefinableSet::full(mm, 1), {1, 1}).agree);  // 2 * 3
  CHECK(check_counts(DefinableSet::full(mm, 2), {2, 1}).agree);  // 4^2 * 3^2

  // truncation refusals
  CHECK_THROWS_WITH_AS(check_counts(DefinableSet::full(m, 1), {kOmega}),
                       doctest::Contains("finite"), EngineError);
  CHECK_THROWS_WITH_AS(check_counts(DefinableSet::full(mm, 1), {1}),
                       doctest::Contains("one rank per"), EngineError);
  DefinableSet far_point =
      DefinableSet::of_ppset(PPSet::point(vec_at(m, 1, 5, {1})));
  CHECK_THROWS_WITH_AS(check_counts(far_point, {2}),
                       doctest::Contains("beyond the restricted rank"), EngineError);
  CHECK(check_counts(far_point, {6}).agree);
}

TEST_CASE("permutation extraction and parity") {
  ModulePtr m = f3_fin(1);
  DefinableSet d = DefinableSet::full(m, 1);
  Vector z = Vector::zero(m, 1);
  Vector e = vec_at(m, 1, 0, {1});
  Vector e2 = vec_at(m, 1, 0, {2});

  // x -> x + e is a 3-cycle on the three points: even
  auto shift = make_bijection(
      d, d, {make_piece(blk(PPSet::full(m, 1)), z, SMat::identity(m->ring(), 1), e)});
  std::vector<long> p = enumerate_perm(shift);
  CHECK(p.size() == 3);
  CHECK(permutation_parity(p) == 1 - 1);

  // a transposition is odd
  auto swap01 = perm_map(d, {{z, e}, {e, z}});
  CHECK(permutation_parity(enumerate_perm(swap01)) == 1);
  CHECK(check_support(swap01).agree);

  // identity has empty support
  CHECK(check_support(identity_map(d)).agree);
  CHECK(permutation_parity(enumerate_perm(identity_map(d))) == 0);
}

TEST_CASE("engine sign agrees with enumerated parity on point clouds") {
  const auto& m = f5_omega();
  std::vector<Vector> q;
  for (long i = 0; i < 4; ++i) q.push_back(vec_at(m, 1, i, {1}));
  DefinableSet d = DefinableSet::empty_set(m, 1);
  for (const auto& v : q) d = ds_union(d, DefinableSet::of_ppset(PPSet::point(v)));

  auto transposition = perm_map(d, {{q[0], q[1]}, {q[1], q[0]}});
  AgreementReport r1 = check_sign(transposition);
  CHECK(r1.agree);

  auto three_cycle = perm_map(d, {{q[0], q[1]}, {q[1], q[2]}, {q[2], q[0]}});
  CHECK(permutation_parity(enumerate_perm(three_cycle)) == 0);
  CHECK(check_sign(three_cycle).agree);
  CHECK(check_support(three_cycle).agree);

  auto four_cycle = perm_map(d, {{q[0], q[1]}, {q[1], q[2]}, {q[2], q[3]}, {q[3], q[0]}});
  CHECK(permutation_parity(enumerate_perm(four_cycle)) == 1);
  CHECK(check_sign(four_cycle).agree);

  auto double_swap = perm_map(d, {{q[0], q[1]}, {q[1], q[0]}, {q[2], q[3]}, {q[3], q[2]}});
  CHECK(permutation_parity(enumerate_perm(double_swap)) == 0);
  CHECK(check_sign(double_swap).agree);
}

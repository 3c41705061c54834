#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <optional>
#include <random>

#include "defk/matrix.hpp"
#include "doctest.h"

using namespace defk;

namespace {

Mat random_mat(const DivisionRing* r, int rows, int cols, std::mt19937_64& rng) {
  Mat m = Mat::zero(r, rows, cols);
  for (auto& v : m.a) {
    if (r->finite())
      v = Scalar::ff(r, static_cast<long long>(rng() % r->cardinality()));
    else
      v = Scalar::from_int(r, static_cast<long long>(rng() % 7) - 3);
  }
  return m;
}

// Laplace expansion, commutative plugins only; the reference the fast path
// must agree with.
Scalar cofactor_det(const Mat& m) {
  if (m.rows == 0) return Scalar::one(m.ring);
  if (m.rows == 1) return m.at(0, 0);
  Scalar acc = Scalar::zero(m.ring);
  for (int j = 0; j < m.cols; ++j) {
    if (m.at(0, j).is_zero()) continue;
    Mat minor = Mat::zero(m.ring, m.rows - 1, m.cols - 1);
    for (int i = 1; i < m.rows; ++i)
      for (int c = 0, t = 0; c < m.cols; ++c)
        if (c != j) minor.at(i - 1, t++) = m.at(i, c);
    Scalar term = m.at(0, j) * cofactor_det(minor);
    acc = j % 2 == 0 ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace

TEST_CASE("shape helpers") {
  const DivisionRing* f5 = finite_field(5);
  Mat a = Mat::from_ints(f5, {{1, 2}, {3, 4}});
  Mat i2 = Mat::identity(f5, 2);
  CHECK(a * i2 == a);
  CHECK(i2 * a == a);
  CHECK(a - a == Mat::zero(f5, 2, 2));
  CHECK(hcat(a, i2).cols == 4);
  CHECK(vcat(a, i2).rows == 4);
  CHECK(block_diag(a, i2).at(2, 2) == Scalar::one(f5));
  CHECK(block_diag(a, i2).at(2, 0).is_zero());
  CHECK(a.row(1) == Mat::from_ints(f5, {{3, 4}}));
  CHECK(a.str() == "[[1, 2], [3, 4]]");
  CHECK(scalar_mul(Scalar::ff(f5, 2), a) == Mat::from_ints(f5, {{2, 4}, {6, 8}}));
}

TEST_CASE("rref tracks its row operations") {
  std::mt19937_64 rng(7);
  for (const DivisionRing* r : {finite_field(5), finite_field(2, 2), rationals()}) {
    for (int iter = 0; iter < 30; ++iter) {
      Mat m = random_mat(r, 3, 4, rng);
      RrefResult res = rref(m);
      CHECK(res.t * m == res.r);
      for (size_t j = 0; j + 1 < res.pivots.size(); ++j) CHECK(res.pivots[j] < res.pivots[j + 1]);
      for (size_t j = 0; j < res.pivots.size(); ++j) {
        for (int i = 0; i < res.r.rows; ++i) {
          const Scalar& v = res.r.at(i, res.pivots[j]);
          if (i == static_cast<int>(j))
            CHECK(v.is_one());
          else
            CHECK(v.is_zero());
        }
      }
    }
  }
}

TEST_CASE("inverse") {
  const DivisionRing* f5 = finite_field(5);
  CHECK(*mat_invert(Mat::from_ints(f5, {{2}})) == Mat::from_ints(f5, {{3}}));
  CHECK(!mat_invert(Mat::from_ints(f5, {{1, 1}, {1, 1}})));

  Scalar i = Scalar::quat(0, 1, 0, 0), j = Scalar::quat(0, 0, 1, 0);
  Mat q = Mat::zero(quaternions(), 2, 2);
  q.at(0, 0) = i;
  q.at(0, 1) = Scalar::one(quaternions());
  q.at(1, 1) = j;
  Mat qi = *mat_invert(q);
  CHECK(q * qi == Mat::identity(quaternions(), 2));
  CHECK(qi * q == Mat::identity(quaternions(), 2));
}

TEST_CASE("determinant classes: frozen cases") {
  const DivisionRing* f5 = finite_field(5);
  CHECK(*dieudonne_det(Mat::from_ints(f5, {{0, 1}, {1, 0}})) ==
        UnitClass::of_unit(Scalar::ff(f5, 4)));  // one swap costs a sign
  CHECK(!dieudonne_det(Mat::from_ints(f5, {{1, 1}, {1, 1}})));

  const DivisionRing* q = rationals();
  CHECK(*dieudonne_det(Mat::from_ints(q, {{2, 0}, {0, 3}})) ==
        UnitClass::of_unit(Scalar::from_int(q, 6)));
  // transvections are free
  CHECK(*dieudonne_det(Mat::from_ints(q, {{1, 7}, {0, 1}})) == UnitClass::trivial(q));
  CHECK(*dieudonne_det(Mat::zero(q, 0, 0)) == UnitClass::trivial(q));

  Scalar qi = Scalar::quat(0, 1, 0, 0), qj = Scalar::quat(0, 0, 1, 0);
  Mat d = Mat::zero(quaternions(), 2, 2);
  d.at(0, 0) = qi;
  d.at(1, 1) = qj;
  CHECK(*dieudonne_det(d) == UnitClass::trivial(quaternions()));  // nrd(i)nrd(j) = 1
  Mat s = Mat::zero(quaternions(), 2, 2);
  s.at(0, 1) = qi;
  s.at(1, 0) = qj;
  CHECK(*dieudonne_det(s) == UnitClass::trivial(quaternions()));  // nrd kills the sign too
}

TEST_CASE("determinant agrees with cofactor expansion on commutative plugins") {
  std::mt19937_64 rng(11);
  for (const DivisionRing* r : {finite_field(5), rationals()}) {
    for (int n = 1; n <= 4; ++n) {
      for (int iter = 0; iter < 25; ++iter) {
        Mat m = random_mat(r, n, n, rng);
        Scalar ref = cofactor_det(m);
        auto cls = dieudonne_det(m);
        if (ref.is_zero())
          CHECK(!cls);
        else
          CHECK(*cls == UnitClass::of_unit(ref));
      }
    }
  }
}

TEST_CASE("determinant is multiplicative into the class group") {
  std::mt19937_64 rng(13);
  for (const DivisionRing* r : {finite_field(7), rationals(), quaternions()}) {
    int found = 0;
    while (found < 25) {
      Mat x = random_mat(r, 3, 3, rng), y = random_mat(r, 3, 3, rng);
      auto dx = dieudonne_det(x), dy = dieudonne_det(y);
      if (!dx || !dy) continue;
      ++found;
      CHECK(*dieudonne_det(x * y) == dx->combine(*dy));
    }
  }
}

TEST_CASE("solving from the left") {
  const DivisionRing* f5 = finite_field(5);
  Mat a = Mat::from_ints(f5, {{1, 2, 0}, {0, 1, 3}});
  Mat s0 = Mat::from_ints(f5, {{2, 1}, {4, 0}, {1, 3}});
  Mat c = s0 * a;
  auto s = solve_left(a, c);
  REQUIRE(s.has_value());
  CHECK(*s * a == c);
  CHECK(*s == s0);  // a has trivial left kernel, so the solution is unique

  CHECK(!solve_left(a, Mat::from_ints(f5, {{0, 0, 1}})));

  // zero-row system: solvable exactly for zero targets
  Mat none = Mat::zero(f5, 0, 3);
  CHECK(solve_left(none, Mat::zero(f5, 2, 3)).has_value());
  CHECK(!solve_left(none, Mat::from_ints(f5, {{1, 0, 0}})));
}

TEST_CASE("kernels and row-space lattice") {
  const DivisionRing* f7 = finite_field(7);
  Mat a = Mat::from_ints(f7, {{1, 2, 3}, {2, 4, 6}});
  Mat k = left_kernel(a);
  CHECK(k == Mat::from_ints(f7, {{1, 3}}));
  CHECK((k * a).is_zero());
  CHECK(left_kernel(Mat::identity(f7, 3)).rows == 0);

  Mat u = Mat::from_ints(f7, {{1, 0}, {0, 1}});
  Mat w = Mat::from_ints(f7, {{1, 1}});
  CHECK(intersect_row_spaces(u, w) == row_space(w));
  CHECK(sum_row_spaces(Mat::from_ints(f7, {{1, 0}}), Mat::from_ints(f7, {{0, 1}})) ==
        Mat::identity(f7, 2));
  CHECK(row_space_leq(w, u));
  CHECK(!row_space_leq(u, w));
  CHECK(row_space_contains(u, Mat::from_ints(f7, {{3, 4}})));
  CHECK(!row_space_contains(w, Mat::from_ints(f7, {{1, 2}})));

  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 40; ++iter) {
    Mat x = random_mat(finite_field(3), 2, 4, rng);
    Mat y = random_mat(finite_field(3), 2, 4, rng);
    Mat cap = intersect_row_spaces(x, y);
    for (int i = 0; i < cap.rows; ++i) {
      CHECK(row_space_contains(x, cap.row(i)));
      CHECK(row_space_contains(y, cap.row(i)));
    }
    // modularity of dimensions
    CHECK(cap.rows + sum_row_spaces(x, y).rows == row_space(x).rows + row_space(y).rows);
  }
}

TEST_CASE("coset representatives are canonical") {
  const DivisionRing* f5 = finite_field(5);
  Mat basis = row_space(Mat::from_ints(f5, {{1, 0, 2}}));
  Mat v = Mat::from_ints(f5, {{3, 1, 4}});
  Mat red = reduce_by_row_space(basis, v);
  CHECK(red == Mat::from_ints(f5, {{0, 1, 3}}));
  CHECK(row_space_contains(basis, v - red));
  // shifting by a basis row does not change the representative
  CHECK(reduce_by_row_space(basis, v + basis.row(0)) == red);
}

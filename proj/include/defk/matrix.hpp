#pragma once

#include <optional>
#include <string>
#include <vector>

#include "defk/scalar.hpp"

namespace defk {

// Dense matrix over one division-ring plugin, row major. All algorithms in
// this module use LEFT row operations only (row_i += lambda * row_j with the
// coefficient on the left), which is what keeps them correct over the
// noncommutative plugin: a row space is a left subspace, and tracked
// operations compose as matrix products T * A.
struct Mat {
  const DivisionRing* ring = nullptr;
  int rows = 0;
  int cols = 0;
  std::vector<Scalar> a;

  static Mat zero(const DivisionRing* r, int rows, int cols);
  static Mat identity(const DivisionRing* r, int n);
  // Convenience for literals; entries go through Scalar::ff for finite
  // plugins (encoding values) and Scalar::from_int otherwise.
  static Mat from_ints(const DivisionRing* r, const std::vector<std::vector<long long>>& rows);

  Scalar& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const Scalar& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  Mat row(int i) const;
  Mat rows_from(int i) const;                      // rows i..rows-1
  Mat submat(int r0, int c0, int nr, int nc) const;
  bool is_zero() const;

  int cmp(const Mat& o) const;  // dims first, then entrywise Scalar::cmp
  bool operator==(const Mat& o) const { return cmp(o) == 0; }
  bool operator!=(const Mat& o) const { return cmp(o) != 0; }

  std::string str() const;
};

Mat operator+(const Mat& x, const Mat& y);
Mat operator-(const Mat& x, const Mat& y);
Mat operator*(const Mat& x, const Mat& y);
Mat scalar_mul(const Scalar& lam, const Mat& x);  // entrywise lam * entry
Mat hcat(const Mat& x, const Mat& y);
Mat vcat(const Mat& x, const Mat& y);
Mat block_diag(const Mat& x, const Mat& y);

// Reduced row echelon form with tracking: t * input == r, pivot entries are
// one, pivot columns are clear elsewhere, pivot columns strictly increase.
struct RrefResult {
  Mat r;
  Mat t;
  std::vector<int> pivots;
};
RrefResult rref(const Mat& m);

// Canonical basis of the row space: rref with zero rows dropped.
Mat row_space(const Mat& m);

// Canonical basis of { x : x * m == 0 } (rows of the result; may be empty).
Mat left_kernel(const Mat& m);

// Some s with s * a == c, or nullopt when no solution exists.
std::optional<Mat> solve_left(const Mat& a, const Mat& c);

std::optional<Mat> mat_invert(const Mat& m);

// Dieudonne determinant of a square matrix as a class in the abelianised
// unit group; nullopt means singular. Triangularise with transvections and
// row swaps only (never scaling), then the class is
// class(prod of diagonal) combined with class(-1)^swaps.
std::optional<UnitClass> dieudonne_det(const Mat& m);

// Row-space lattice operations; inputs need not be in canonical form.
Mat sum_row_spaces(const Mat& u, const Mat& w);
Mat intersect_row_spaces(const Mat& u, const Mat& w);
bool row_space_contains(const Mat& basis, const Mat& vec);  // vec: 1 x cols
bool row_space_leq(const Mat& inner, const Mat& outer);

// Unique coset representative of vec modulo a canonical (RREF) basis: the
// element of vec + <basis> whose pivot-column coordinates are all zero.
Mat reduce_by_row_space(const Mat& basis, const Mat& vec);

}  // namespace defk

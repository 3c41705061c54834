#include "defk/matrix.hpp"

#include <sstream>

namespace defk {

Mat Mat::zero(const DivisionRing* r, int rows, int cols) {
  require(rows >= 0 && cols >= 0, "negative matrix dimension");
  Mat m;
  m.ring = r;
  m.rows = rows;
  m.cols = cols;
  m.a.assign(static_cast<size_t>(rows) * cols, Scalar::zero(r));
  return m;
}

Mat Mat::identity(const DivisionRing* r, int n) {
  Mat m = zero(r, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Scalar::one(r);
  return m;
}

Mat Mat::from_ints(const DivisionRing* r, const std::vector<std::vector<long long>>& rows) {
  int nr = static_cast<int>(rows.size());
  int nc = nr == 0 ? 0 : static_cast<int>(rows[0].size());
  Mat m = zero(r, nr, nc);
  for (int i = 0; i < nr; ++i) {
    require(static_cast<int>(rows[i].size()) == nc, "ragged matrix literal");
    for (int j = 0; j < nc; ++j)
      m.at(i, j) = r->finite() ? Scalar::ff(r, rows[i][j]) : Scalar::from_int(r, rows[i][j]);
  }
  return m;
}

Mat Mat::row(int i) const { return submat(i, 0, 1, cols); }

Mat Mat::rows_from(int i) const { return submat(i, 0, rows - i, cols); }

Mat Mat::submat(int r0, int c0, int nr, int nc) const {
  require(r0 >= 0 && c0 >= 0 && nr >= 0 && nc >= 0 && r0 + nr <= rows && c0 + nc <= cols,
          "submatrix out of range");
  Mat m = zero(ring, nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) m.at(i, j) = at(r0 + i, c0 + j);
  return m;
}

bool Mat::is_zero() const {
  for (const auto& x : a)
    if (!x.is_zero()) return false;
  return true;
}

int Mat::cmp(const Mat& o) const {
  require(ring == o.ring, "matrix plugin mismatch");
  if (rows != o.rows) return rows < o.rows ? -1 : 1;
  if (cols != o.cols) return cols < o.cols ? -1 : 1;
  for (size_t i = 0; i < a.size(); ++i) {
    int c = a[i].cmp(o.a[i]);
    if (c != 0) return c;
  }
  return 0;
}

std::string Mat::str() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < rows; ++i) {
    if (i) os << ", ";
    os << "[";
    for (int j = 0; j < cols; ++j) {
      if (j) os << ", ";
      os << at(i, j).str();
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

Mat operator+(const Mat& x, const Mat& y) {
  require(x.ring == y.ring && x.rows == y.rows && x.cols == y.cols, "matrix shape mismatch");
  Mat m = x;
  for (size_t i = 0; i < m.a.size(); ++i) m.a[i] = m.a[i] + y.a[i];
  return m;
}

Mat operator-(const Mat& x, const Mat& y) {
  require(x.ring == y.ring && x.rows == y.rows && x.cols == y.cols, "matrix shape mismatch");
  Mat m = x;
  for (size_t i = 0; i < m.a.size(); ++i) m.a[i] = m.a[i] - y.a[i];
  return m;
}

Mat operator*(const Mat& x, const Mat& y) {
  require(x.ring == y.ring && x.cols == y.rows, "matrix product shape mismatch");
  Mat m = Mat::zero(x.ring, x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const Scalar& xik = x.at(i, k);
      if (xik.is_zero()) continue;
      for (int j = 0; j < y.cols; ++j) m.at(i, j) = m.at(i, j) + xik * y.at(k, j);
    }
  return m;
}

Mat scalar_mul(const Scalar& lam, const Mat& x) {
  Mat m = x;
  for (auto& v : m.a) v = lam * v;
  return m;
}

Mat hcat(const Mat& x, const Mat& y) {
  require(x.ring == y.ring && x.rows == y.rows, "hcat shape mismatch");
  Mat m = Mat::zero(x.ring, x.rows, x.cols + y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int j = 0; j < x.cols; ++j) m.at(i, j) = x.at(i, j);
    for (int j = 0; j < y.cols; ++j) m.at(i, x.cols + j) = y.at(i, j);
  }
  return m;
}

Mat vcat(const Mat& x, const Mat& y) {
  require(x.ring == y.ring && x.cols == y.cols, "vcat shape mismatch");
  Mat m = Mat::zero(x.ring, x.rows + y.rows, x.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) m.at(i, j) = x.at(i, j);
  for (int i = 0; i < y.rows; ++i)
    for (int j = 0; j < y.cols; ++j) m.at(x.rows + i, j) = y.at(i, j);
  return m;
}

Mat block_diag(const Mat& x, const Mat& y) {
  require(x.ring == y.ring, "matrix plugin mismatch");
  Mat m = Mat::zero(x.ring, x.rows + y.rows, x.cols + y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) m.at(i, j) = x.at(i, j);
  for (int i = 0; i < y.rows; ++i)
    for (int j = 0; j < y.cols; ++j) m.at(x.rows + i, x.cols + j) = y.at(i, j);
  return m;
}

RrefResult rref(const Mat& m) {
  RrefResult res{m, Mat::identity(m.ring, m.rows), {}};
  Mat& r = res.r;
  Mat& t = res.t;
  int lead = 0;
  for (int c = 0; c < m.cols && lead < m.rows; ++c) {
    int piv = -1;
    for (int i = lead; i < m.rows; ++i)
      if (!r.at(i, c).is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != lead) {
      for (int j = 0; j < r.cols; ++j) std::swap(r.at(piv, j), r.at(lead, j));
      for (int j = 0; j < t.cols; ++j) std::swap(t.at(piv, j), t.at(lead, j));
    }
    Scalar inv = r.at(lead, c).inv();
    for (int j = 0; j < r.cols; ++j) r.at(lead, j) = inv * r.at(lead, j);
    for (int j = 0; j < t.cols; ++j) t.at(lead, j) = inv * t.at(lead, j);
    for (int i = 0; i < m.rows; ++i) {
      if (i == lead) continue;
      Scalar f = r.at(i, c);
      if (f.is_zero()) continue;
      for (int j = 0; j < r.cols; ++j) r.at(i, j) = r.at(i, j) - f * r.at(lead, j);
      for (int j = 0; j < t.cols; ++j) t.at(i, j) = t.at(i, j) - f * t.at(lead, j);
    }
    res.pivots.push_back(c);
    ++lead;
  }
  return res;
}

Mat row_space(const Mat& m) {
  RrefResult res = rref(m);
  return res.r.submat(0, 0, static_cast<int>(res.pivots.size()), m.cols);
}

Mat left_kernel(const Mat& m) {
  RrefResult res = rref(m);
  int rank = static_cast<int>(res.pivots.size());
  // rows of t past the rank send m to zero rows; they are independent but
  // not canonical, so reduce them once more
  return row_space(res.t.rows_from(rank));
}

std::optional<Mat> solve_left(const Mat& a, const Mat& c) {
  require(a.ring == c.ring && a.cols == c.cols, "solve shape mismatch");
  RrefResult res = rref(a);
  int rank = static_cast<int>(res.pivots.size());
  Mat s = Mat::zero(a.ring, c.rows, a.rows);
  for (int i = 0; i < c.rows; ++i) {
    // candidate coefficients read off the pivot columns; rref makes this the
    // only possible combination
    Mat mu = Mat::zero(a.ring, 1, rank);
    for (int j = 0; j < rank; ++j) mu.at(0, j) = c.at(i, res.pivots[j]);
    Mat recon = mu * res.r.submat(0, 0, rank, a.cols);
    if (recon != c.row(i)) return std::nullopt;
    Mat srow = mu * res.t.submat(0, 0, rank, a.rows);
    for (int j = 0; j < a.rows; ++j) s.at(i, j) = srow.at(0, j);
  }
  return s;
}

std::optional<Mat> mat_invert(const Mat& m) {
  require(m.rows == m.cols, "inverse of non-square matrix");
  RrefResult res = rref(m);
  if (static_cast<int>(res.pivots.size()) != m.rows) return std::nullopt;
  return res.t;
}

std::optional<UnitClass> dieudonne_det(const Mat& m) {
  require(m.rows == m.cols, "determinant of non-square matrix");
  Mat r = m;
  int n = m.rows;
  int swaps = 0;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int i = c; i < n; ++i)
      if (!r.at(i, c).is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) return std::nullopt;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(r.at(piv, j), r.at(c, j));
      ++swaps;
    }
    Scalar dinv = r.at(c, c).inv();
    for (int i = c + 1; i < n; ++i) {
      Scalar f = r.at(i, c);
      if (f.is_zero()) continue;
      Scalar lam = f * dinv;
      for (int j = c; j < n; ++j) r.at(i, j) = r.at(i, j) - lam * r.at(c, j);
    }
  }
  Scalar prod = Scalar::one(m.ring);
  for (int i = 0; i < n; ++i) prod = prod * r.at(i, i);
  UnitClass cls = UnitClass::of_unit(prod);
  if (swaps % 2 == 1) cls = cls.combine(UnitClass::of_unit(Scalar::from_int(m.ring, -1)));
  return cls;
}

Mat sum_row_spaces(const Mat& u, const Mat& w) { return row_space(vcat(u, w)); }

Mat intersect_row_spaces(const Mat& u, const Mat& w) {
  require(u.ring == w.ring && u.cols == w.cols, "row space shape mismatch");
  // kernel rows (x | y) of the stack satisfy x*u == -y*w, an element of both
  Mat stack = vcat(u, w);
  Mat k = left_kernel(stack);
  Mat gens = Mat::zero(u.ring, k.rows, u.cols);
  for (int i = 0; i < k.rows; ++i) {
    Mat x = k.submat(i, 0, 1, u.rows);
    Mat g = x * u;
    for (int j = 0; j < u.cols; ++j) gens.at(i, j) = g.at(0, j);
  }
  return row_space(gens);
}

bool row_space_contains(const Mat& basis, const Mat& vec) {
  require(vec.rows == 1, "membership wants a single row");
  return solve_left(basis, vec).has_value();
}

bool row_space_leq(const Mat& inner, const Mat& outer) {
  return solve_left(outer, inner).has_value();
}

Mat reduce_by_row_space(const Mat& basis, const Mat& vec) {
  require(vec.rows == 1 && vec.cols == basis.cols, "reduce shape mismatch");
  // basis must be canonical: pivot coordinates of the result vanish, making
  // it the unique such representative of the coset
  RrefResult res = rref(basis);
  require(res.r == basis, "reduce wants a canonical basis");
  Mat v = vec;
  for (size_t j = 0; j < res.pivots.size(); ++j) {
    Scalar f = v.at(0, res.pivots[j]);
    if (f.is_zero()) continue;
    for (int c = 0; c < v.cols; ++c) v.at(0, c) = v.at(0, c) - f * basis.at(static_cast<int>(j), c);
  }
  return v;
}

}  // namespace defk

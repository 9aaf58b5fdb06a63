#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "torfan/error.hpp"
#include "torfan/numeric.hpp"

namespace torfan {

// Dense integer matrix, row major.
class IntMat {
public:
  IntMat() : rows_(0), cols_(0) {}
  IntMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Int(0)) {}

  static IntMat identity(std::size_t n) {
    IntMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static IntMat from_rows(const std::vector<std::vector<Int>>& rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows[0].size();
    IntMat m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw DomainError("IntMat: ragged rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Int& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const IntMat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  friend IntMat operator*(const IntMat& a, const IntMat& b) {
    if (a.cols_ != b.rows_) throw DomainError("IntMat: size mismatch in product");
    IntMat r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += a(i, k) * b(k, j);
      }
    return r;
  }

  std::vector<Int> apply(const std::vector<Int>& v) const {
    if (v.size() != cols_) throw DomainError("IntMat: size mismatch in apply");
    std::vector<Int> r(rows_, Int(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  IntMat transposed() const {
    IntMat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  // row[a] += q * row[b]
  void add_row(std::size_t a, std::size_t b, const Int& q) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) += q * (*this)(b, j);
  }
  // col[a] += q * col[b]
  void add_col(std::size_t a, std::size_t b, const Int& q) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) += q * (*this)(i, b);
  }
  void negate_row(std::size_t a) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) = -(*this)(a, j);
  }

private:
  std::size_t rows_, cols_;
  std::vector<Int> data_;
};

// Fraction-free Gaussian elimination (Bareiss).
inline Int det(IntMat m) {
  if (m.rows() != m.cols()) throw DomainError("det: not square");
  std::size_t n = m.rows();
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        m(i, j) = t / prev;
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

struct SnfResult {
  IntMat U;  // unimodular, rows() x rows()
  IntMat V;  // unimodular, cols() x cols()
  std::vector<Int> diag;  // d_1 | d_2 | ... | d_r, then zeros; nonnegative

  std::size_t rank() const {
    std::size_t r = 0;
    for (const auto& d : diag)
      if (d != 0) ++r;
    return r;
  }
};

// Smith normal form U*M*V = D. Pivot of smallest absolute value, scanning
// rows before columns; row operations are tried before column operations.
inline SnfResult smith_normal_form(const IntMat& input) {
  IntMat a = input;
  const std::size_t m = a.rows(), n = a.cols();
  IntMat u = IntMat::identity(m);
  IntMat v = IntMat::identity(n);

  std::size_t t = 0;
  while (t < m && t < n) {
    // pick the minimal-|.| nonzero entry of the trailing block
    std::size_t pi = m, pj = n;
    Int best = 0;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j) {
        const Int& e = a(i, j);
        if (e == 0) continue;
        if (pi == m || abs_int(e) < best) {
          best = abs_int(e);
          pi = i;
          pj = j;
        }
      }
    if (pi == m) break;  // trailing block is zero

    a.swap_rows(t, pi);
    u.swap_rows(t, pi);
    a.swap_cols(t, pj);
    v.swap_cols(t, pj);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (a(i, t) == 0) continue;
        Int q = a(i, t) / a(t, t);
        a.add_row(i, t, -q);
        u.add_row(i, t, -q);
        if (a(i, t) != 0) {
          // remainder is strictly smaller: promote it to the pivot slot
          a.swap_rows(t, i);
          u.swap_rows(t, i);
          clean = false;
        }
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (a(t, j) == 0) continue;
        Int q = a(t, j) / a(t, t);
        a.add_col(j, t, -q);
        v.add_col(j, t, -q);
        if (a(t, j) != 0) {
          a.swap_cols(t, j);
          v.swap_cols(t, j);
          clean = false;
        }
      }
    }

    // enforce the divisibility chain before advancing
    bool divides_all = true;
    for (std::size_t i = t + 1; i < m && divides_all; ++i)
      for (std::size_t j = t + 1; j < n && divides_all; ++j)
        if (a(i, j) % a(t, t) != 0) {
          a.add_row(t, i, 1);
          u.add_row(t, i, 1);
          divides_all = false;
        }
    if (!divides_all) continue;

    if (a(t, t) < 0) {
      a.negate_row(t);
      u.negate_row(t);
    }
    ++t;
  }

  SnfResult r;
  r.U = std::move(u);
  r.V = std::move(v);
  std::size_t k = std::min(m, n);
  r.diag.resize(k);
  for (std::size_t i = 0; i < k; ++i) r.diag[i] = a(i, i);
  return r;
}

// Exact inverse of a square integer matrix with det = +-1; DomainError
// otherwise. Rational Gauss-Jordan, denominators checked at the end.
inline IntMat unimodular_inverse(const IntMat& m) {
  if (m.rows() != m.cols()) throw DomainError("inverse: not square");
  const std::size_t n = m.rows();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(m(i, j));
    a[i][n + i] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k] == 0) ++p;
    if (p == n) throw DomainError("inverse: singular matrix");
    std::swap(a[k], a[p]);
    Rational piv = a[k][k];
    for (std::size_t j = 0; j < 2 * n; ++j) a[k][j] /= piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a[i][k] == 0) continue;
      Rational f = a[i][k];
      for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  IntMat inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rational& q = a[i][n + j];
      if (boost::multiprecision::denominator(q) != 1)
        throw DomainError("inverse: matrix is not unimodular");
      inv(i, j) = boost::multiprecision::numerator(q);
    }
  return inv;
}

// Sparse integer row: column index -> nonzero entry.
using SparseRow = std::map<std::size_t, Int>;

inline SparseRow row_axpy(const Int& s, const SparseRow& x, const Int& t,
                          const SparseRow& y) {
  SparseRow r;
  auto put = [&r](std::size_t c, const Int& val) {
    if (val == 0) return;
    auto it = r.find(c);
    if (it == r.end()) {
      r.emplace(c, val);
    } else {
      it->second += val;
      if (it->second == 0) r.erase(it);
    }
  };
  if (s != 0)
    for (const auto& [c, val] : x) put(c, s * val);
  if (t != 0)
    for (const auto& [c, val] : y) put(c, t * val);
  return r;
}

// Row-echelon Z-lattice built by xgcd insertion. Membership of a vector in
// the lattice spanned by the inserted rows is decidable by greedy reduction.
class RowEchelon {
public:
  // Inserts a row, keeping one pivot per leading column; the span of all
  // inserted rows is preserved exactly.
  void insert(SparseRow row) {
    while (!row.empty()) {
      std::size_t c = row.begin()->first;
      auto it = pivots_.find(c);
      if (it == pivots_.end()) {
        if (row.begin()->second < 0)
          for (auto& [col, val] : row) val = -val;
        pivots_.emplace(c, std::move(row));
        return;
      }
      const Int a = it->second.begin()->second;  // > 0
      const Int b = row.begin()->second;
      if (b % a == 0) {
        row = row_axpy(1, row, -(b / a), it->second);
        continue;
      }
      Int g, x, y;
      xgcd(a, b, g, x, y);
      SparseRow new_pivot = row_axpy(x, it->second, y, row);
      SparseRow residual = row_axpy(a / g, row, -(b / g), it->second);
      it->second = std::move(new_pivot);
      row = std::move(residual);
    }
  }

  bool reduces_to_zero(SparseRow row) const {
    while (!row.empty()) {
      std::size_t c = row.begin()->first;
      auto it = pivots_.find(c);
      if (it == pivots_.end()) return false;
      const Int& a = it->second.begin()->second;
      const Int& b = row.begin()->second;
      if (b % a != 0) return false;
      row = row_axpy(1, row, -(b / a), it->second);
    }
    return true;
  }

  std::size_t pivot_count() const { return pivots_.size(); }

  const std::map<std::size_t, SparseRow>& pivots() const { return pivots_; }

private:
  std::map<std::size_t, SparseRow> pivots_;  // leading column -> row
};

// Rank over Q of a list of integer rows (used by tests and the piecewise
// injectivity check): echelon insertion counts independent rows.
inline std::size_t rational_rank(const std::vector<SparseRow>& rows) {
  RowEchelon e;
  for (const auto& r : rows) e.insert(r);
  return e.pivot_count();
}

}  // namespace torfan

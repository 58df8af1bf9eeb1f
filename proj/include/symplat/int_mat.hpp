#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symplat {

using Int = mpz_class;
using Rat = mpq_class;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violations ("singular basis", "not a sublattice", ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Enumeration / search / BFS budgets exhausted.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Dense matrix with value semantics, row-major storage.
template <typename T>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(std::size_t r, std::size_t c) : rows_(r), cols_(c), v_(r * c) {}
  Mat(std::size_t r, std::size_t c, std::vector<T> entries)
      : rows_(r), cols_(c), v_(std::move(entries)) {
    if (v_.size() != r * c) throw DomainError("matrix entry count mismatch");
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
  }
  bool operator!=(const Mat& o) const { return !(*this == o); }

  Mat operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw DomainError("matrix dimension mismatch in product");
    Mat r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& a = (*this)(i, k);
        if (a == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }

  Mat operator+(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DomainError("matrix dimension mismatch in sum");
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < v_.size(); ++i) r.v_[i] = v_[i] + o.v_[i];
    return r;
  }

  Mat operator-(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DomainError("matrix dimension mismatch in difference");
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < v_.size(); ++i) r.v_[i] = v_[i] - o.v_[i];
    return r;
  }

  Mat operator-() const {
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < v_.size(); ++i) r.v_[i] = -v_[i];
    return r;
  }

  Mat transpose() const {
    Mat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  bool is_zero() const {
    for (const T& x : v_)
      if (x != 0) return false;
    return true;
  }

  bool is_square() const { return rows_ == cols_; }

  void swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < cols_; ++k) std::swap((*this)(i, k), (*this)(j, k));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < rows_; ++k) std::swap((*this)(k, i), (*this)(k, j));
  }
  // row i -= q * row j
  void row_sub(std::size_t i, std::size_t j, const T& q) {
    if (q == 0) return;
    for (std::size_t k = 0; k < cols_; ++k) (*this)(i, k) -= q * (*this)(j, k);
  }
  // col i -= q * col j
  void col_sub(std::size_t i, std::size_t j, const T& q) {
    if (q == 0) return;
    for (std::size_t k = 0; k < rows_; ++k) (*this)(k, i) -= q * (*this)(k, j);
  }
  void negate_row(std::size_t i) {
    for (std::size_t k = 0; k < cols_; ++k) (*this)(i, k) = -(*this)(i, k);
  }
  void negate_col(std::size_t j) {
    for (std::size_t k = 0; k < rows_; ++k) (*this)(k, j) = -(*this)(k, j);
  }

  Mat submatrix_cols(std::size_t first, std::size_t count) const {
    Mat r(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < count; ++j) r(i, j) = (*this)(i, first + j);
    return r;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows_; ++i) {
      os << (i ? " [" : "[");
      for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j);
      os << "]";
      if (i + 1 < rows_) os << "\n";
    }
    os << "]";
    return os.str();
  }

 private:
  std::size_t rows_, cols_;
  std::vector<T> v_;
};

using ZMat = Mat<Int>;
using QMat = Mat<Rat>;

inline Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// g = gcd(a, b) = s*a + t*b
inline void gcd_ext(const Int& a, const Int& b, Int& g, Int& s, Int& t) {
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}

inline QMat to_qmat(const ZMat& a) {
  QMat r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = Rat(a(i, j));
  return r;
}

inline bool is_integral(const QMat& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j).get_den() != 1) return false;
  return true;
}

inline ZMat to_zmat(const QMat& a) {
  ZMat r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j).get_den() != 1) throw DomainError("matrix is not integral");
      r(i, j) = a(i, j).get_num();
    }
  return r;
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
inline Int det(const ZMat& a) {
  if (!a.is_square()) throw DomainError("determinant of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  ZMat m = a;
  Int prev = 1;
  int sign = 1;
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
        mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m(k, k);
  }
  return sign > 0 ? m(n - 1, n - 1) : Int(-m(n - 1, n - 1));
}

inline Rat det(const QMat& a) {
  if (!a.is_square()) throw DomainError("determinant of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  QMat m = a;
  Rat d = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m(p, k) == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      m.swap_rows(k, p);
      d = -d;
    }
    d *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      Rat f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return d;
}

inline bool is_unimodular(const ZMat& a) {
  if (!a.is_square()) return false;
  Int d = det(a);
  return d == 1 || d == -1;
}

/// Exact inverse of a nonsingular rational matrix (Gauss-Jordan).
inline QMat inverse(const QMat& a) {
  if (!a.is_square()) throw DomainError("inverse of non-square matrix");
  const std::size_t n = a.rows();
  QMat m = a;
  QMat inv = QMat::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m(p, k) == 0) ++p;
    if (p == n) throw DomainError("matrix is singular");
    if (p != k) {
      m.swap_rows(k, p);
      inv.swap_rows(k, p);
    }
    Rat piv = m(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      m(k, j) /= piv;
      inv(k, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m(i, k) == 0) continue;
      Rat f = m(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= f * m(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

/// Solves a * x = b exactly over the rationals; a square nonsingular.
inline QMat solve(const QMat& a, const QMat& b) { return inverse(a) * b; }

/// Column-style Hermite normal form of the column span of `a`.
///
/// Returns the unique canonical basis of the span: an (rows x rank) matrix in
/// column echelon form with positive pivots and, in each pivot row, entries
/// left of the pivot reduced into [0, pivot).  If `transform` is non-null it
/// receives a unimodular V with a * V = [H | 0].
inline ZMat hnf_of_span(const ZMat& a, ZMat* transform = nullptr) {
  const std::size_t r = a.rows(), c = a.cols();
  ZMat h = a;
  ZMat v = ZMat::identity(c);
  std::size_t col = 0;
  Int g, s, t;
  for (std::size_t row = 0; row < r && col < c; ++row) {
    // gather the gcd of row entries in columns >= col into column col
    for (std::size_t j = col + 1; j < c; ++j) {
      if (h(row, j) == 0) continue;
      if (h(row, col) == 0) {
        h.swap_cols(col, j);
        v.swap_cols(col, j);
        continue;
      }
      const Int a0 = h(row, col), b0 = h(row, j);
      gcd_ext(a0, b0, g, s, t);
      Int ag = a0 / g, bg = b0 / g;
      // columns (col, j) <- (s*col + t*j, -bg*col + ag*j); det = 1
      for (std::size_t k = 0; k < r; ++k) {
        Int x = h(k, col), y = h(k, j);
        h(k, col) = s * x + t * y;
        h(k, j) = ag * y - bg * x;
      }
      for (std::size_t k = 0; k < c; ++k) {
        Int x = v(k, col), y = v(k, j);
        v(k, col) = s * x + t * y;
        v(k, j) = ag * y - bg * x;
      }
    }
    if (h(row, col) == 0) continue;  // no pivot in this row
    if (h(row, col) < 0) {
      h.negate_col(col);
      v.negate_col(col);
    }
    for (std::size_t k = 0; k < col; ++k) {
      Int q = floor_div(h(row, k), h(row, col));
      h.col_sub(k, col, q);
      v.col_sub(k, col, q);
    }
    ++col;
  }
  if (transform) *transform = v;
  return h.submatrix_cols(0, col);
}

/// Hermite normal form of a full-column-rank integer matrix.
/// Errors with "singular basis" when the columns are dependent.
inline ZMat hnf(const ZMat& a) {
  ZMat h = hnf_of_span(a);
  if (h.cols() != a.cols()) throw DomainError("singular basis");
  return h;
}

/// Smith normal form data: u * a * v = d with u, v unimodular and
/// d diagonal with d1 | d2 | ... >= 0.
struct Snf {
  ZMat d;
  ZMat u, u_inv;
  ZMat v, v_inv;
  std::size_t rank = 0;
};

inline Snf snf(const ZMat& a) {
  const std::size_t r = a.rows(), c = a.cols();
  Snf res;
  res.d = a;
  res.u = ZMat::identity(r);
  res.u_inv = ZMat::identity(r);
  res.v = ZMat::identity(c);
  res.v_inv = ZMat::identity(c);
  ZMat& d = res.d;

  auto row_op = [&](std::size_t i, std::size_t j, const Int& q) {
    // row i -= q row j; inverse: row i += q row j
    d.row_sub(i, j, q);
    res.u.row_sub(i, j, q);
    res.u_inv.col_sub(j, i, -q);
  };
  auto col_op = [&](std::size_t i, std::size_t j, const Int& q) {
    d.col_sub(i, j, q);
    res.v.col_sub(i, j, q);
    res.v_inv.row_sub(j, i, -q);
  };
  auto row_swap = [&](std::size_t i, std::size_t j) {
    d.swap_rows(i, j);
    res.u.swap_rows(i, j);
    res.u_inv.swap_cols(i, j);
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    d.swap_cols(i, j);
    res.v.swap_cols(i, j);
    res.v_inv.swap_rows(i, j);
  };
  auto row_negate = [&](std::size_t i) {
    d.negate_row(i);
    res.u.negate_row(i);
    res.u_inv.negate_col(i);
  };

  const std::size_t steps = std::min(r, c);
  std::size_t t = 0;
  for (; t < steps; ++t) {
    // locate a nonzero pivot of smallest magnitude in the remaining block
    std::size_t pi = t, pj = t;
    bool found = false;
    Int best;
    for (std::size_t i = t; i < r; ++i)
      for (std::size_t j = t; j < c; ++j) {
        if (d(i, j) == 0) continue;
        Int m = abs(d(i, j));
        if (!found || m < best) {
          best = m;
          pi = i;
          pj = j;
          found = true;
        }
      }
    if (!found) break;
    row_swap(t, pi);
    col_swap(t, pj);

    for (;;) {
      bool dirty = false;
      for (std::size_t i = t + 1; i < r; ++i) {
        if (d(i, t) == 0) continue;
        Int q = floor_div(d(i, t), d(t, t));
        row_op(i, t, q);
        if (d(i, t) != 0) {
          row_swap(t, i);  // remainder is smaller; continue euclid
          dirty = true;
        }
      }
      for (std::size_t j = t + 1; j < c; ++j) {
        if (d(t, j) == 0) continue;
        Int q = floor_div(d(t, j), d(t, t));
        col_op(j, t, q);
        if (d(t, j) != 0) {
          col_swap(t, j);
          dirty = true;
        }
      }
      if (dirty) continue;
      // pivot must divide every remaining entry for the divisor chain
      bool fixed = true;
      for (std::size_t i = t + 1; i < r && fixed; ++i)
        for (std::size_t j = t + 1; j < c && fixed; ++j) {
          if (d(i, j) % d(t, t) != 0) {
            row_op(t, i, Int(-1));  // row t += row i, then re-clean
            fixed = false;
          }
        }
      if (fixed) break;
    }
    if (d(t, t) < 0) row_negate(t);
  }
  res.rank = t;
  return res;
}

/// Saturated basis of the integer kernel {x : a x = 0}, in canonical HNF.
/// With a * v = [h | 0] for unimodular v, the trailing columns of v span
/// the kernel and are automatically saturated.
inline ZMat kernel_z(const ZMat& a) {
  ZMat v;
  ZMat h = hnf_of_span(a, &v);
  const std::size_t c = a.cols();
  const std::size_t k = c - h.cols();
  ZMat ker(c, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < c; ++i) ker(i, j) = v(i, h.cols() + j);
  return hnf_of_span(ker);
}

/// Greatest common divisor of all entries (0 for the zero matrix).
inline Int content(const ZMat& a) {
  Int g = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) g = gcd(g, a(i, j));
  return g;
}

}  // namespace symplat

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "symplat/int_mat.hpp"

namespace symplat {

/// Caps for sub/superlattice scans and similar searches.
struct EnumBudget {
  std::uint64_t max_candidates = 1'000'000;
};

/// A free Z-submodule of Z^n of rank r <= n, stored by its unique
/// column-style Hermite normal form basis (n x r, full column rank).
/// Values are immutable after construction; equality is structural.
class Lattice {
 public:
  Lattice() : ambient_(0), basis_(0, 0) {}

  /// Canonical lattice spanned by the columns of `generators` inside Z^n
  /// (n = generators.rows()).  Dependent generators are allowed; the rank
  /// is that of the span.
  explicit Lattice(const ZMat& generators)
      : ambient_(generators.rows()), basis_(hnf_of_span(generators)) {}

  static Lattice standard(std::size_t n) { return Lattice(ZMat::identity(n)); }

  static Lattice zero(std::size_t n) { return Lattice(ZMat(n, 0)); }

  std::size_t ambient_rank() const { return ambient_; }
  std::size_t rank() const { return basis_.cols(); }
  const ZMat& basis() const { return basis_; }
  bool is_full_rank() const { return rank() == ambient_; }

  bool operator==(const Lattice& o) const {
    return ambient_ == o.ambient_ && basis_ == o.basis_;
  }
  bool operator!=(const Lattice& o) const { return !(*this == o); }

  /// Lexicographic order on the canonical basis; used for deterministic
  /// sorting of enumeration output.
  bool operator<(const Lattice& o) const {
    if (ambient_ != o.ambient_) return ambient_ < o.ambient_;
    if (rank() != o.rank()) return rank() < o.rank();
    for (std::size_t i = 0; i < ambient_; ++i)
      for (std::size_t j = 0; j < rank(); ++j) {
        int c = cmp(basis_(i, j), o.basis_(i, j));
        if (c != 0) return c < 0;
      }
    return false;
  }

 private:
  std::size_t ambient_;
  ZMat basis_;
};

/// Rational coordinates of the columns of `vectors` in the basis of `l`.
/// Errors unless the vectors lie in l (x) Q.
inline QMat coords_in(const Lattice& l, const ZMat& vectors) {
  if (vectors.rows() != l.ambient_rank()) throw DomainError("ambient rank mismatch");
  const std::size_t r = l.rank();
  // pick the pivot rows of the HNF basis; they form an invertible r x r minor
  QMat bq = to_qmat(l.basis());
  std::vector<std::size_t> pivot_rows;
  std::size_t row = 0;
  for (std::size_t j = 0; j < r; ++j) {
    while (row < l.ambient_rank() && l.basis()(row, j) == 0) ++row;
    if (row == l.ambient_rank()) throw DomainError("malformed lattice basis");
    pivot_rows.push_back(row);
  }
  QMat square(r, r), rhs(r, vectors.cols());
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) square(i, j) = bq(pivot_rows[i], j);
    for (std::size_t j = 0; j < vectors.cols(); ++j)
      rhs(i, j) = Rat(vectors(pivot_rows[i], j));
  }
  QMat c = solve(square, rhs);
  // consistency: the full system must hold, not just the pivot rows
  if (bq * c != to_qmat(vectors)) throw DomainError("vectors not in the rational span");
  return c;
}

inline bool contains(const Lattice& sup, const ZMat& vectors) {
  try {
    return is_integral(coords_in(sup, vectors));
  } catch (const DomainError&) {
    return false;
  }
}

inline bool contains(const Lattice& sup, const Lattice& sub) {
  return contains(sup, sub.basis());
}

/// [sup : sub] for a finite-index sublattice; errors with "not a sublattice"
/// when sub is not contained in sup or the index is infinite.
inline Int index_of_sublattice(const Lattice& sub, const Lattice& sup) {
  if (sub.ambient_rank() != sup.ambient_rank() || sub.rank() != sup.rank())
    throw DomainError("not a sublattice");
  QMat c;
  try {
    c = coords_in(sup, sub.basis());
  } catch (const DomainError&) {
    throw DomainError("not a sublattice");
  }
  if (!is_integral(c)) throw DomainError("not a sublattice");
  Int d = det(to_zmat(c));
  return abs(d);
}

/// Smallest primitive sublattice of sup containing sub: (sub (x) Q) ∩ sup.
/// Pre: sub ⊆ sup (x) Q.
inline Lattice saturate(const Lattice& sub, const Lattice& sup) {
  if (sub.rank() == 0) return Lattice::zero(sup.ambient_rank());
  QMat c = coords_in(sup, sub.basis());
  // clear denominators; saturation only depends on the rational span
  Int lcm_den = 1;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j)
      lcm_den = lcm(lcm_den, Int(c(i, j).get_den()));
  ZMat ci(c.rows(), c.cols());
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      Rat scaled = c(i, j) * Rat(lcm_den);
      ci(i, j) = scaled.get_num();
    }
  Snf s = snf(ci);
  // span ∩ Z^r = first `rank` columns of u^{-1}
  ZMat sat(c.rows(), s.rank);
  for (std::size_t j = 0; j < s.rank; ++j)
    for (std::size_t i = 0; i < c.rows(); ++i) sat(i, j) = s.u_inv(i, j);
  return Lattice(sup.basis() * sat);
}

namespace detail {

inline void divisor_tuples(const Int& n, std::size_t slots, std::vector<Int>& cur,
                           std::vector<std::vector<Int>>& out) {
  if (slots == 1) {
    cur.push_back(n);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (Int d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    Int e = n / d;
    cur.push_back(d);
    divisor_tuples(e, slots - 1, cur, out);
    cur.pop_back();
    if (e != d) {
      cur.push_back(e);
      divisor_tuples(d, slots - 1, cur, out);
      cur.pop_back();
    }
  }
}

/// All canonical lower-triangular HNF matrices with the given diagonal:
/// entries (i,k), k < i, range over [0, diag[i]).
inline void hnf_shapes_for_diagonal(const std::vector<Int>& diag,
                                    const std::function<void(const ZMat&)>& emit) {
  const std::size_t r = diag.size();
  ZMat h(r, r);
  for (std::size_t i = 0; i < r; ++i) h(i, i) = diag[i];
  // count sub-diagonal slots
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t i = 1; i < r; ++i)
    for (std::size_t k = 0; k < i; ++k) slots.emplace_back(i, k);
  std::function<void(std::size_t)> rec = [&](std::size_t s) {
    if (s == slots.size()) {
      emit(h);
      return;
    }
    auto [i, k] = slots[s];
    for (Int b = 0; b < diag[i]; ++b) {
      h(i, k) = b;
      rec(s + 1);
    }
    h(i, k) = 0;
  };
  rec(0);
}

inline Int hnf_count_for_diagonal(const std::vector<Int>& diag) {
  Int c = 1;
  for (std::size_t i = 1; i < diag.size(); ++i)
    for (std::size_t k = 0; k < i; ++k) c *= diag[i];
  return c;
}

}  // namespace detail

/// All sublattices of `l` of index exactly n, canonical, sorted, no
/// duplicates.  The count matches the classical sublattice-counting
/// function.  Errors with "enumeration budget exceeded" past the cap.
inline std::vector<Lattice> enumerate_sublattices(const Lattice& l, const Int& n,
                                                  const EnumBudget& budget = {}) {
  if (n < 1) throw DomainError("index must be positive");
  const std::size_t r = l.rank();
  std::vector<std::vector<Int>> tuples;
  std::vector<Int> cur;
  detail::divisor_tuples(n, r, cur, tuples);
  Int total = 0;
  for (const auto& t : tuples) total += detail::hnf_count_for_diagonal(t);
  if (total > Int(budget.max_candidates)) throw BudgetError("enumeration budget exceeded");

  std::vector<Lattice> out;
  out.reserve(total.get_ui());
  for (const auto& t : tuples) {
    detail::hnf_shapes_for_diagonal(t, [&](const ZMat& h) {
      out.emplace_back(l.basis() * h);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// A lattice M = (1/denom) * numerator; used for superlattice enumeration,
/// which can leave the ambient integer lattice.  Canonical: gcd of the
/// numerator content and denom is 1.
struct ScaledLattice {
  Lattice numerator;
  Int denom;

  ScaledLattice(Lattice num, Int d) : numerator(std::move(num)), denom(std::move(d)) {
    Int g = gcd(content(numerator.basis()), denom);
    if (g > 1) {
      ZMat b = numerator.basis();
      for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
          mpz_divexact(b(i, j).get_mpz_t(), b(i, j).get_mpz_t(), g.get_mpz_t());
      numerator = Lattice(b);
      denom /= g;
    }
  }

  bool is_integral() const { return denom == 1; }

  bool operator==(const ScaledLattice& o) const {
    return denom == o.denom && numerator == o.numerator;
  }
  bool operator<(const ScaledLattice& o) const {
    if (denom != o.denom) return denom < o.denom;
    return numerator < o.numerator;
  }
};

/// All lattices M with l ⊆ M ⊆ (1/n) l, canonical, sorted.
/// They biject with subgroups of (Z/n)^rank.
inline std::vector<ScaledLattice> enumerate_superlattices(const Lattice& l, const Int& n,
                                                          const EnumBudget& budget = {}) {
  if (n < 1) throw DomainError("scale must be positive");
  const std::size_t r = l.rank();
  // M = (1/n) K with n·l ⊆ K ⊆ l.  Enumerate K via canonical HNF matrices
  // whose diagonal divides n, filtered by n·H^{-1} integral.
  std::vector<Int> divisors;
  for (Int d = 1; d <= n; ++d)
    if (n % d == 0) divisors.push_back(d);

  std::vector<std::vector<Int>> tuples;
  std::vector<Int> cur;
  std::function<void(std::size_t)> rec_t = [&](std::size_t s) {
    if (s == r) {
      tuples.push_back(cur);
      return;
    }
    for (const Int& d : divisors) {
      cur.push_back(d);
      rec_t(s + 1);
      cur.pop_back();
    }
  };
  rec_t(0);

  Int total = 0;
  for (const auto& t : tuples) total += detail::hnf_count_for_diagonal(t);
  if (total > Int(budget.max_candidates)) throw BudgetError("enumeration budget exceeded");

  // K ⊇ n·l  ⇔  h x = n e_j solvable over Z for every j (h is triangular)
  auto contains_scaled_standard = [&](const ZMat& h) {
    std::vector<Int> x(r);
    for (std::size_t j = 0; j < r; ++j) {
      for (std::size_t i = 0; i < r; ++i) {
        Int rhs = (i == j) ? n : Int(0);
        for (std::size_t k = 0; k < i; ++k) rhs -= h(i, k) * x[k];
        if (rhs % h(i, i) != 0) return false;
        x[i] = rhs / h(i, i);
      }
    }
    return true;
  };

  std::vector<ScaledLattice> out;
  for (const auto& t : tuples) {
    detail::hnf_shapes_for_diagonal(t, [&](const ZMat& h) {
      if (!contains_scaled_standard(h)) return;
      out.emplace_back(Lattice(l.basis() * h), n);
    });
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace symplat

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "symplat/lattice.hpp"
#include "symplat/rng.hpp"

namespace symplat {

/// glue_disc_check rejects inputs with the name of the failed hypothesis.
class HypothesisError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An alternating integer pairing on a lattice.  The Gram matrix is taken
/// with respect to the stored canonical basis of `lattice`.
class SymplecticLattice {
 public:
  SymplecticLattice(Lattice lattice, ZMat gram)
      : lattice_(std::move(lattice)), gram_(std::move(gram)) {
    const std::size_t r = lattice_.rank();
    if (gram_.rows() != r || gram_.cols() != r) throw DomainError("gram size mismatch");
    for (std::size_t i = 0; i < r; ++i) {
      if (gram_(i, i) != 0) throw DomainError("gram has nonzero diagonal");
      for (std::size_t j = 0; j < i; ++j)
        if (gram_(i, j) != -gram_(j, i)) throw DomainError("gram is not antisymmetric");
    }
  }

  const Lattice& lattice() const { return lattice_; }
  const ZMat& gram() const { return gram_; }
  std::size_t rank() const { return lattice_.rank(); }

  bool is_degenerate() const { return det(gram_) == 0; }
  bool is_perfect() const {
    Int d = det(gram_);
    return d == 1 || d == -1;
  }

  bool operator==(const SymplecticLattice& o) const {
    return lattice_ == o.lattice_ && gram_ == o.gram_;
  }

 private:
  Lattice lattice_;
  ZMat gram_;
};

/// The standard alternating plane form n*J_2 = [[0, n], [-n, 0]].
inline ZMat j2(const Int& n = 1) {
  ZMat j(2, 2);
  j(0, 1) = n;
  j(1, 0) = -n;
  return j;
}

/// Orthogonal sum of 2x2 plane blocks: d_1 J_2 ⊕ ... ⊕ d_g J_2.
inline ZMat j_blocks(const std::vector<Int>& multipliers) {
  const std::size_t g = multipliers.size();
  ZMat j(2 * g, 2 * g);
  for (std::size_t i = 0; i < g; ++i) {
    j(2 * i, 2 * i + 1) = multipliers[i];
    j(2 * i + 1, 2 * i) = -multipliers[i];
  }
  return j;
}

/// Standard perfect rank-2g symplectic lattice with form J_2 ⊕ ... ⊕ J_2.
inline SymplecticLattice standard_symplectic(std::size_t g) {
  return SymplecticLattice(Lattice::standard(2 * g), j_blocks(std::vector<Int>(g, 1)));
}

/// Restriction of an ambient form to a sublattice of its rational span.
struct FormRestriction {
  Lattice sub;
  ZMat gram;
  bool degenerate;

  SymplecticLattice as_symplectic() const {
    if (degenerate) throw DomainError("restricted form is degenerate");
    return SymplecticLattice(sub, gram);
  }
};

/// Gram matrix of amb's form on the basis of `sub`.
/// Errors with "form not integral on sublattice" when the restriction
/// leaves the integers.
inline FormRestriction restrict_form(const SymplecticLattice& amb, const Lattice& sub) {
  QMat c = coords_in(amb.lattice(), sub.basis());
  QMat g = c.transpose() * to_qmat(amb.gram()) * c;
  if (!is_integral(g)) throw DomainError("form not integral on sublattice");
  ZMat gz = to_zmat(g);
  return FormRestriction{sub, gz, det(gz) == 0};
}

/// det of the Gram matrix; for alternating forms of even rank this is the
/// Pfaffian squared, so the result is a non-negative integer.
inline Int discriminant(const SymplecticLattice& s) {
  Int d = det(s.gram());
  if (d == 0) throw DomainError("form is degenerate");
  return d;
}

/// Alternating elementary divisor data: transform columns give a basis in
/// which the Gram matrix is d_1 J_2 ⊕ ... ⊕ d_g J_2 with d_1 | d_2 | ...
struct SymplecticBasis {
  ZMat transform;            // unimodular; transform^T * gram * transform = blocks
  std::vector<Int> divisors; // d_1 | d_2 | ...
};

inline SymplecticBasis symplectic_basis(const SymplecticLattice& s) {
  if (s.is_degenerate()) throw DomainError("form is degenerate");
  const std::size_t n = s.rank();
  if (n % 2 != 0) throw DomainError("odd rank alternating form is degenerate");
  ZMat g = s.gram();
  ZMat u = ZMat::identity(n);

  // basis ops, mirrored congruently on g
  auto col_add = [&](std::size_t i, std::size_t j, const Int& t) {
    // e_i <- e_i + t e_j
    g.col_sub(i, j, Int(-t));
    g.row_sub(i, j, Int(-t));
    u.col_sub(i, j, Int(-t));
  };
  auto swap_basis = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    g.swap_cols(i, j);
    g.swap_rows(i, j);
    u.swap_cols(i, j);
  };

  const std::size_t blocks = n / 2;
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const std::size_t t = 2 * blk;
    for (;;) {
      // move a nonzero entry of minimal magnitude to (t, t+1)
      std::size_t bi = t, bj = t + 1;
      bool found = false;
      Int best;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          if (g(i, j) == 0) continue;
          Int m = abs(g(i, j));
          if (!found || m < best) {
            best = m;
            bi = i;
            bj = j;
            found = true;
          }
        }
      if (!found) throw DomainError("form is degenerate");
      swap_basis(t, bi);
      swap_basis(t + 1, bj);

      // euclid on rows t, t+1 until clean; the pivot magnitude strictly
      // decreases on every dirty round, so this terminates
      for (;;) {
        bool dirty = false;
        for (std::size_t j = t + 2; j < n; ++j) {
          if (g(t, j) == 0) continue;
          Int q = floor_div(g(t, j), g(t, t + 1));
          col_add(j, t + 1, -q);
          if (g(t, j) != 0) {
            swap_basis(t + 1, j);
            dirty = true;
          }
        }
        for (std::size_t j = t + 2; j < n; ++j) {
          if (g(t + 1, j) == 0) continue;
          Int q = floor_div(g(t + 1, j), g(t + 1, t));
          col_add(j, t, -q);
          if (g(t + 1, j) != 0) {
            swap_basis(t, j);
            dirty = true;
          }
        }
        if (!dirty) break;
      }

      // divisor chain: the pivot must divide the remaining submatrix
      const Int& p = g(t, t + 1);
      bool divides_all = true;
      for (std::size_t i = t + 2; i < n && divides_all; ++i)
        for (std::size_t j = i + 1; j < n && divides_all; ++j)
          if (g(i, j) % p != 0) {
            col_add(t, i, Int(1));  // pulls the offending entry into row t
            divides_all = false;
          }
      if (divides_all) break;
    }
    if (g(t, t + 1) < 0) swap_basis(t, t + 1);
  }

  SymplecticBasis res;
  res.transform = u;
  for (std::size_t blk = 0; blk < blocks; ++blk) res.divisors.push_back(g(2 * blk, 2 * blk + 1));
  return res;
}

/// Saturated sublattice {v in amb : psi(v, sub) = 0}.
inline Lattice orthogonal_complement(const SymplecticLattice& amb, const Lattice& sub) {
  if (sub.rank() == 0) return amb.lattice();
  QMat cq = coords_in(amb.lattice(), sub.basis());
  if (!is_integral(cq)) throw DomainError("sublattice not contained in ambient lattice");
  ZMat c = to_zmat(cq);
  // pairing of ambient basis vector e_j with sub vectors: rows of c^T g
  ZMat pair = c.transpose() * amb.gram();
  ZMat ker = kernel_z(pair);  // saturated
  return Lattice(amb.lattice().basis() * ker);
}

struct GlueDiscReport {
  Int d1, d2, index;
};

/// The glue-discriminant contract: for a perfect ambient form and primitive
/// mutually orthogonal sublattices whose sum has finite index,
/// disc(psi|l1) = disc(psi|l2) = [amb : l1 + l2].
inline GlueDiscReport glue_disc_check(const SymplecticLattice& amb, const Lattice& l1,
                                      const Lattice& l2) {
  if (!amb.is_perfect()) throw HypothesisError("form not perfect");
  if (saturate(l1, amb.lattice()) != l1 || saturate(l2, amb.lattice()) != l2)
    throw HypothesisError("not primitive");
  QMat c1 = coords_in(amb.lattice(), l1.basis());
  QMat c2 = coords_in(amb.lattice(), l2.basis());
  if (!is_integral(c1) || !is_integral(c2)) throw HypothesisError("not primitive");
  QMat cross = c1.transpose() * to_qmat(amb.gram()) * c2;
  if (!cross.is_zero()) throw HypothesisError("not orthogonal");
  if (l1.rank() + l2.rank() != amb.rank()) throw HypothesisError("sum not finite index");

  ZMat joint(amb.rank(), l1.rank() + l2.rank());
  for (std::size_t i = 0; i < amb.rank(); ++i) {
    for (std::size_t j = 0; j < l1.rank(); ++j) joint(i, j) = l1.basis()(i, j);
    for (std::size_t j = 0; j < l2.rank(); ++j) joint(i, l1.rank() + j) = l2.basis()(i, j);
  }
  Lattice sum(joint);
  if (sum.rank() != amb.rank()) throw HypothesisError("sum not finite index");

  GlueDiscReport rep;
  rep.d1 = det(restrict_form(amb, l1).gram);
  rep.d2 = det(restrict_form(amb, l2).gram);
  rep.index = index_of_sublattice(sum, amb.lattice());
  return rep;
}

/// One glued rank-4 instance in the basis of the glued lattice M:
/// gram = Gram of the ambient perfect form on M, factor{1,2} are the two
/// original plane factors as sublattices of M.  glue index = [M : f1 ⊕ f2].
struct GluedInstance {
  ZMat gram;        // 4x4, perfect
  ZMat factor1;     // 4x2 coordinates in M
  ZMat factor2;     // 4x2
  Int multiplier;   // n with psi|factor_i = n * (principal)
};

/// Enumerates, for glue multiplier n, all superlattices M of Λ1 ⊕ Λ2 inside
/// (1/n)(Λ1 ⊕ Λ2) on which n(ψ1 ⊕ ψ2) stays integral and perfect, rebased to
/// M's own coordinates.  `require_primitive` keeps only instances where both
/// factors are primitive in M (glue index exactly n^2).
inline std::vector<GluedInstance> enumerate_glued_instances(const Int& n, bool require_primitive,
                                                            const EnumBudget& budget = {}) {
  ZMat base_form = j_blocks({n, n});  // n(psi1 ⊕ psi2) on Z^4
  std::vector<GluedInstance> out;
  Lattice z4 = Lattice::standard(4);
  for (const auto& m : enumerate_superlattices(z4, n, budget)) {
    // K = denom * M with l ⊆ M; work with B = basis of K, denominator den
    const ZMat& bk = m.numerator.basis();
    const Int& den = m.denom;
    // Gram on M: (B^T base_form B) / den^2 must be integral
    ZMat gk = bk.transpose() * base_form * bk;
    Int den2 = den * den;
    bool integral = true;
    for (std::size_t i = 0; i < 4 && integral; ++i)
      for (std::size_t j = 0; j < 4 && integral; ++j)
        if (gk(i, j) % den2 != 0) integral = false;
    if (!integral) continue;
    ZMat gm(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) gm(i, j) = gk(i, j) / den2;
    Int d = det(gm);
    if (d != 1 && d != -1) continue;  // not perfect

    // factor coordinates in M: den * B^{-1} * (standard plane inclusions)
    QMat binv = inverse(to_qmat(bk));
    ZMat f1(4, 2), f2(4, 2);
    bool coords_ok = true;
    for (std::size_t i = 0; i < 4 && coords_ok; ++i)
      for (std::size_t j = 0; j < 2 && coords_ok; ++j) {
        Rat a = binv(i, j) * Rat(den);
        Rat b = binv(i, 2 + j) * Rat(den);
        if (a.get_den() != 1 || b.get_den() != 1) coords_ok = false;
        else {
          f1(i, j) = a.get_num();
          f2(i, j) = b.get_num();
        }
      }
    if (!coords_ok) continue;  // factors not inside M (cannot happen; guard)

    if (require_primitive) {
      Lattice lf1(f1), lf2(f2);
      Lattice m_std = Lattice::standard(4);
      if (saturate(lf1, m_std) != lf1 || saturate(lf2, m_std) != lf2) continue;
    }
    out.push_back(GluedInstance{gm, f1, f2, n});
  }
  return out;
}

/// Applies a unimodular change of basis to a glued instance; the new basis
/// vectors are the columns of v expressed in the old basis.
inline GluedInstance conjugate_instance(const GluedInstance& inst, const ZMat& v, const ZMat& v_inv) {
  GluedInstance out;
  out.gram = v.transpose() * inst.gram * v;
  out.factor1 = v_inv * inst.factor1;
  out.factor2 = v_inv * inst.factor2;
  out.multiplier = inst.multiplier;
  return out;
}

/// Random unimodular matrix together with its exact inverse.
inline std::pair<ZMat, ZMat> random_unimodular_with_inverse(Rng& rng, std::size_t n, int steps = 8,
                                                            long bound = 2) {
  ZMat u = ZMat::identity(n);
  ZMat uinv = ZMat::identity(n);
  for (int s = 0; s < steps; ++s) {
    std::size_t i = rng.index(n), j = rng.index(n);
    if (i == j) continue;
    long t = rng.uniform(-bound, bound);
    u.col_sub(i, j, Int(-t));     // col_i += t col_j
    uinv.row_sub(j, i, Int(t));   // inverse op on rows
  }
  return {u, uinv};
}

}  // namespace symplat

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <array>

#include "symplat/fit.hpp"
#include "symplat/heights.hpp"

namespace symplat {

/// Precision exhaustion near a fundamental-domain boundary; the message
/// carries both candidate representatives.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

struct ReduceOptions {
  unsigned precision_bits = 128;
  unsigned tolerance_bits = 64;  // tolerance = 2^-tolerance_bits
  unsigned iter_cap = 10'000;
};

/// Scoped default precision for mpf temporaries.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned bits) : old_(mpf_get_default_prec()) {
    mpf_set_default_prec(bits);
  }
  ~PrecisionGuard() { mpf_set_default_prec(old_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  mp_bitcnt_t old_;
};

inline mpf_class pow2_neg(unsigned bits) {
  mpf_class t(1);
  mpf_div_2exp(t.get_mpf_t(), t.get_mpf_t(), bits);
  return t;
}

/// Nearest integer to an mpf value.
inline Int round_to_int(const mpf_class& x) {
  mpf_class shifted = x + mpf_class(0.5);
  mpf_class fl;
  mpf_floor(fl.get_mpf_t(), shifted.get_mpf_t());
  Int r;
  mpz_set_f(r.get_mpz_t(), fl.get_mpf_t());
  return r;
}

/// A point of the upper half plane (degree 1) at stated working precision.
struct H1Point {
  mpf_class re, im;
};

struct ReduceH1Result {
  H1Point reduced;
  ZMat witness;  // 2x2, det exactly 1, witness * input = reduced
};

namespace detail {

inline ZMat sl2_t_power(const Int& k) {
  ZMat m = ZMat::identity(2);
  m(0, 1) = k;
  return m;
}

inline ZMat sl2_s() {
  ZMat m(2, 2);
  m(0, 1) = -1;
  m(1, 0) = 1;
  return m;
}

/// Moebius action of an integer 2x2 matrix on (re, im), im > 0.
inline H1Point moebius(const ZMat& g, const H1Point& tau) {
  mpf_class a(g(0, 0).get_d()), b(g(0, 1).get_d()), c(g(1, 0).get_d()), d(g(1, 1).get_d());
  // (a tau + b) / (c tau + d)
  mpf_class nre = a * tau.re + b, nim = a * tau.im;
  mpf_class dre = c * tau.re + d, dim = c * tau.im;
  mpf_class den = dre * dre + dim * dim;
  H1Point out;
  out.re = (nre * dre + nim * dim) / den;
  out.im = (nim * dre - nre * dim) / den;
  return out;
}

inline ReduceH1Result reduce_h1_attempt(const H1Point& tau, const ReduceOptions& opts,
                                        bool& converged) {
  const mpf_class tol = pow2_neg(opts.tolerance_bits);
  mpf_class re = tau.re, im = tau.im;
  ZMat w = ZMat::identity(2);
  converged = false;
  for (unsigned iter = 0; iter < opts.iter_cap; ++iter) {
    Int t = round_to_int(re);
    if (t != 0) {
      re -= mpf_class(t.get_d());
      w = sl2_t_power(-t) * w;
    }
    mpf_class norm = re * re + im * im;
    if (norm < 1 - tol) {
      mpf_class nre = -re / norm, nim = im / norm;
      re = nre;
      im = nim;
      w = sl2_s() * w;
    } else {
      converged = true;
      break;
    }
  }
  if (converged) {
    // canonical boundary representatives: re >= 0 on the unit circle,
    // re = +1/2 on the vertical walls
    mpf_class norm = re * re + im * im;
    if (abs(norm - 1) <= tol && re < -tol) {
      mpf_class nre = -re / norm, nim = im / norm;
      re = nre;
      im = nim;
      w = sl2_s() * w;
    }
    if (abs(re + mpf_class(0.5)) <= tol) {
      re += 1;
      w = sl2_t_power(1) * w;
    }
  }
  return ReduceH1Result{H1Point{re, im}, w};
}

}  // namespace detail

/// Reduction into the standard fundamental domain |Re| <= 1/2, |tau| >= 1,
/// with the unimodular witness.  Doubles the working precision once on
/// non-convergence; persistent boundary oscillation reports "boundary
/// ambiguity" with both candidates.
inline ReduceH1Result reduce_h1(const H1Point& tau, const ReduceOptions& opts = {}) {
  {
    PrecisionGuard guard(opts.precision_bits);
    mpf_class tol = pow2_neg(opts.tolerance_bits);
    if (!(tau.im > tol)) throw DomainError("point not in the upper half plane");
    bool ok = false;
    ReduceH1Result r = detail::reduce_h1_attempt(tau, opts, ok);
    if (ok) return r;
    // one automatic precision doubling
    PrecisionGuard guard2(2 * opts.precision_bits);
    ReduceOptions twice = opts;
    twice.precision_bits *= 2;
    ReduceH1Result r2 = detail::reduce_h1_attempt(tau, twice, ok);
    if (ok) return r2;
    std::ostringstream os;
    os << "boundary ambiguity: candidates re=" << r.reduced.re << " im=" << r.reduced.im
       << " and re=" << r2.reduced.re << " im=" << r2.reduced.im;
    throw AmbiguityError(os.str());
  }
}

/// Degree-2 Siegel upper half space point: symmetric 2x2 complex matrix
/// with positive definite imaginary part.
struct H2Point {
  mpf_class re11, re12, re22;
  mpf_class im11, im12, im22;
};

struct ReduceH2Result {
  H2Point reduced;
  ZMat witness;  // 4x4 integral symplectic
  bool converged;
  int inversions;                      // accepted inversion steps
  std::vector<double> det_im_history;  // descent certificate data
};

namespace detail {

// 2x2 complex helpers on (re, im) mpf pairs
struct C2 {
  mpf_class re, im;
};
inline C2 cadd(const C2& a, const C2& b) { return {a.re + b.re, a.im + b.im}; }
inline C2 csub(const C2& a, const C2& b) { return {a.re - b.re, a.im - b.im}; }
inline C2 cmul(const C2& a, const C2& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline C2 cdiv(const C2& a, const C2& b) {
  mpf_class den = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

using CMat2 = std::array<std::array<C2, 2>, 2>;

inline CMat2 cmat_from_point(const H2Point& z) {
  CMat2 m;
  m[0][0] = {z.re11, z.im11};
  m[0][1] = {z.re12, z.im12};
  m[1][0] = {z.re12, z.im12};
  m[1][1] = {z.re22, z.im22};
  return m;
}

inline CMat2 cmat_mul(const CMat2& a, const CMat2& b) {
  CMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      C2 acc{mpf_class(0), mpf_class(0)};
      for (int k = 0; k < 2; ++k) acc = cadd(acc, cmul(a[i][k], b[k][j]));
      r[i][j] = acc;
    }
  return r;
}

inline C2 cmat_det(const CMat2& a) {
  return csub(cmul(a[0][0], a[1][1]), cmul(a[0][1], a[1][0]));
}

inline CMat2 cmat_inv(const CMat2& a) {
  C2 d = cmat_det(a);
  CMat2 r;
  r[0][0] = cdiv(a[1][1], d);
  r[1][1] = cdiv(a[0][0], d);
  r[0][1] = cdiv(C2{-a[0][1].re, -a[0][1].im}, d);
  r[1][0] = cdiv(C2{-a[1][0].re, -a[1][0].im}, d);
  return r;
}

inline CMat2 cmat_from_int_block(const ZMat& g, std::size_t r0, std::size_t c0) {
  CMat2 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m[i][j] = {mpf_class(g(r0 + i, c0 + j).get_d()), mpf_class(0)};
  return m;
}

/// Symplectic action z -> (A z + B)(C z + D)^{-1}.
inline H2Point sp4_act(const ZMat& g, const H2Point& z) {
  CMat2 zm = cmat_from_point(z);
  CMat2 a = cmat_from_int_block(g, 0, 0), b = cmat_from_int_block(g, 0, 2);
  CMat2 c = cmat_from_int_block(g, 2, 0), d = cmat_from_int_block(g, 2, 2);
  CMat2 num = cmat_mul(a, zm);
  CMat2 den = cmat_mul(c, zm);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      num[i][j] = cadd(num[i][j], b[i][j]);
      den[i][j] = cadd(den[i][j], d[i][j]);
    }
  CMat2 res = cmat_mul(num, cmat_inv(den));
  H2Point out;
  out.re11 = res[0][0].re;
  out.im11 = res[0][0].im;
  out.re22 = res[1][1].re;
  out.im22 = res[1][1].im;
  // resymmetrise against roundoff
  out.re12 = (res[0][1].re + res[1][0].re) / 2;
  out.im12 = (res[0][1].im + res[1][0].im) / 2;
  return out;
}

/// |det(C z + D)|^2.
inline mpf_class sp4_cocycle_norm(const ZMat& g, const H2Point& z) {
  CMat2 zm = cmat_from_point(z);
  CMat2 c = cmat_from_int_block(g, 2, 0), d = cmat_from_int_block(g, 2, 2);
  CMat2 den = cmat_mul(c, zm);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) den[i][j] = cadd(den[i][j], d[i][j]);
  C2 det = cmat_det(den);
  return det.re * det.re + det.im * det.im;
}

inline bool is_symplectic4(const ZMat& g) {
  ZMat j(4, 4);
  j(0, 2) = 1;
  j(1, 3) = 1;
  j(2, 0) = -1;
  j(3, 1) = -1;
  return g.transpose() * j * g == j;
}

/// GL2 embedding z -> U^T z U.
inline ZMat sp4_gl_embed(const ZMat& u) {
  // [[U^T, 0], [0, U^{-1}]]
  Int d = det(u);
  if (d != 1 && d != -1) throw DomainError("embedding requires a unimodular matrix");
  ZMat ui(2, 2);
  ui(0, 0) = u(1, 1) * d;
  ui(1, 1) = u(0, 0) * d;
  ui(0, 1) = -u(0, 1) * d;
  ui(1, 0) = -u(1, 0) * d;
  ZMat g(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      g(i, j) = u(j, i);
      g(2 + i, 2 + j) = ui(i, j);
    }
  return g;
}

inline ZMat sp4_translation(const ZMat& b) {
  ZMat g = ZMat::identity(4);
  g(0, 2) = b(0, 0);
  g(0, 3) = b(0, 1);
  g(1, 2) = b(1, 0);
  g(1, 3) = b(1, 1);
  return g;
}

/// Inversion-type generators used for the |det(Cz+D)| >= 1 conditions:
/// the full inversion with symmetric integer shifts D (entries in {-1,0,1})
/// and the two embedded SL2 inversions.
inline const std::vector<ZMat>& siegel_generators() {
  static const std::vector<ZMat> gens = [] {
    std::vector<ZMat> out;
    auto add_full = [&](long d11, long d12, long d22) {
      ZMat g(4, 4);
      // [[0, -I], [I, D]]
      g(0, 2) = -1;
      g(1, 3) = -1;
      g(2, 0) = 1;
      g(3, 1) = 1;
      g(2, 2) = d11;
      g(2, 3) = d12;
      g(3, 2) = d12;
      g(3, 3) = d22;
      return g;
    };
    for (long a : {-1L, 0L, 1L})
      for (long b : {-1L, 0L, 1L})
        for (long c : {-1L, 0L, 1L}) out.push_back(add_full(a, b, c));
    // embedded SL2 inversions acting on z11 resp. z22
    ZMat j1(4, 4);
    j1(0, 2) = -1;
    j1(1, 1) = 1;
    j1(2, 0) = 1;
    j1(3, 3) = 1;
    out.push_back(j1);
    ZMat j2m(4, 4);
    j2m(0, 0) = 1;
    j2m(1, 3) = -1;
    j2m(2, 2) = 1;
    j2m(3, 1) = 1;
    out.push_back(j2m);
    for (const ZMat& g : out)
      if (!is_symplectic4(g)) throw Error("internal: non-symplectic generator");
    return out;
  }();
  return gens;
}

}  // namespace detail

/// Gottschling-style reduction for the degree-2 Siegel space: Minkowski-
/// reduce the imaginary part, reduce the real part mod 1, and apply the
/// finite inversion-generator list while some |det(Cz+D)| < 1.  det(Im z)
/// never decreases across accepted steps (descent certificate).
inline ReduceH2Result reduce_h2(const H2Point& z_in, const ReduceOptions& opts = {}) {
  PrecisionGuard guard(opts.precision_bits);
  const mpf_class tol = pow2_neg(opts.tolerance_bits);
  H2Point z = z_in;
  {
    mpf_class det_im = z.im11 * z.im22 - z.im12 * z.im12;
    if (!(z.im11 > tol) || !(det_im > tol))
      throw DomainError("imaginary part not positive definite");
  }
  ZMat w = ZMat::identity(4);
  int inversions = 0;
  std::vector<double> det_im_history;
  auto det_im = [&]() -> mpf_class { return z.im11 * z.im22 - z.im12 * z.im12; };
  det_im_history.push_back(det_im().get_d());

  bool converged = false;
  for (unsigned iter = 0; iter < opts.iter_cap; ++iter) {
    bool changed = false;

    // Minkowski (Lagrange) reduction of Im z by a GL2(Z) congruence
    {
      ZMat u = ZMat::identity(2);
      mpf_class y11 = z.im11, y12 = z.im12, y22 = z.im22;
      for (int it = 0; it < 64; ++it) {
        Int t = round_to_int(y12 / y11);
        if (t != 0) {
          // column op: e2 <- e2 - t e1 on the quadratic form
          mpf_class tf(t.get_d());
          y22 = y22 - 2 * tf * y12 + tf * tf * y11;
          y12 = y12 - tf * y11;
          ZMat shear = ZMat::identity(2);
          shear(0, 1) = -t;
          u = u * shear;
          continue;
        }
        if (y11 > y22 + tol) {
          std::swap(y11, y22);
          y12 = -y12;
          ZMat rot(2, 2);
          rot(0, 1) = -1;
          rot(1, 0) = 1;
          u = u * rot;
          continue;
        }
        break;
      }
      if (u != ZMat::identity(2)) {
        // z -> u^T z u
        w = detail::sp4_gl_embed(u) * w;
        z = detail::sp4_act(detail::sp4_gl_embed(u), z);
        changed = true;
      }
    }

    // real part into [-1/2, 1/2]
    {
      Int b11 = round_to_int(z.re11), b12 = round_to_int(z.re12), b22 = round_to_int(z.re22);
      if (b11 != 0 || b12 != 0 || b22 != 0) {
        ZMat b(2, 2);
        b(0, 0) = -b11;
        b(0, 1) = -b12;
        b(1, 0) = -b12;
        b(1, 1) = -b22;
        ZMat t = detail::sp4_translation(b);
        w = t * w;
        z = detail::sp4_act(t, z);
        changed = true;
      }
    }

    // inversion generators
    bool inverted = false;
    for (const ZMat& g : detail::siegel_generators()) {
      mpf_class norm = detail::sp4_cocycle_norm(g, z);
      if (norm < (1 - tol) * (1 - tol)) {
        z = detail::sp4_act(g, z);
        w = g * w;
        ++inversions;
        det_im_history.push_back(det_im().get_d());
        inverted = true;
        changed = true;
        break;
      }
    }
    if (!changed) {
      converged = true;
      break;
    }
    (void)inverted;
  }
  return ReduceH2Result{z, w, converged, inversions, det_im_history};
}

/// Canonical upper-triangular coset representatives [[a, b], [0, d]] with
/// ad = n and 0 <= b < d; their count is sigma_1(n).
inline std::vector<ZMat> hecke_cosets_sl2(const Int& n, const EnumBudget& budget = {}) {
  if (n < 1) throw DomainError("level must be positive");
  // count first
  Int count = 0;
  for (Int d = 1; d <= n; ++d)
    if (n % d == 0) count += d;
  if (count > Int(budget.max_candidates)) throw BudgetError("enumeration budget exceeded");
  std::vector<ZMat> out;
  for (Int a = 1; a <= n; ++a) {
    if (n % a != 0) continue;
    Int d = n / a;
    for (Int b = 0; b < d; ++b) {
      ZMat m(2, 2);
      m(0, 0) = a;
      m(0, 1) = b;
      m(1, 1) = d;
      out.push_back(m);
    }
  }
  return out;
}

struct HeightDetstarRow {
  long n;
  int rep_index;
  Int det_star;
  Int h1_witness;
  bool reduced_ok;
};

struct HeightDetstarReport {
  std::vector<HeightDetstarRow> rows;
  FitReport h1_envelope;  // log(max H1 at level n) against log(n)

  std::string to_csv() const {
    std::ostringstream os;
    os << "n,rep_index,detstar,h1_witness,reduced_flag\n";
    for (const auto& r : rows)
      os << r.n << "," << r.rep_index << "," << r.det_star << "," << r.h1_witness << ","
         << (r.reduced_ok ? 1 : 0) << "\n";
    return os.str();
  }
};

/// For each Hecke representative g of level n <= n_max, reduces g applied to
/// a fixed base point into the fundamental domain and records det*(g) = n
/// together with the 1-height of the fundamental-domain-compatible
/// representative (reduction witness times g).
inline HeightDetstarReport height_vs_detstar_experiment(long n_max, int samples_per_n = 1 << 30,
                                                        const ReduceOptions& opts = {}) {
  PrecisionGuard guard(opts.precision_bits);
  HeightDetstarReport rep;
  std::vector<std::pair<double, double>> envelope;
  const H1Point base{mpf_class(1) / mpf_class(10), mpf_class(6) / mpf_class(5)};
  for (long n = 1; n <= n_max; ++n) {
    auto cosets = hecke_cosets_sl2(Int(n));
    int take = samples_per_n < static_cast<long>(cosets.size())
                   ? samples_per_n
                   : static_cast<int>(cosets.size());
    Int max_h1 = 0;
    for (int i = 0; i < take; ++i) {
      const ZMat& g = cosets[i];
      HeightDetstarRow row;
      row.n = n;
      row.rep_index = i;
      row.det_star = detstar(g);
      row.reduced_ok = true;
      try {
        H1Point moved = detail::moebius(g, base);
        ReduceH1Result red = reduce_h1(moved, opts);
        ZMat compat = red.witness * g;
        row.h1_witness = height_h1_matrix(compat);
      } catch (const AmbiguityError&) {
        row.reduced_ok = false;
        row.h1_witness = 0;
      }
      if (row.reduced_ok && row.h1_witness > max_h1) max_h1 = row.h1_witness;
      rep.rows.push_back(std::move(row));
    }
    if (max_h1 > 0) envelope.emplace_back(std::log(static_cast<double>(n)), std::log(max_h1.get_d()));
  }
  rep.h1_envelope = fit_loglog(envelope);
  return rep;
}

}  // namespace symplat

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "symplat/lattice.hpp"

namespace symplat {

/// Trial-division factorisation; all values here are desk-scale.
inline std::map<Int, int> factorize(Int n) {
  if (n < 0) n = -n;
  std::map<Int, int> out;
  if (n <= 1) return out;
  for (Int p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      out[p]++;
      n /= p;
    }
  }
  if (n > 1) out[n]++;
  return out;
}

inline int valuation(Int n, const Int& p) {
  if (n == 0) throw DomainError("valuation of zero");
  if (n < 0) n = -n;
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

inline bool is_fundamental_discriminant(const Int& d) {
  if (d >= 0) return false;
  Int m = ((d % 4) + 4) % 4;
  if (m == 1) {
    for (Int p = 2; p * p <= -d; ++p)
      if (d % (p * p) == 0) return false;
    return true;
  }
  if (m != 0) return false;
  Int q = d / 4;
  Int qm = ((q % 4) + 4) % 4;
  if (qm != 2 && qm != 3) return false;
  for (Int p = 2; p * p <= -q; ++p)
    if (q % (p * p) == 0) return false;
  return true;
}

/// An order in an imaginary quadratic field, given by its discriminant
/// D = f^2 * D_K with D_K fundamental.  Z-basis {1, w}, w = (D + sqrt(D))/2,
/// so tr(w) = D and N(w) = (D^2 - D)/4.
class ImaginaryQuadraticOrder {
 public:
  explicit ImaginaryQuadraticOrder(Int disc) : disc_(std::move(disc)) {
    if (disc_ >= 0) throw DomainError("discriminant must be negative");
    Int m = ((disc_ % 4) + 4) % 4;
    if (m != 0 && m != 1) throw DomainError("discriminant must be 0 or 1 mod 4");
    Int f0 = 1;
    for (const auto& [p, e] : factorize(disc_))
      for (int i = 0; i < e / 2; ++i) f0 *= p;
    conductor_ = 0;
    for (Int f = f0; f >= 1; --f) {
      if (f0 % f != 0) continue;
      if (is_fundamental_discriminant(disc_ / (f * f))) {
        conductor_ = f;
        break;
      }
    }
    if (conductor_ == 0) throw DomainError("invalid quadratic discriminant");
    fundamental_ = disc_ / (conductor_ * conductor_);
  }

  const Int& disc() const { return disc_; }
  const Int& conductor() const { return conductor_; }
  const Int& fundamental_disc() const { return fundamental_; }
  bool is_maximal() const { return conductor_ == 1; }

  Int omega_trace() const { return disc_; }
  Int omega_norm() const { return (disc_ * disc_ - disc_) / 4; }

  /// Multiplication-by-omega matrix on the basis {1, w}.
  ZMat omega_matrix() const {
    ZMat m(2, 2);
    m(0, 1) = -omega_norm();
    m(1, 0) = 1;
    m(1, 1) = omega_trace();
    return m;
  }

  bool operator==(const ImaginaryQuadraticOrder& o) const { return disc_ == o.disc_; }
  bool operator!=(const ImaginaryQuadraticOrder& o) const { return disc_ != o.disc_; }

 private:
  Int disc_;
  Int conductor_;
  Int fundamental_;
};

/// Trace-form Gram determinant of a quadratic order: its discriminant.
inline Int trace_form_disc(const ImaginaryQuadraticOrder& o) {
  const Int& d = o.disc();
  ZMat g(2, 2);
  g(0, 0) = 2;
  g(0, 1) = d;
  g(1, 0) = d;
  g(1, 1) = (d * d + d) / 2;
  return det(g);
}

/// Ambient product of components, each the integers Z (rank 1) or an
/// imaginary quadratic order (rank 2, basis {1, w}); elements are integer
/// coordinate vectors, multiplication is componentwise and exact.
class ProductFrame {
 public:
  using Component = std::optional<ImaginaryQuadraticOrder>;  // nullopt = Z

  explicit ProductFrame(std::vector<Component> components)
      : components_(std::move(components)) {
    if (components_.empty()) throw DomainError("frame needs at least one component");
    rank_ = 0;
    for (const auto& c : components_) {
      offsets_.push_back(rank_);
      rank_ += c ? 2 : 1;
    }
  }

  static ProductFrame single(ImaginaryQuadraticOrder o) { return ProductFrame({Component(o)}); }
  static ProductFrame z_cross(ImaginaryQuadraticOrder o) {
    return ProductFrame({Component(), Component(o)});
  }
  static ProductFrame pair(ImaginaryQuadraticOrder a, ImaginaryQuadraticOrder b) {
    return ProductFrame({Component(a), Component(b)});
  }

  std::size_t rank() const { return rank_; }
  const std::vector<Component>& components() const { return components_; }

  std::vector<Int> identity() const {
    std::vector<Int> e(rank_, 0);
    for (std::size_t c = 0; c < components_.size(); ++c) e[offsets_[c]] = 1;
    return e;
  }

  std::vector<Int> mul(const std::vector<Int>& a, const std::vector<Int>& b) const {
    std::vector<Int> r(rank_, 0);
    for (std::size_t c = 0; c < components_.size(); ++c) {
      const std::size_t o = offsets_[c];
      if (components_[c]) {
        const Int t = components_[c]->omega_trace(), n = components_[c]->omega_norm();
        r[o] = a[o] * b[o] - n * a[o + 1] * b[o + 1];
        r[o + 1] = a[o] * b[o + 1] + a[o + 1] * b[o] + t * a[o + 1] * b[o + 1];
      } else {
        r[o] = a[o] * b[o];
      }
    }
    return r;
  }

  /// Matrix of multiplication by `a` on the frame basis.
  ZMat mult_matrix(const std::vector<Int>& a) const {
    ZMat m(rank_, rank_);
    for (std::size_t j = 0; j < rank_; ++j) {
      std::vector<Int> e(rank_, 0);
      e[j] = 1;
      std::vector<Int> col = mul(a, e);
      for (std::size_t i = 0; i < rank_; ++i) m(i, j) = col[i];
    }
    return m;
  }

  /// Trace of the underlying Q-algebra (sum of component traces).
  Int trace(const std::vector<Int>& a) const {
    Int t = 0;
    for (std::size_t c = 0; c < components_.size(); ++c) {
      const std::size_t o = offsets_[c];
      if (components_[c])
        t += 2 * a[o] + components_[c]->omega_trace() * a[o + 1];
      else
        t += a[o];
    }
    return t;
  }

  bool operator==(const ProductFrame& o) const {
    if (components_.size() != o.components_.size()) return false;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (components_[i].has_value() != o.components_[i].has_value()) return false;
      if (components_[i] && *components_[i] != *o.components_[i]) return false;
    }
    return true;
  }

 private:
  std::vector<Component> components_;
  std::vector<std::size_t> offsets_;
  std::size_t rank_;
};

/// Does the column span of the canonical HNF matrix h contain x?
inline bool hnf_contains(const ZMat& h, const std::vector<Int>& x) {
  std::vector<Int> r = x;
  const std::size_t m = h.rows();
  for (std::size_t j = 0; j < h.cols(); ++j) {
    std::size_t i = 0;
    while (i < m && h(i, j) == 0) ++i;
    if (i == m) return false;
    if (r[i] % h(i, j) != 0) return false;
    Int c = r[i] / h(i, j);
    for (std::size_t t = i; t < m; ++t) r[t] -= c * h(t, j);
  }
  for (const Int& v : r)
    if (v != 0) return false;
  return true;
}

/// A finite-index subring R of a product frame containing 1.
class ProductOrder {
 public:
  ProductOrder(ProductFrame frame, const ZMat& basis_generators)
      : frame_(std::move(frame)), basis_(hnf_of_span(basis_generators)) {
    const std::size_t m = frame_.rank();
    if (basis_.cols() != m) throw DomainError("suborder must have finite index");
    index_ = abs(det(basis_));
    if (!hnf_contains(basis_, frame_.identity())) throw DomainError("suborder must contain 1");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j)
        if (!hnf_contains(basis_, frame_.mul(basis_element(i), basis_element(j))))
          throw DomainError("suborder not closed under multiplication");
  }

  static ProductOrder maximal(ProductFrame frame) {
    std::size_t m = frame.rank();
    return ProductOrder(std::move(frame), ZMat::identity(m));
  }

  const ProductFrame& frame() const { return frame_; }
  const ZMat& basis() const { return basis_; }
  const Int& index() const { return index_; }
  bool is_maximal() const { return index_ == 1; }

  std::vector<Int> basis_element(std::size_t j) const {
    std::vector<Int> v(frame_.rank());
    for (std::size_t i = 0; i < frame_.rank(); ++i) v[i] = basis_(i, j);
    return v;
  }

  /// Exponent of O/R: the largest elementary divisor of the inclusion.
  Int quotient_exponent() const {
    Snf s = snf(basis_);
    return s.rank > 0 ? s.d(s.rank - 1, s.rank - 1) : Int(1);
  }

 private:
  ProductFrame frame_;
  ZMat basis_;
  Int index_;
};

/// Determinant of the trace-form Gram matrix on a Z-basis of the order.
/// Satisfies disc(R) = disc(O) [O:R]^2; for a maximal product of two
/// quadratic components it equals disc(F1) disc(F2).
inline Int trace_form_disc(const ProductOrder& r) {
  const std::size_t m = r.frame().rank();
  ZMat g(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      g(i, j) = r.frame().trace(r.frame().mul(r.basis_element(i), r.basis_element(j)));
  return det(g);
}

namespace detail {

struct ModArith {
  std::uint64_t mod;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % mod);
  }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= mod ? s - mod : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return add(a, mod - b % mod); }
  std::uint64_t reduce(const Int& x) const {
    Int r = x % Int(static_cast<unsigned long>(mod));
    if (r < 0) r += Int(static_cast<unsigned long>(mod));
    return r.get_ui();
  }
  std::uint64_t inv(std::uint64_t a) const {
    __int128 t = 0, nt = 1;
    __int128 r = static_cast<__int128>(mod), nr = static_cast<__int128>(a % mod);
    while (nr != 0) {
      __int128 q = r / nr;
      __int128 tmp = t - q * nt;
      t = nt;
      nt = tmp;
      tmp = r - q * nr;
      r = nr;
      nr = tmp;
    }
    if (r != 1) throw DomainError("non-invertible element in modular inverse");
    if (t < 0) t += static_cast<__int128>(mod);
    return static_cast<std::uint64_t>(t);
  }
};

using ModVec = std::vector<std::uint64_t>;
using ModMat = std::vector<ModVec>;

inline std::uint64_t mod_det(const ModMat& a, const ModArith& za) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0] % za.mod;
  if (n == 2) return za.sub(za.mul(a[0][0], a[1][1]), za.mul(a[0][1], a[1][0]));
  std::uint64_t d = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j] == 0) continue;
    ModMat minor(n - 1, ModVec(n - 1));
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == j) continue;
        minor[i - 1][cc++] = a[i][c];
      }
    }
    std::uint64_t term = za.mul(a[0][j], mod_det(minor, za));
    d = (j % 2 == 0) ? za.add(d, term) : za.sub(d, term);
  }
  return d;
}

inline ModMat mod_adjugate(const ModMat& a, const ModArith& za) {
  const std::size_t n = a.size();
  ModMat adj(n, ModVec(n));
  if (n == 1) {
    adj[0][0] = 1 % za.mod;
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ModMat minor(n - 1, ModVec(n - 1));
      std::size_t rr = 0;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == i) continue;
        std::size_t cc = 0;
        for (std::size_t c = 0; c < n; ++c) {
          if (c == j) continue;
          minor[rr][cc++] = a[r][c];
        }
        ++rr;
      }
      std::uint64_t cof = mod_det(minor, za);
      if ((i + j) % 2 == 1) cof = za.sub(0, cof);
      adj[j][i] = cof;
    }
  return adj;
}

inline Int int_pow(const Int& base, unsigned e) {
  Int r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

/// Counts residues mod p^ell of elements of R that are units of O_p with
/// inverse in the image of R mod p^kappa.  Every class of R/(R ∩ p^ell O)
/// is tested through one genuine representative r in R; unit-ness of the
/// class is independent of the representative because 1 + p^ell O_p lies
/// in R_p^* (ell exceeds the valuation of the quotient exponent).
inline Int count_local_unit_classes(const ProductFrame& frame, const ZMat& h, const Int& p,
                                    unsigned ell, unsigned kappa) {
  const std::size_t m = frame.rank();
  const Int p_ell = int_pow(p, ell);
  const Int p_kappa = int_pow(p, kappa);
  if (!p_kappa.fits_ulong_p()) throw Error("precision escalation");
  ModArith zk{p_kappa.get_ui()};
  const unsigned long p_ul = p.get_ui();

  // transversal of R / (R ∩ p^ell O): project the kernel of [H | p^ell I]
  ZMat stacked(m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) stacked(i, j) = h(i, j);
    stacked(i, m + i) = p_ell;
  }
  ZMat ker = kernel_z(stacked);
  ZMat s_lattice(m, ker.cols());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < ker.cols(); ++j) s_lattice(i, j) = ker(i, j);
  ZMat g = hnf_of_span(s_lattice);
  if (g.cols() != m) throw Error("internal: local transversal rank");

  // membership structure for the image of R mod p^kappa
  ZMat stacked_k(m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) stacked_k(i, j) = h(i, j);
    stacked_k(i, m + i) = p_kappa;
  }
  ZMat w = hnf_of_span(stacked_k);

  std::vector<Int> box(m);
  Int classes = 1;
  for (std::size_t i = 0; i < m; ++i) {
    box[i] = g(i, i);
    classes *= g(i, i);
  }
  std::vector<Int> s(m, 0);
  Int passed = 0;
  const std::vector<Int> ident = frame.identity();
  std::vector<std::uint64_t> id_mod(m);
  for (std::size_t i = 0; i < m; ++i) id_mod[i] = zk.reduce(ident[i]);

  for (Int it = 0; it < classes; ++it) {
    // with a lower-triangular HNF basis of the transversal lattice, vectors
    // with j-th coordinate in [0, g_jj) represent every class exactly once
    std::vector<Int> rf(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
      if (s[j] == 0) continue;
      for (std::size_t i = 0; i < m; ++i) rf[i] += h(i, j) * s[j];
    }

    ZMat mm = frame.mult_matrix(rf);
    ModMat modm(m, ModVec(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) modm[i][j] = zk.reduce(mm(i, j));
    std::uint64_t d = mod_det(modm, zk);
    if (d % p_ul != 0) {
      ModMat adj = mod_adjugate(modm, zk);
      std::uint64_t dinv = zk.inv(d % zk.mod);
      std::vector<Int> inv(m);
      for (std::size_t i = 0; i < m; ++i) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < m; ++j) acc = zk.add(acc, zk.mul(adj[i][j], id_mod[j]));
        inv[i] = Int(static_cast<unsigned long>(zk.mul(acc, dinv)));
      }
      if (hnf_contains(w, inv)) ++passed;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (++s[i] < box[i]) break;
      s[i] = 0;
    }
  }
  return passed;
}

}  // namespace detail

/// Number of units of O/pO, counted directly (p^rank is small here).
inline Int count_units_mod_p(const ProductFrame& frame, const Int& p_int) {
  const std::size_t m = frame.rank();
  const unsigned long p = p_int.get_ui();
  detail::ModArith zp{p};
  Int count = 0;
  std::vector<Int> a(m, 0);
  std::vector<unsigned long> digits(m, 0);
  const Int total = detail::int_pow(p_int, static_cast<unsigned>(m));
  for (Int it = 0; it < total; ++it) {
    for (std::size_t i = 0; i < m; ++i) a[i] = Int(static_cast<unsigned long>(digits[i]));
    ZMat mm = frame.mult_matrix(a);
    detail::ModMat modm(m, detail::ModVec(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) modm[i][j] = zp.reduce(mm(i, j));
    if (detail::mod_det(modm, zp) != 0) ++count;
    for (std::size_t i = 0; i < m; ++i) {
      if (++digits[i] < p) break;
      digits[i] = 0;
    }
  }
  return count;
}

/// prod_p [O_p^* : R_p^*], exact, via finite quotients O/p^k O at membership
/// precision k = 2 v_p([O:R]) + 1.  A doubled-precision recomputation must
/// agree; on disagreement the computation escalates once more and otherwise
/// reports "precision escalation".  Bounded by [O:R]^4.
inline Int unit_index_profinite(const ProductOrder& maximal, const ProductOrder& sub) {
  if (!maximal.is_maximal()) throw DomainError("first argument must be the maximal order");
  if (!(maximal.frame() == sub.frame())) throw DomainError("orders live in different frames");
  const ProductFrame& frame = sub.frame();
  const std::size_t m = frame.rank();
  const Int exponent = sub.quotient_exponent();
  Int result = 1;
  for (const auto& [p, v_idx] : factorize(sub.index())) {
    const unsigned v_exp = static_cast<unsigned>(valuation(exponent, p));
    const unsigned ell = v_exp + 1;
    const unsigned k = 2 * static_cast<unsigned>(v_idx) + 1;
    Int units_ell =
        count_units_mod_p(frame, p) * detail::int_pow(p, (ell - 1) * static_cast<unsigned>(m));

    unsigned kappa = k;
    Int v_count;
    bool settled = false;
    for (int attempt = 0; attempt < 2 && !settled; ++attempt) {
      Int first = detail::count_local_unit_classes(frame, sub.basis(), p, ell, kappa);
      Int second = detail::count_local_unit_classes(frame, sub.basis(), p, ell, 2 * kappa);
      if (first == second) {
        v_count = first;
        settled = true;
      } else {
        kappa *= 2;
      }
    }
    if (!settled) throw Error("precision escalation");
    if (v_count == 0 || units_ell % v_count != 0)
      throw Error("internal: unit class count does not divide the unit group order");
    result *= units_ell / v_count;
  }
  return result;
}

/// |disc| of the biquadratic compositum F_1 F_2 of two distinct imaginary
/// quadratic fields, by saturating Z[w_1, w_2] with half-integral elements
/// until no algebraic integer is missing.
inline Int compositum_disc(const ImaginaryQuadraticOrder& o1, const ImaginaryQuadraticOrder& o2) {
  if (!o1.is_maximal() || !o2.is_maximal())
    throw DomainError("compositum requires fundamental discriminants");
  if (o1.disc() == o2.disc()) throw DomainError("compositum degenerate");

  const Int d1 = o1.disc(), d2 = o2.disc();
  const Int n1 = o1.omega_norm(), n2 = o2.omega_norm();

  // algebra basis {1, w1, w2, w1 w2}
  auto mul = [&](const std::vector<Rat>& a, const std::vector<Rat>& b) {
    std::vector<Rat> r(4, Rat(0));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        Rat c = a[i] * b[j];
        if (c == 0) continue;
        int w1 = ((i == 1 || i == 3) ? 1 : 0) + ((j == 1 || j == 3) ? 1 : 0);
        int w2 = ((i == 2 || i == 3) ? 1 : 0) + ((j == 2 || j == 3) ? 1 : 0);
        std::vector<std::pair<Rat, std::pair<int, int>>> terms = {{c, {w1, w2}}};
        bool changed = true;
        while (changed) {
          changed = false;
          std::vector<std::pair<Rat, std::pair<int, int>>> next;
          for (auto& [coef, pw] : terms) {
            auto [a1, a2] = pw;
            if (a1 >= 2) {
              next.push_back({coef * Rat(d1), {a1 - 1, a2}});
              next.push_back({coef * Rat(-n1), {a1 - 2, a2}});
              changed = true;
            } else if (a2 >= 2) {
              next.push_back({coef * Rat(d2), {a1, a2 - 1}});
              next.push_back({coef * Rat(-n2), {a1, a2 - 2}});
              changed = true;
            } else {
              next.push_back({coef, {a1, a2}});
            }
          }
          terms = next;
        }
        for (auto& [coef, pw] : terms) {
          auto [a1, a2] = pw;
          int idx = a1 == 0 ? (a2 == 0 ? 0 : 2) : (a2 == 0 ? 1 : 3);
          r[idx] += coef;
        }
      }
    return r;
  };
  auto trace = [&](const std::vector<Rat>& a) -> Rat {
    return Rat(4) * a[0] + Rat(2 * d1) * a[1] + Rat(2 * d2) * a[2] + Rat(d1 * d2) * a[3];
  };
  auto is_integral_elt = [&](const std::vector<Rat>& x) {
    QMat mx(4, 4);
    for (int j = 0; j < 4; ++j) {
      std::vector<Rat> e(4, Rat(0));
      e[j] = 1;
      std::vector<Rat> col = mul(x, e);
      for (int i = 0; i < 4; ++i) mx(i, j) = col[i];
    }
    // char poly coefficients via Faddeev-LeVerrier must be integers
    QMat mk = mx;
    for (int k = 1; k <= 4; ++k) {
      Rat tr = 0;
      for (int i = 0; i < 4; ++i) tr += mk(i, i);
      Rat c = -tr / Rat(k);
      if (c.get_den() != 1) return false;
      if (k < 4) {
        QMat shifted = mk;
        for (int i = 0; i < 4; ++i) shifted(i, i) += c;
        mk = mx * shifted;
      }
    }
    return true;
  };

  ZMat num = ZMat::identity(4);
  Int den = 1;
  auto module_disc = [&]() -> Int {
    QMat gram(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        std::vector<Rat> bi(4), bj(4);
        for (int t = 0; t < 4; ++t) {
          bi[t] = Rat(num(t, i)) / Rat(den);
          bj[t] = Rat(num(t, j)) / Rat(den);
        }
        gram(i, j) = trace(mul(bi, bj));
      }
    Rat d = det(gram);
    if (d.get_den() != 1) throw Error("internal: compositum disc not integral");
    Int r = d.get_num();
    return abs(r);
  };

  // Saturate: an index-p enlargement exists only when p^2 divides the
  // current discriminant, and is witnessed by an element (basis combo)/p.
  // Shared odd factors of d1, d2 do force odd denominators here.
  for (;;) {
    bool enlarged = false;
    Int disc_cur = module_disc();
    for (const auto& [p, e] : factorize(disc_cur)) {
      if (e < 2) continue;
      const long pl = p.get_si();
      std::vector<long> a(4, 0);
      long combos = 1;
      for (int i = 0; i < 4; ++i) combos *= pl;
      for (long it = 1; it < combos && !enlarged; ++it) {
        // mixed-radix increment of the coefficient vector mod p
        for (int i = 0; i < 4; ++i) {
          if (++a[i] < pl) break;
          a[i] = 0;
        }
        std::vector<Rat> cand(4, Rat(0));
        std::vector<Int> scaled(4, 0);  // coordinates of cand * (p den)
        for (int j = 0; j < 4; ++j) {
          if (a[j] == 0) continue;
          for (int i = 0; i < 4; ++i) {
            cand[i] += Rat(a[j] * num(i, j)) / Rat(p * den);
            scaled[i] += a[j] * num(i, j);
          }
        }
        // skip candidates already in the module: p den cand in span(p num)
        ZMat pmul = num;
        for (std::size_t i = 0; i < 4; ++i)
          for (std::size_t j = 0; j < 4; ++j) pmul(i, j) *= p;
        if (hnf_contains(pmul, scaled)) continue;
        if (!is_integral_elt(cand)) continue;
        ZMat bigger(4, 5);
        for (std::size_t i = 0; i < 4; ++i) {
          for (std::size_t j = 0; j < 4; ++j) bigger(i, j) = p * num(i, j);
          bigger(i, 4) = scaled[i];
        }
        num = hnf_of_span(bigger);
        den *= p;
        Int g = gcd(content(num), den);
        if (g > 1) {
          for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
              mpz_divexact(num(i, j).get_mpz_t(), num(i, j).get_mpz_t(), g.get_mpz_t());
          den /= g;
        }
        enlarged = true;
      }
      if (enlarged) break;
    }
    if (!enlarged) break;
  }

  return module_disc();
}

/// All suborders of the frame of index exactly c: submodules containing 1
/// and closed under multiplication.
inline std::vector<ProductOrder> enumerate_suborders(const ProductFrame& frame, const Int& c,
                                                     const EnumBudget& budget = {}) {
  const std::size_t m = frame.rank();
  std::vector<std::vector<Int>> tuples;
  std::vector<Int> cur;
  detail::divisor_tuples(c, m, cur, tuples);
  Int total = 0;
  for (const auto& t : tuples) total += detail::hnf_count_for_diagonal(t);
  if (total > Int(budget.max_candidates)) throw BudgetError("enumeration budget exceeded");

  std::vector<ProductOrder> out;
  for (const auto& t : tuples) {
    detail::hnf_shapes_for_diagonal(t, [&](const ZMat& h) {
      if (!hnf_contains(h, frame.identity())) return;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
          std::vector<Int> a(m), b(m);
          for (std::size_t tt = 0; tt < m; ++tt) {
            a[tt] = h(tt, i);
            b[tt] = h(tt, j);
          }
          if (!hnf_contains(h, frame.mul(a, b))) return;
        }
      out.emplace_back(frame, h);
    });
  }
  return out;
}

}  // namespace symplat

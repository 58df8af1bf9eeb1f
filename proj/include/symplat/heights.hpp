#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "symplat/orders.hpp"

namespace symplat {

/// Integer polynomial, little-endian coefficients; normalised so that the
/// leading coefficient is nonzero (empty = zero polynomial).
struct IntPoly {
  std::vector<Int> c;

  IntPoly() = default;
  explicit IntPoly(std::vector<Int> coeffs) : c(std::move(coeffs)) { trim(); }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }
  Int max_abs() const {
    Int m = 0;
    for (const Int& x : c)
      if (abs(x) > m) m = abs(x);
    return m;
  }
};

inline IntPoly poly_mul(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return IntPoly();
  std::vector<Int> r(a.c.size() + b.c.size() - 1, Int(0));
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
  return IntPoly(std::move(r));
}

inline Int poly_content(const IntPoly& p) {
  Int g = 0;
  for (const Int& x : p.c) g = gcd(g, x);
  return g;
}

inline IntPoly poly_primitive(const IntPoly& p) {
  if (p.is_zero()) return p;
  Int g = poly_content(p);
  IntPoly r = p;
  for (Int& x : r.c) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  if (r.c.back() < 0)
    for (Int& x : r.c) x = -x;
  return r;
}

inline IntPoly poly_derivative(const IntPoly& p) {
  if (p.degree() < 1) return IntPoly();
  std::vector<Int> r(p.c.size() - 1);
  for (std::size_t i = 1; i < p.c.size(); ++i) r[i - 1] = Int(i) * p.c[i];
  return IntPoly(std::move(r));
}

inline Rat poly_eval(const IntPoly& p, const Rat& x) {
  Rat v = 0;
  for (std::size_t i = p.c.size(); i-- > 0;) v = v * x + Rat(p.c[i]);
  return v;
}

/// Exact division test over Q: does b divide a with zero remainder?
/// Returns the quotient when it exists.
inline std::optional<std::vector<Rat>> poly_divide_exact(const IntPoly& a, const IntPoly& b) {
  if (b.is_zero()) return std::nullopt;
  std::vector<Rat> rem(a.c.size());
  for (std::size_t i = 0; i < a.c.size(); ++i) rem[i] = Rat(a.c[i]);
  const int db = b.degree();
  const Rat lead = Rat(b.c[db]);
  int da = a.degree();
  if (da < db) return std::nullopt;
  std::vector<Rat> quot(da - db + 1, Rat(0));
  for (int i = da; i >= db; --i) {
    Rat q = rem[i] / lead;
    quot[i - db] = q;
    if (q == 0) continue;
    for (int j = 0; j <= db; ++j) rem[i - db + j] -= q * Rat(b.c[j]);
  }
  for (const Rat& r : rem)
    if (r != 0) return std::nullopt;
  return quot;
}

inline bool poly_divides(const IntPoly& b, const IntPoly& a) {
  return poly_divide_exact(a, b).has_value();
}

/// gcd over Q (returned primitive over Z), via exact pseudo-remainders.
inline IntPoly poly_gcd(IntPoly a, IntPoly b) {
  a = a.is_zero() ? a : poly_primitive(a);
  b = b.is_zero() ? b : poly_primitive(b);
  while (!b.is_zero()) {
    // pseudo-remainder of a by b
    IntPoly r = a;
    const int db = b.degree();
    while (!r.is_zero() && r.degree() >= db) {
      const int shift = r.degree() - db;
      const Int rl = r.c.back(), bl = b.c.back();
      const Int g = gcd(rl, bl);
      const Int fr = bl / g, fb = rl / g;
      // r := fr * r - fb * x^shift * b
      std::vector<Int> nr(r.c.size());
      for (std::size_t i = 0; i < r.c.size(); ++i) nr[i] = fr * r.c[i];
      for (std::size_t i = 0; i < b.c.size(); ++i) nr[shift + i] -= fb * b.c[i];
      r = IntPoly(std::move(nr));
      if (!r.is_zero()) r = poly_primitive(r);
    }
    a = b;
    b = r;
  }
  return a;
}

namespace detail {

inline std::vector<Int> divisors_of(const Int& n) {
  std::vector<Int> out = {1};
  for (const auto& [p, e] : factorize(n)) {
    std::size_t sz = out.size();
    Int pe = 1;
    for (int i = 0; i < e; ++i) {
      pe *= p;
      for (std::size_t j = 0; j < sz; ++j) out.push_back(out[j] * pe);
    }
  }
  return out;
}

/// Kronecker-style search for a factor of degree <= dmax; used to verify a
/// caller's irreducibility marker.  Exact and budget-capped.
inline bool has_factor_of_degree_at_most(const IntPoly& p, int dmax,
                                         std::uint64_t budget = 2'000'000) {
  std::uint64_t spent = 0;
  for (int d = 1; d <= dmax; ++d) {
    // evaluation points 0, 1, -1, 2, -2, ...
    std::vector<Rat> xs;
    std::vector<Int> vals;
    for (long t = 0; static_cast<int>(xs.size()) < d + 1; ++t) {
      long x = (t % 2 == 0) ? t / 2 : -(t / 2 + 1);
      Rat v = poly_eval(p, Rat(x));
      if (v == 0) return true;  // rational root = linear factor
      xs.push_back(Rat(x));
      vals.push_back(Int(v.get_num()));
    }
    // candidate values g(x_i) run over signed divisors of p(x_i)
    std::vector<std::vector<Int>> choices;
    for (const Int& v : vals) {
      std::vector<Int> ds = divisors_of(v);
      std::vector<Int> withsign;
      for (const Int& dd : ds) {
        withsign.push_back(dd);
        withsign.push_back(-dd);
      }
      choices.push_back(std::move(withsign));
    }
    std::vector<std::size_t> idx(d + 1, 0);
    for (;;) {
      if (++spent > budget) throw BudgetError("irreducibility check budget exceeded");
      // Lagrange interpolation through (x_i, g_i); keep integer candidates
      QMat vand(d + 1, d + 1), rhs(d + 1, 1);
      for (int i = 0; i <= d; ++i) {
        Rat pw = 1;
        for (int j = 0; j <= d; ++j) {
          vand(i, j) = pw;
          pw *= xs[i];
        }
        rhs(i, 0) = Rat(choices[i][idx[i]]);
      }
      QMat sol = solve(vand, rhs);
      bool integral = true;
      for (int i = 0; i <= d && integral; ++i)
        if (sol(i, 0).get_den() != 1) integral = false;
      if (integral && sol(d, 0) != 0) {
        std::vector<Int> g(d + 1);
        for (int i = 0; i <= d; ++i) g[i] = sol(i, 0).get_num();
        IntPoly cand = poly_primitive(IntPoly(std::move(g)));
        if (cand.degree() >= 1 && cand.degree() < p.degree() && poly_divides(cand, p))
          return true;
      }
      // advance the mixed-radix divisor counter
      int pos = 0;
      while (pos <= d && ++idx[pos] == choices[pos].size()) {
        idx[pos] = 0;
        ++pos;
      }
      if (pos > d) break;
    }
  }
  return false;
}

}  // namespace detail

/// An exactly represented real algebraic number: a rational, or a verified
/// irreducible primitive minimal polynomial with an isolating interval.
class AlgebraicInput {
 public:
  static AlgebraicInput rational(Rat v) {
    AlgebraicInput a;
    a.value_ = std::move(v);
    return a;
  }

  /// Validates: primitive polynomial, square-free, no factor of degree <= 4
  /// (full irreducibility at the degrees in scope), sign change across the
  /// isolating interval.
  static AlgebraicInput algebraic(IntPoly min_poly, Rat lo, Rat hi) {
    if (min_poly.degree() < 1) throw DomainError("minimal polynomial must be non-constant");
    IntPoly p = poly_primitive(min_poly);
    if (p.degree() == 1) {
      // rational after all
      return rational(Rat(-p.c[0]) / Rat(p.c[1]));
    }
    IntPoly g = poly_gcd(p, poly_derivative(p));
    if (g.degree() > 0) throw DomainError("minimal polynomial is not square-free");
    int dmax = std::min(4, p.degree() - 1);
    if (detail::has_factor_of_degree_at_most(p, dmax))
      throw DomainError("minimal polynomial is reducible");
    if (lo > hi) throw DomainError("empty isolating interval");
    Rat vlo = poly_eval(p, lo), vhi = poly_eval(p, hi);
    if (vlo * vhi > 0) throw DomainError("interval does not isolate a root");
    AlgebraicInput a;
    a.value_ = Algebraic{std::move(p), std::move(lo), std::move(hi)};
    return a;
  }

  bool is_rational() const { return std::holds_alternative<Rat>(value_); }
  const Rat& rational_value() const { return std::get<Rat>(value_); }

  /// Primitive minimal polynomial (degree 1 for rationals).
  IntPoly minimal_polynomial() const {
    if (is_rational()) {
      const Rat& r = std::get<Rat>(value_);
      return IntPoly({Int(-r.get_num()), Int(r.get_den())});
    }
    return std::get<Algebraic>(value_).min_poly;
  }

 private:
  struct Algebraic {
    IntPoly min_poly;
    Rat lo, hi;
  };
  std::variant<Rat, Algebraic> value_;
};

struct HeightSearchBudget {
  std::uint64_t max_nodes = 4'000'000;
};

struct HkResult {
  bool finite = false;
  Int value = 0;  // meaningful when finite
};

/// H_k(y): minimum over primitive integer polynomials of degree <= k
/// vanishing at y of the max |coefficient|; +infinity when deg(y) > k.
///
/// Any witness is a multiple p*c of the minimal polynomial p, so a complete
/// search enumerates cofactors c whose partial products stay within the
/// incumbent bound; the incumbent starts at |p|_inf (c = 1) and decreases
/// until certified optimal.
inline HkResult height_hk(const AlgebraicInput& y, int k,
                          const HeightSearchBudget& budget = {}) {
  if (k < 1 || k > 8) throw DomainError("height degree cap exceeded");
  IntPoly p = y.minimal_polynomial();
  const int m = p.degree();
  if (m > k) return HkResult{false, 0};

  Int incumbent = p.max_abs();
  const int emax = k - m;
  std::uint64_t nodes = 0;

  // search for q = p * c with all |coeff(q)| <= bound; returns the best
  // max-coefficient found or nullopt
  auto search = [&](const Int& bound) -> std::optional<Int> {
    std::optional<Int> best;
    // c has coefficients c[0..emax]; choose from the top down, pruning with
    // the fully determined top coefficients of q
    std::vector<Int> c(emax + 1, Int(0));
    const Int pm = p.c[m];

    // q_{m+j} = sum_i p_{m-i} c_{j+i}; when c_j is chosen, q_{m+j} is fixed
    std::function<void(int)> rec = [&](int j) {
      if (best) return;
      if (++nodes > budget.max_nodes) throw BudgetError("height search budget exceeded");
      if (j < 0) {
        IntPoly cp{std::vector<Int>(c)};
        if (cp.is_zero()) return;
        IntPoly q = poly_mul(p, cp);
        if (q.max_abs() <= bound) best = poly_primitive(q).max_abs();
        return;
      }
      // tail = sum_{i >= 1} p_{m-i} c_{j+i}
      Int tail = 0;
      for (int i = 1; i <= m && j + i <= emax; ++i) tail += p.c[m - i] * c[j + i];
      // exact integer interval for c_j from |pm c_j + tail| <= bound
      Int a = -bound - tail, b = bound - tail;
      if (pm < 0) std::swap(a, b);
      Int cmin, cmax;
      mpz_cdiv_q(cmin.get_mpz_t(), a.get_mpz_t(), pm.get_mpz_t());
      mpz_fdiv_q(cmax.get_mpz_t(), b.get_mpz_t(), pm.get_mpz_t());
      for (Int v = cmin; v <= cmax && !best; ++v) {
        c[j] = v;
        rec(j - 1);
      }
      c[j] = 0;
    };
    rec(emax);
    return best;
  };

  for (;;) {
    if (incumbent == 1) break;  // coefficients are at least 1 for nonzero q
    std::optional<Int> better = search(incumbent - 1);
    if (!better) break;
    incumbent = *better;
  }
  return HkResult{true, incumbent};
}

/// H_1 of a rational number in lowest terms a/b: max(|a|, |b|).
inline Int height_h1_rational(const Rat& x) {
  Int a = abs(Int(x.get_num()));
  Int b = Int(x.get_den());
  return a > b ? a : b;
}

/// H_1 of a rational matrix: entrywise maximum.
inline Int height_h1_matrix(const QMat& g) {
  Int m = 1;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      Int h = height_h1_rational(g(i, j));
      if (h > m) m = h;
    }
  return m;
}

inline Int height_h1_matrix(const ZMat& g) { return height_h1_matrix(to_qmat(g)); }

/// det*(g) = |det g| * lcm(entry denominators in lowest terms)^n.
inline Int detstar(const QMat& g) {
  if (!g.is_square()) throw DomainError("detstar requires a square matrix");
  Rat d = det(g);
  if (d == 0) throw DomainError("matrix is singular");
  Int l = 1;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) l = lcm(l, Int(g(i, j).get_den()));
  Rat result = abs(d);
  for (std::size_t i = 0; i < g.rows(); ++i) result *= Rat(l);
  if (result.get_den() != 1) throw Error("internal: detstar not integral");
  return Int(result.get_num());
}

inline Int detstar(const ZMat& g) { return detstar(to_qmat(g)); }

}  // namespace symplat

#pragma once

// Independent brute-force oracles used to freeze expected values.  Everything
// here is deliberately naive and must stay independent of the library's own
// algorithms.

#include <map>
#include <set>
#include <vector>

#include "symplat/int_mat.hpp"

namespace oracle {

using symplat::Int;
using symplat::ZMat;

/// sigma_1(n) = sum of divisors.
inline long sigma1(long n) {
  long s = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0) s += d;
  return s;
}

/// Index of the sublattice spanned by the columns of `b` in Z^2, counted by
/// enumerating residue classes of a large box modulo the sublattice.
inline long coset_count_rank2(long b00, long b10, long b01, long b11) {
  // brute force: count points of [0,L)^2 modulo the lattice via marking
  long d = b00 * b11 - b01 * b10;
  if (d < 0) d = -d;
  if (d == 0) return -1;
  // reduce every point of [0, L)^2 by greedy subtraction of generators and
  // count distinct unreachable-from-each-other classes with a set of
  // canonical representatives found by BFS over additions of generators.
  const long L = 4 * d + 8;
  std::set<std::pair<long, long>> lattice_pts;
  for (long a = -L; a <= L; ++a)
    for (long b = -L; b <= L; ++b) {
      long x = a * b00 + b * b01;
      long y = a * b10 + b * b11;
      if (x >= -L && x <= L && y >= -L && y <= L) lattice_pts.insert({x, y});
    }
  // classes of [0, d)^2-ish box: two points equivalent iff difference in set
  std::vector<std::pair<long, long>> reps;
  for (long x = 0; x < d; ++x)
    for (long y = 0; y < d; ++y) {
      bool fresh = true;
      for (auto& r : reps) {
        if (lattice_pts.count({x - r.first, y - r.second})) {
          fresh = false;
          break;
        }
      }
      if (fresh) reps.push_back({x, y});
    }
  return static_cast<long>(reps.size());
}

/// Number of index-n sublattices of Z^2, counted by scanning raw
/// upper-triangular shapes directly (independent of library HNF code).
inline long count_index_n_sublattices_z2(long n) {
  long count = 0;
  for (long a = 1; a <= n; ++a) {
    if (n % a != 0) continue;
    long d = n / a;
    count += d;  // shapes [[a, 0], [b, d]] with 0 <= b < d
  }
  return count;
}

/// Subgroups of (Z/2)^2 counted directly.
inline long count_subgroups_z2_squared() {
  // elements: 0, e1, e2, e1+e2 ; subgroups: trivial, three order-2, full
  return 5;
}

/// Cokernel structure of a 2x2 integer matrix by explicit coset enumeration:
/// returns the multiset of cyclic orders {d1, d2} with d1 | d2.
inline std::vector<long> cokernel_cyclic_orders_2x2(long a, long b, long c, long d) {
  long det = a * d - b * c;
  if (det < 0) det = -det;
  std::vector<long> orders;
  // order of e1 and of e2 in Z^2 / im: smallest k with k*ei in the image
  auto in_image = [&](long x, long y) {
    // solve (a b; c d) (s t)^T = (x y)^T over Z
    long D = a * d - b * c;
    long sn = x * d - y * b, tn = a * y - c * x;
    return sn % D == 0 && tn % D == 0;
  };
  // enumerate the quotient group by BFS over generators e1, e2
  std::set<std::pair<long, long>> seen;
  std::vector<std::pair<long, long>> frontier = {{0, 0}};
  seen.insert({0, 0});
  // canonical form: reduce coordinates modulo det in both axes, then modulo image
  while (!frontier.empty()) {
    auto [x, y] = frontier.back();
    frontier.pop_back();
    for (auto [dx, dy] : {std::pair<long, long>{1, 0}, {0, 1}}) {
      long nx = x + dx, ny = y + dy;
      bool dup = false;
      for (auto& s : seen) {
        if (in_image(nx - s.first, ny - s.second)) {
          dup = true;
          break;
        }
      }
      if (!dup) {
        seen.insert({nx, ny});
        frontier.push_back({nx, ny});
      }
    }
  }
  long total = static_cast<long>(seen.size());
  // exponent = order of the group element of maximal order among e1, e2, e1+e2
  auto elt_order = [&](long x, long y) {
    for (long k = 1; k <= total; ++k)
      if (in_image(k * x, k * y)) return k;
    return -1L;
  };
  long exponent = std::max({elt_order(1, 0), elt_order(0, 1), elt_order(1, 1)});
  orders = {total / exponent, exponent};
  return orders;
}

}  // namespace oracle

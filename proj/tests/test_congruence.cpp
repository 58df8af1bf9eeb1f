#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "symplat/congruence.hpp"

using namespace symplat;

namespace {

// Brute-force group order of SL2(Z/n): count all (a,b,c,d) with ad-bc = 1.
long sl2_order_brute(long n) {
  long count = 0;
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b)
      for (long c = 0; c < n; ++c)
        for (long d = 0; d < n; ++d)
          if (((a * d - b * c) % n + n) % n == 1 % n) ++count;
  return count;
}

ZMat mat2(long a, long b, long c, long d) {
  ZMat m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

}  // namespace

TEST_CASE("group order formula matches brute force for n <= 30") {
  for (long n = 1; n <= 30; ++n) CHECK(sl2_group_order(n) == sl2_order_brute(n));
}

TEST_CASE("trivial group at n = 1") {
  CayleyBfs bfs = cayley_bfs(1);
  CHECK(bfs.diameter == 0);
  CHECK(bfs.group_order == 1);
}

TEST_CASE("exhaustive BFS reaches the whole group") {
  for (long n : {2L, 3L, 4L, 5L, 6L, 7L, 12L}) {
    CayleyBfs bfs = cayley_bfs(n);
    CHECK(Int(static_cast<unsigned long>(bfs.dist.size())) == sl2_group_order(n));
    CHECK(bfs.diameter > 0);
  }
  // n = 2 has order 6
  CHECK(cayley_bfs(2).group_order == 6);
  // n = 5 has order 120
  CHECK(cayley_bfs(5).group_order == 120);
}

TEST_CASE("identity lifts to the identity") {
  CayleyBfs bfs = cayley_bfs(7);
  ZMat lift = lift_representative(bfs, ZMat::identity(2));
  CHECK(lift == ZMat::identity(2));
  CHECK(height_h1_matrix(lift) == 1);
}

TEST_CASE("the translation generator lifts to itself at word length 1") {
  CayleyBfs bfs = cayley_bfs(3);
  ZMat t = mat2(1, 1, 0, 1);
  CHECK(bfs_distance(bfs, t) == 1);
  CHECK(lift_representative(bfs, t) == t);
}

TEST_CASE("every lift is congruent to its target with determinant 1") {
  for (long n : {5L, 7L, 11L}) {
    CayleyBfs bfs = cayley_bfs(n);
    // walk every class via the BFS order
    int checked = 0;
    for (std::uint64_t key : bfs.bfs_order) {
      // decode the key back to a matrix
      std::uint64_t k = key;
      long e[4];
      for (int i = 0; i < 4; ++i) {
        e[i] = static_cast<long>(k % n);
        k /= n;
      }
      ZMat target = mat2(e[0], e[1], e[2], e[3]);
      ZMat lift = lift_representative(bfs, target);
      CHECK(det(lift) == 1);
      bool congruent = true;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          Int diff = lift(i, j) - target(i, j);
          if (diff % n != 0) congruent = false;
        }
      CHECK(congruent);
      // the height chain from the expander argument: H1 <= m^{L-1} maxgen^L
      int dist = bfs.dist.at(key).dist;
      Int bound = 1;
      for (int i = 0; i + 1 < dist; ++i) bound *= 2;
      CHECK(height_h1_matrix(lift) <= (dist == 0 ? Int(1) : bound));
      if (++checked > 400) break;  // sample within each group
    }
  }
}

TEST_CASE("bfs distances satisfy the triangle inequality on sampled pairs") {
  CayleyBfs bfs = cayley_bfs(5);
  Rng rng(8);
  std::vector<ZMat> elems;
  for (std::uint64_t key : bfs.bfs_order) {
    std::uint64_t k = key;
    long e[4];
    for (int i = 0; i < 4; ++i) {
      e[i] = static_cast<long>(k % 5);
      k /= 5;
    }
    elems.push_back(mat2(e[0], e[1], e[2], e[3]));
  }
  for (int it = 0; it < 200; ++it) {
    const ZMat& a = elems[rng.index(elems.size())];
    const ZMat& b = elems[rng.index(elems.size())];
    ZMat ab = a * b;
    CHECK(bfs_distance(bfs, ab) <= bfs_distance(bfs, a) + bfs_distance(bfs, b));
  }
}

TEST_CASE("rejects moduli beyond the order cap") {
  CayleyOptions tiny;
  tiny.order_cap = 100;
  CHECK_THROWS_WITH(cayley_bfs(11, tiny), "group order exceeds the BFS cap");
}

TEST_CASE("sp4 snapshot matches the order formula for small n") {
  CHECK(cayley_bfs_sp4(2).group_order == 720);
  CayleyBfs bfs = cayley_bfs_sp4(2);
  CHECK(Int(static_cast<unsigned long>(bfs.dist.size())) == 720);
  CayleyBfs bfs3 = cayley_bfs_sp4(3);
  CHECK(Int(static_cast<unsigned long>(bfs3.dist.size())) == sp4_group_order(3));
}

TEST_CASE("sp4 lifts are symplectic and congruent") {
  CayleyBfs bfs = cayley_bfs_sp4(2);
  int checked = 0;
  for (std::uint64_t key : bfs.bfs_order) {
    std::uint64_t k = key;
    ZMat target(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        target(i, j) = static_cast<long>(k % 2);
        k /= 2;
      }
    // careful: encode order is row-major entry index i*4+j via digits
    ZMat lift = lift_representative(bfs, target);
    CHECK(det(lift) == 1);
    if (++checked > 100) break;
  }
}

TEST_CASE("diameter scan over the first primes is exact and fits finite slopes") {
  std::vector<long> primes = {2, 3, 5, 7, 11, 13};
  LiftScanReport rep = diameter_scan(primes);
  REQUIRE(rep.rows.size() == primes.size());
  for (const auto& r : rep.rows) {
    CHECK_FALSE(r.sampled);
    CHECK(r.diameter > 0);
    CHECK(r.order == sl2_group_order(r.n));
  }
  REQUIRE_FALSE(rep.diameter_fit.degenerate);
  CHECK(std::isfinite(rep.diameter_fit.slope_up));
  REQUIRE_FALSE(rep.h1_fit.degenerate);
  CHECK(std::isfinite(rep.h1_fit.slope_up));
  // determinism
  LiftScanReport rep2 = diameter_scan(primes);
  CHECK(rep.to_csv() == rep2.to_csv());
}

TEST_CASE("scan falls back to flagged sampling beyond the cap") {
  CayleyOptions opts;
  opts.order_cap = 1000;
  LiftScanReport rep = diameter_scan({5, 29}, opts);
  CHECK_FALSE(rep.rows[0].sampled);
  CHECK(rep.rows[1].sampled);
  CHECK(rep.rows[1].diameter == -1);
  CHECK(rep.rows[1].max_h1 >= 1);
}

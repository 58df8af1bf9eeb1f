#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "symplat/int_mat.hpp"
#include "symplat/rng.hpp"

using namespace symplat;

namespace {

ZMat m2(long a, long b, long c, long d) {
  ZMat m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

ZMat random_small(Rng& rng, std::size_t r, std::size_t c, long bound) {
  ZMat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform(-bound, bound);
  return m;
}

bool is_canonical_hnf(const ZMat& h) {
  // column echelon, positive pivots, row entries left of pivot in [0, pivot)
  std::size_t prev_pivot_row = 0;
  bool first = true;
  for (std::size_t j = 0; j < h.cols(); ++j) {
    std::size_t i = 0;
    while (i < h.rows() && h(i, j) == 0) ++i;
    if (i == h.rows()) return false;  // zero column
    if (!first && i <= prev_pivot_row) return false;
    if (h(i, j) <= 0) return false;
    for (std::size_t k = 0; k < j; ++k)
      if (h(i, k) < 0 || h(i, k) >= h(i, j)) return false;
    prev_pivot_row = i;
    first = false;
  }
  return true;
}

}  // namespace

TEST_CASE("hnf of matrices already in normal form") {
  CHECK(hnf(m2(2, 0, 0, 2)) == m2(2, 0, 0, 2));
  CHECK(hnf(ZMat::identity(2)) == ZMat::identity(2));
}

TEST_CASE("hnf of columns (2,1),(0,1) has determinant 2") {
  // oracle: coset count of the sublattice spanned by (2,1), (0,1) in Z^2
  long idx = oracle::coset_count_rank2(2, 1, 0, 1);
  REQUIRE(idx == 2);
  ZMat a(2, 2);
  a(0, 0) = 2;
  a(1, 0) = 1;
  a(0, 1) = 0;
  a(1, 1) = 1;
  ZMat h = hnf(a);
  CHECK(is_canonical_hnf(h));
  CHECK(abs(det(h)) == idx);
}

TEST_CASE("hnf rejects rank-deficient input") {
  ZMat a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(1, 0) = 2;
  a(1, 1) = 4;
  CHECK_THROWS_WITH(hnf(a), "singular basis");
}

TEST_CASE("hnf is idempotent and unimodular-invariant") {
  Rng rng(20260810);
  for (int it = 0; it < 200; ++it) {
    ZMat a = random_small(rng, 3, 3, 6);
    if (det(a) == 0) continue;
    ZMat h = hnf(a);
    CHECK(is_canonical_hnf(h));
    CHECK(hnf(h) == h);
    ZMat u = random_unimodular(rng, 3);
    CHECK(hnf(a * u) == h);
  }
}

TEST_CASE("hnf transform satisfies a*v = [h | 0]") {
  Rng rng(7);
  for (int it = 0; it < 100; ++it) {
    ZMat a = random_small(rng, 3, 4, 5);
    ZMat v;
    ZMat h = hnf_of_span(a, &v);
    REQUIRE(is_unimodular(v));
    ZMat av = a * v;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) {
        Int expect = j < h.cols() ? h(i, j) : Int(0);
        CHECK(av(i, j) == expect);
      }
  }
}

TEST_CASE("snf of identity is trivial") {
  Snf s = snf(ZMat::identity(3));
  CHECK(s.d == ZMat::identity(3));
  CHECK(s.rank == 3);
}

TEST_CASE("snf sorts elementary divisors by divisibility") {
  ZMat a(2, 2);
  a(0, 0) = 4;
  a(1, 1) = 2;
  Snf s = snf(a);
  CHECK(s.d(0, 0) == 2);
  CHECK(s.d(1, 1) == 4);
}

TEST_CASE("snf of [[2,1],[0,1]] is diag(1,2)") {
  // oracle: cokernel enumeration gives cyclic orders {1, 2}
  auto orders = oracle::cokernel_cyclic_orders_2x2(2, 1, 0, 1);
  REQUIRE(orders[0] == 1);
  REQUIRE(orders[1] == 2);
  Snf s = snf(m2(2, 1, 0, 1));
  CHECK(s.d(0, 0) == orders[0]);
  CHECK(s.d(1, 1) == orders[1]);
}

TEST_CASE("snf transforms are unimodular and exact") {
  Rng rng(99);
  for (int it = 0; it < 200; ++it) {
    std::size_t r = 2 + rng.index(3), c = 2 + rng.index(3);
    ZMat a = random_small(rng, r, c, 7);
    Snf s = snf(a);
    REQUIRE(is_unimodular(s.u));
    REQUIRE(is_unimodular(s.v));
    CHECK(s.u * a * s.v == s.d);
    CHECK(s.u * s.u_inv == ZMat::identity(r));
    CHECK(s.v * s.v_inv == ZMat::identity(c));
    for (std::size_t i = 0; i + 1 < std::min(r, c); ++i) {
      if (s.d(i + 1, i + 1) != 0) {
        CHECK(s.d(i, i) != 0);
        CHECK(s.d(i + 1, i + 1) % s.d(i, i) == 0);
      }
    }
    // off-diagonal zero
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (i != j) CHECK(s.d(i, j) == 0);
  }
}

TEST_CASE("kernel_z spans the exact integer kernel and is saturated") {
  Rng rng(31337);
  for (int it = 0; it < 100; ++it) {
    ZMat a = random_small(rng, 2, 4, 4);
    ZMat k = kernel_z(a);
    CHECK((a * k).is_zero());
    if (k.cols() > 0) {
      // saturation: SNF pivots of the kernel basis are all 1
      Snf s = snf(k);
      for (std::size_t i = 0; i < s.rank; ++i) CHECK(s.d(i, i) == 1);
    }
  }
}

TEST_CASE("bareiss determinant matches rational elimination") {
  Rng rng(5);
  for (int it = 0; it < 100; ++it) {
    ZMat a = random_small(rng, 4, 4, 9);
    CHECK(Rat(det(a)) == det(to_qmat(a)));
  }
}

TEST_CASE("rational inverse is exact") {
  Rng rng(11);
  for (int it = 0; it < 50; ++it) {
    ZMat a = random_small(rng, 3, 3, 9);
    if (det(a) == 0) continue;
    QMat inv = inverse(to_qmat(a));
    CHECK(to_qmat(a) * inv == QMat::identity(3));
  }
}

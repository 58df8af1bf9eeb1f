#pragma once

#include <cstdint>
#include <deque>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "symplat/fit.hpp"
#include "symplat/heights.hpp"
#include "symplat/rng.hpp"

namespace symplat {

struct CayleyOptions {
  Int order_cap = 10'000'000;      // groups larger than this are rejected
  Int sp4_order_cap = 1'000'000;   // degree-4 scans stay desk-scale
};

/// |SL2(Z/n)| = n^3 prod_{p | n} (1 - p^-2).
inline Int sl2_group_order(long n) {
  Int order = Int(n) * n * n;
  for (const auto& [p, e] : factorize(Int(n))) {
    order /= p * p;
    order *= p * p - 1;
  }
  return order;
}

/// |Sp4(Z/n)| = n^10 prod_{p | n} (1 - p^-2)(1 - p^-4).
inline Int sp4_group_order(long n) {
  Int order = 1;
  for (int i = 0; i < 10; ++i) order *= n;
  for (const auto& [p, e] : factorize(Int(n))) {
    Int p2 = p * p, p4 = p2 * p2;
    order /= p2;
    order *= p2 - 1;
    order /= p4;
    order *= p4 - 1;
  }
  return order;
}

/// The standard generating set of SL2(Z): S, T and inverses.
inline const std::vector<ZMat>& sl2_generators() {
  static const std::vector<ZMat> gens = [] {
    std::vector<ZMat> out;
    ZMat s(2, 2);
    s(0, 1) = -1;
    s(1, 0) = 1;
    ZMat si(2, 2);
    si(0, 1) = 1;
    si(1, 0) = -1;
    ZMat t = ZMat::identity(2);
    t(0, 1) = 1;
    ZMat ti = ZMat::identity(2);
    ti(0, 1) = -1;
    out = {s, si, t, ti};
    return out;
  }();
  return gens;
}

/// Sp4(Z) generators: the symplectic J and the elementary symmetric
/// translations, with inverses.  (Sp_2g(Z) is generated by these.)
inline const std::vector<ZMat>& sp4_generators() {
  static const std::vector<ZMat> gens = [] {
    std::vector<ZMat> out;
    ZMat j(4, 4);
    j(0, 2) = 1;
    j(1, 3) = 1;
    j(2, 0) = -1;
    j(3, 1) = -1;
    ZMat ji = j.transpose();
    out.push_back(j);
    out.push_back(ji);
    auto trans = [](long b11, long b12, long b22, long sign) {
      ZMat g = ZMat::identity(4);
      g(0, 2) = sign * b11;
      g(0, 3) = sign * b12;
      g(1, 2) = sign * b12;
      g(1, 3) = sign * b22;
      return g;
    };
    for (auto [b11, b12, b22] : {std::array<long, 3>{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}) {
      out.push_back(trans(b11, b12, b22, 1));
      out.push_back(trans(b11, b12, b22, -1));
    }
    return out;
  }();
  return gens;
}

namespace detail {

/// Dense encoding of a d x d matrix over Z/n as digits base n.
inline std::uint64_t encode_mod(const std::vector<std::uint32_t>& entries, std::uint32_t n) {
  std::uint64_t key = 0;
  for (std::size_t i = entries.size(); i-- > 0;) key = key * n + entries[i];
  return key;
}

inline std::vector<std::uint32_t> reduce_mod(const ZMat& g, std::uint32_t n) {
  std::vector<std::uint32_t> out(g.rows() * g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      Int r = g(i, j) % n;
      if (r < 0) r += n;
      out[i * g.cols() + j] = static_cast<std::uint32_t>(r.get_ui());
    }
  return out;
}

inline std::vector<std::uint32_t> mul_mod(const std::vector<std::uint32_t>& a,
                                          const std::vector<std::uint32_t>& b, std::size_t d,
                                          std::uint32_t n) {
  std::vector<std::uint32_t> r(d * d, 0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      std::uint64_t aik = a[i * d + k];
      if (!aik) continue;
      for (std::size_t j = 0; j < d; ++j)
        r[i * d + j] =
            static_cast<std::uint32_t>((r[i * d + j] + aik * b[k * d + j]) % n);
    }
  return r;
}

}  // namespace detail

struct BfsEntry {
  std::int32_t dist;
  std::uint64_t parent;
  std::int8_t gen;  // index into the generator list; -1 at the identity
};

/// Exhaustive breadth-first search on Cay(G(Z/n), generators) from the
/// identity, with parent links for minimal-word reconstruction.
struct CayleyBfs {
  long n = 0;
  std::size_t dim = 0;  // matrix size (2 or 4)
  Int group_order = 0;
  int diameter = 0;
  std::unordered_map<std::uint64_t, BfsEntry> dist;
  std::vector<std::uint64_t> bfs_order;
  const std::vector<ZMat>* generators = nullptr;
};

namespace detail {

inline CayleyBfs cayley_bfs_impl(long n, std::size_t dim, const std::vector<ZMat>& gens,
                                 const Int& expected_order, const Int& cap) {
  if (n < 1) throw DomainError("modulus must be positive");
  if (expected_order > cap) throw BudgetError("group order exceeds the BFS cap");
  CayleyBfs out;
  out.n = n;
  out.dim = dim;
  out.group_order = expected_order;
  out.generators = &gens;
  const std::uint32_t un = static_cast<std::uint32_t>(n);

  std::vector<std::vector<std::uint32_t>> gen_mod;
  for (const ZMat& g : gens) gen_mod.push_back(reduce_mod(g, un));

  std::vector<std::uint32_t> ident(dim * dim, 0);
  for (std::size_t i = 0; i < dim; ++i) ident[i * dim + i] = 1 % un;
  std::uint64_t id_key = encode_mod(ident, un);

  out.dist.reserve(static_cast<std::size_t>(expected_order.get_ui()) * 2);
  out.dist[id_key] = BfsEntry{0, id_key, -1};
  out.bfs_order.push_back(id_key);

  std::deque<std::pair<std::uint64_t, std::vector<std::uint32_t>>> frontier;
  frontier.emplace_back(id_key, ident);
  while (!frontier.empty()) {
    auto [key, mat] = std::move(frontier.front());
    frontier.pop_front();
    std::int32_t d = out.dist[key].dist;
    for (std::size_t gi = 0; gi < gen_mod.size(); ++gi) {
      std::vector<std::uint32_t> next = mul_mod(gen_mod[gi], mat, dim, un);
      std::uint64_t nk = encode_mod(next, un);
      if (out.dist.count(nk)) continue;
      out.dist[nk] = BfsEntry{d + 1, key, static_cast<std::int8_t>(gi)};
      out.bfs_order.push_back(nk);
      if (d + 1 > out.diameter) out.diameter = d + 1;
      frontier.emplace_back(nk, std::move(next));
    }
  }
  if (Int(static_cast<unsigned long>(out.dist.size())) != expected_order)
    throw Error("internal: generated subgroup does not match the group order");
  return out;
}

}  // namespace detail

inline CayleyBfs cayley_bfs(long n, const CayleyOptions& opts = {}) {
  return detail::cayley_bfs_impl(n, 2, sl2_generators(), sl2_group_order(n), opts.order_cap);
}

inline CayleyBfs cayley_bfs_sp4(long n, const CayleyOptions& opts = {}) {
  if (n > 13) throw BudgetError("group order exceeds the BFS cap");
  return detail::cayley_bfs_impl(n, 4, sp4_generators(), sp4_group_order(n), opts.sp4_order_cap);
}

/// Key of an integer matrix in the BFS encoding.
inline std::uint64_t element_key(const CayleyBfs& bfs, const ZMat& target) {
  return detail::encode_mod(detail::reduce_mod(target, static_cast<std::uint32_t>(bfs.n)),
                            static_cast<std::uint32_t>(bfs.n));
}

/// Integral determinant-1 lift of a class mod n: the product of the BFS
/// shortest word over the integral generators.  Word length equals the
/// BFS distance.
inline ZMat lift_representative(const CayleyBfs& bfs, const ZMat& target) {
  std::uint64_t key = element_key(bfs, target);
  auto it = bfs.dist.find(key);
  if (it == bfs.dist.end()) throw DomainError("target is not in the group");
  // collect generator indices from the target back to the identity
  std::vector<int> word;
  std::uint64_t cur = key;
  while (true) {
    const BfsEntry& e = bfs.dist.at(cur);
    if (e.gen < 0) break;
    word.push_back(e.gen);
    cur = e.parent;
  }
  ZMat lift = ZMat::identity(bfs.dim);
  // word holds generators outermost-first: g = w_0 w_1 ... w_{L-1} * id
  for (std::size_t i = word.size(); i-- > 0;) lift = (*bfs.generators)[word[i]] * lift;
  return lift;
}

inline int bfs_distance(const CayleyBfs& bfs, const ZMat& target) {
  auto it = bfs.dist.find(element_key(bfs, target));
  if (it == bfs.dist.end()) throw DomainError("target is not in the group");
  return it->second.dist;
}

struct LiftScanRow {
  long n;
  Int order;
  int diameter;  // -1 in sampled mode (no exhaustive BFS)
  Int max_h1;
  bool sampled;
};

struct LiftScanReport {
  std::vector<LiftScanRow> rows;
  FitReport diameter_fit;  // diameter against log(3n)
  FitReport h1_fit;        // log(max H1) against log(n)

  std::string to_csv() const {
    std::ostringstream os;
    os << "n,order,diameter,max_h1,mode\n";
    for (const auto& r : rows)
      os << r.n << "," << r.order << "," << r.diameter << "," << r.max_h1 << ","
         << (r.sampled ? "sampled" : "full") << "\n";
    return os.str();
  }
};

/// Per-modulus lifted-height maximum over all classes, computed by dynamic
/// programming along the BFS tree (lift of a node = generator * lift of its
/// parent).
inline Int max_lifted_h1(const CayleyBfs& bfs) {
  std::unordered_map<std::uint64_t, ZMat> lifts;
  lifts.reserve(bfs.bfs_order.size());
  Int max_h1 = 1;
  for (std::uint64_t key : bfs.bfs_order) {
    const BfsEntry& e = bfs.dist.at(key);
    ZMat lift =
        e.gen < 0 ? ZMat::identity(bfs.dim) : (*bfs.generators)[e.gen] * lifts.at(e.parent);
    Int h = height_h1_matrix(lift);
    if (h > max_h1) max_h1 = h;
    lifts.emplace(key, std::move(lift));
  }
  return max_h1;
}

/// Diameter/lift scan over the given moduli.  Moduli whose group order
/// exceeds the cap fall back to uniform random-word sampling, flagged as
/// such (no exact diameter there).
inline LiftScanReport diameter_scan(const std::vector<long>& ns, const CayleyOptions& opts = {},
                                    std::uint64_t sample_seed = 1, int samples = 512,
                                    int sample_word_length = 48) {
  LiftScanReport rep;
  std::vector<std::pair<double, double>> diam_pts, h1_pts;
  for (long n : ns) {
    LiftScanRow row;
    row.n = n;
    row.order = sl2_group_order(n);
    if (row.order <= opts.order_cap) {
      CayleyBfs bfs = cayley_bfs(n, opts);
      row.diameter = bfs.diameter;
      row.max_h1 = max_lifted_h1(bfs);
      row.sampled = false;
      diam_pts.emplace_back(std::log(3.0 * static_cast<double>(n)),
                            static_cast<double>(row.diameter));
    } else {
      Rng rng(sample_seed ^ static_cast<std::uint64_t>(n));
      const auto& gens = sl2_generators();
      Int max_h1 = 1;
      for (int s = 0; s < samples; ++s) {
        ZMat lift = ZMat::identity(2);
        for (int w = 0; w < sample_word_length; ++w)
          lift = gens[rng.index(gens.size())] * lift;
        Int h = height_h1_matrix(lift);
        if (h > max_h1) max_h1 = h;
      }
      row.diameter = -1;
      row.max_h1 = max_h1;
      row.sampled = true;
    }
    if (n > 1 && row.max_h1 > 0)
      h1_pts.emplace_back(std::log(static_cast<double>(n)), std::log(row.max_h1.get_d()));
    rep.rows.push_back(row);
  }
  rep.diameter_fit = fit_loglog(diam_pts);
  rep.h1_fit = fit_loglog(h1_pts);
  return rep;
}

}  // namespace symplat

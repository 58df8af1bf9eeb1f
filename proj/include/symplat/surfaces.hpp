#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "symplat/orders.hpp"
#include "symplat/symplectic.hpp"

namespace symplat {

/// Endomorphism tag of a rank-2 factor: generic (NonCM) or complex
/// multiplication by an imaginary quadratic order.
struct EndoTag {
  std::optional<ImaginaryQuadraticOrder> cm;

  static EndoTag non_cm() { return EndoTag{std::nullopt}; }
  static EndoTag with_cm(ImaginaryQuadraticOrder o) { return EndoTag{std::move(o)}; }
  bool is_cm() const { return cm.has_value(); }
};

inline bool tags_distinct(const EndoTag& a, const EndoTag& b) {
  if (a.is_cm() != b.is_cm()) return true;
  if (a.is_cm() && b.is_cm()) return a.cm->disc() != b.cm->disc();
  return false;  // NonCM / NonCM cannot certify non-isogenous factors
}

/// A principally polarised rank-4 symplectic lattice with a designated
/// rational splitting into two rank-2 factor spans carrying endomorphism
/// tags.  The lattice is kept in its own coordinates (standard Z^4).
///
/// A CM tag identifies the saturated factor basis with the module {1, w}
/// of its order, w = (D + sqrt(D))/2; endomorphism computations use this
/// identification.
class SplitSurfaceModel {
 public:
  SplitSurfaceModel(SymplecticLattice sym, ZMat span1, ZMat span2, EndoTag tag1, EndoTag tag2)
      : sym_(std::move(sym)),
        span1_(std::move(span1)),
        span2_(std::move(span2)),
        tag1_(std::move(tag1)),
        tag2_(std::move(tag2)) {
    if (sym_.rank() != 4) throw DomainError("surface model must have rank 4");
    if (sym_.lattice() != Lattice::standard(4))
      throw DomainError("model lattice must be in standard coordinates");
    if (!sym_.is_perfect()) throw DomainError("polarisation form must be perfect");
    if (span1_.rows() != 4 || span2_.rows() != 4)
      throw DomainError("factor spans must be 4-row coordinate matrices");
    sat1_ = saturate(Lattice(span1_), sym_.lattice());
    sat2_ = saturate(Lattice(span2_), sym_.lattice());
    if (sat1_.rank() != 2 || sat2_.rank() != 2) throw DomainError("factor spans must have rank 2");
    // spans must be psi-orthogonal after saturation and sum to full rank
    ZMat cross = sat1_.basis().transpose() * sym_.gram() * sat2_.basis();
    if (!cross.is_zero()) throw DomainError("factor spans are not orthogonal");
    ZMat joint(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        joint(i, j) = sat1_.basis()(i, j);
        joint(i, 2 + j) = sat2_.basis()(i, j);
      }
    if (det(joint) == 0) throw DomainError("factor spans do not split the surface");
    if (!tags_distinct(tag1_, tag2_))
      throw DomainError("factor tags must certify non-isogenous factors");
  }

  const SymplecticLattice& sym() const { return sym_; }
  const ZMat& factor1_span() const { return span1_; }
  const ZMat& factor2_span() const { return span2_; }
  const Lattice& factor1_saturation() const { return sat1_; }
  const Lattice& factor2_saturation() const { return sat2_; }
  const EndoTag& tag1() const { return tag1_; }
  const EndoTag& tag2() const { return tag2_; }

  /// The unique CM tag; errors unless exactly one factor is CM.
  const ImaginaryQuadraticOrder& cm_order() const {
    if (tag1_.is_cm() == tag2_.is_cm())
      throw DomainError("surface must have exactly one CM tag");
    return tag1_.is_cm() ? *tag1_.cm : *tag2_.cm;
  }

 private:
  SymplecticLattice sym_;
  ZMat span1_, span2_;
  EndoTag tag1_, tag2_;
  Lattice sat1_, sat2_;
};

/// An inclusion of a product of two principally polarised rank-2 lattices
/// into a surface lattice.  degree = index of the image; when multipliers
/// (n1, n2) are present the pullback Gram is block-diagonal n_i * (source
/// gram), which is the polarised case once n1 = n2.
class IsogenyWitness {
 public:
  IsogenyWitness(SymplecticLattice src1, SymplecticLattice src2, const SplitSurfaceModel& target,
                 ZMat inclusion, std::optional<std::pair<Int, Int>> multipliers = std::nullopt)
      : src1_(std::move(src1)),
        src2_(std::move(src2)),
        inclusion_(std::move(inclusion)),
        multipliers_(std::move(multipliers)) {
    if (src1_.rank() != 2 || src2_.rank() != 2)
      throw DomainError("witness sources must have rank 2");
    if (abs(discriminant(src1_)) != 1 || abs(discriminant(src2_)) != 1)
      throw DomainError("witness sources must be principally polarised");
    if (inclusion_.rows() != 4 || inclusion_.cols() != 4)
      throw DomainError("witness inclusion must be 4x4");
    degree_ = abs(det(inclusion_));
    if (degree_ == 0) throw DomainError("witness inclusion must be injective");
    if (multipliers_) {
      // pullback Gram must equal blockdiag(n1 g1, n2 g2)
      ZMat pb = inclusion_.transpose() * target.sym().gram() * inclusion_;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          Int expect = 0;
          if (i < 2 && j < 2) expect = multipliers_->first * src1_.gram()(i, j);
          if (i >= 2 && j >= 2) expect = multipliers_->second * src2_.gram()(i - 2, j - 2);
          if (pb(i, j) != expect) throw DomainError("witness multipliers do not match pullback");
        }
    }
  }

  const SymplecticLattice& source1() const { return src1_; }
  const SymplecticLattice& source2() const { return src2_; }
  const ZMat& inclusion() const { return inclusion_; }
  const Int& degree() const { return degree_; }
  const std::optional<std::pair<Int, Int>>& multipliers() const { return multipliers_; }
  bool is_polarised() const {
    return multipliers_.has_value() && multipliers_->first == multipliers_->second;
  }

  /// Image of factor i inside the target lattice.
  Lattice factor_image(int i) const {
    ZMat cols(4, 2);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 2; ++c) cols(r, c) = inclusion_(r, (i == 1 ? 0 : 2) + c);
    return Lattice(cols);
  }

 private:
  SymplecticLattice src1_, src2_;
  ZMat inclusion_;
  Int degree_;
  std::optional<std::pair<Int, Int>> multipliers_;
};

/// Does w_old factor through w_new (images nested, integrally)?
inline bool factors_through(const IsogenyWitness& w_old, const IsogenyWitness& w_new) {
  QMat c = solve(to_qmat(w_new.inclusion()), to_qmat(w_old.inclusion()));
  return is_integral(c);
}

namespace detail {

/// Rank-2 alternating gram [[0, a], [-a, 0]]: returns (|a|, gram/|a|).
inline std::pair<Int, ZMat> split_plane_multiplier(const ZMat& gram) {
  Int a = gram(0, 1);
  if (a == 0) throw DomainError("degenerate plane form");
  Int n = abs(a);
  ZMat principal(2, 2);
  principal(0, 1) = gram(0, 1) / n;
  principal(1, 0) = gram(1, 0) / n;
  return {n, principal};
}

}  // namespace detail

/// The polarised isogeny built from an arbitrary witness by saturating its
/// factor images (Lemma contract: multipliers agree, degree = n^2 <= input
/// degree, and the input factors through the output).
inline IsogenyWitness polarised_isogeny(const SplitSurfaceModel& s, const IsogenyWitness& w) {
  // each factor image must live in one of the model's rational factor spans
  Lattice img1 = w.factor_image(1);
  Lattice img2 = w.factor_image(2);
  const Lattice& v1 = s.factor1_saturation();
  const Lattice& v2 = s.factor2_saturation();
  auto in_span = [](const Lattice& sub, const Lattice& span) {
    try {
      coords_in(span, sub.basis());
      return true;
    } catch (const DomainError&) {
      return false;
    }
  };
  bool direct = in_span(img1, v1) && in_span(img2, v2);
  bool swapped = in_span(img1, v2) && in_span(img2, v1);
  if (!direct && !swapped) throw DomainError("witness factors do not respect the splitting");

  Lattice sat1 = saturate(direct ? img1 : img2, s.sym().lattice());
  Lattice sat2 = saturate(direct ? img2 : img1, s.sym().lattice());

  FormRestriction r1 = restrict_form(s.sym(), sat1);
  FormRestriction r2 = restrict_form(s.sym(), sat2);
  auto [n1, g1] = detail::split_plane_multiplier(r1.gram);
  auto [n2, g2] = detail::split_plane_multiplier(r2.gram);
  if (n1 != n2) throw Error("internal consistency error: saturated factors are not orthogonal");

  ZMat inclusion(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      inclusion(i, j) = sat1.basis()(i, j);
      inclusion(i, 2 + j) = sat2.basis()(i, j);
    }
  return IsogenyWitness(SymplecticLattice(Lattice::standard(2), g1),
                        SymplecticLattice(Lattice::standard(2), g2), s, inclusion,
                        std::make_pair(n1, n2));
}

struct MinimalIsogenyResult {
  Int n_min;  // least degree over all product decompositions
  std::vector<IsogenyWitness> witnesses;
  bool polarised_minimum_equal;  // a polarised witness realises the minimum
};

namespace detail {

/// Canonical index-N sublattice shapes of Z^4, cached across calls.
inline const std::vector<ZMat>& sublattice_shapes_z4(long n) {
  static std::map<long, std::vector<ZMat>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<ZMat> shapes;
  std::vector<std::vector<Int>> tuples;
  std::vector<Int> cur;
  divisor_tuples(Int(n), 4, cur, tuples);
  for (const auto& t : tuples)
    hnf_shapes_for_diagonal(t, [&](const ZMat& h) { shapes.push_back(h); });
  return cache.emplace(n, std::move(shapes)).first->second;
}

/// Integer annihilator rows of a 4x2 span: a 2x4 matrix whose kernel over Q
/// is exactly the span.
inline ZMat annihilator_rows(const ZMat& span) {
  ZMat k = kernel_z(span.transpose());  // 4 x 2
  return k.transpose();
}

}  // namespace detail

/// Scans N = 1, 2, ... enumerating index-N sublattices of the surface
/// lattice and testing decomposability as a psi-orthogonal direct sum of
/// rank-2 pieces of the two factor spans; returns all witnesses of minimal
/// degree.  Deterministic and oracle-checkable by construction.
inline MinimalIsogenyResult minimal_product_isogeny(const SplitSurfaceModel& s,
                                                    const EnumBudget& budget = {}) {
  const ZMat ann1 = detail::annihilator_rows(s.factor1_saturation().basis());
  const ZMat ann2 = detail::annihilator_rows(s.factor2_saturation().basis());

  std::uint64_t spent = 0;
  for (long n = 1;; ++n) {
    const auto& shapes = detail::sublattice_shapes_z4(n);
    spent += shapes.size();
    if (spent > budget.max_candidates) throw BudgetError("enumeration budget exceeded");

    std::vector<IsogenyWitness> found;
    bool any_polarised = false;
    for (const ZMat& h : shapes) {
      // S ∩ V_i: kernel of ann_i * h in S-coordinates
      ZMat k1 = kernel_z(ann1 * h);
      if (k1.cols() != 2) continue;
      ZMat k2 = kernel_z(ann2 * h);
      if (k2.cols() != 2) continue;
      ZMat joint(4, 4);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
          joint(i, j) = k1(i, j);
          joint(i, 2 + j) = k2(i, j);
        }
      Int d = det(joint);
      if (d != 1 && d != -1) continue;  // decomposition misses part of S

      Lattice m1(h * k1), m2(h * k2);
      FormRestriction r1 = restrict_form(s.sym(), m1);
      FormRestriction r2 = restrict_form(s.sym(), m2);
      auto [n1, g1] = detail::split_plane_multiplier(r1.gram);
      auto [n2, g2] = detail::split_plane_multiplier(r2.gram);

      ZMat inclusion(4, 4);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
          inclusion(i, j) = m1.basis()(i, j);
          inclusion(i, 2 + j) = m2.basis()(i, j);
        }
      std::optional<std::pair<Int, Int>> mult;
      if (n1 == n2) {
        mult = std::make_pair(n1, n2);
        any_polarised = true;
      }
      found.emplace_back(SymplecticLattice(Lattice::standard(2), g1),
                         SymplecticLattice(Lattice::standard(2), g2), s, inclusion, mult);
    }
    if (!found.empty()) {
      return MinimalIsogenyResult{Int(n), std::move(found), any_polarised};
    }
  }
}

/// Exponent of target/(image): the largest elementary divisor of the
/// witness inclusion.  For polarised witnesses it divides the multiplier.
inline Int kernel_exponent(const IsogenyWitness& w) {
  if (!w.is_polarised()) throw DomainError("witness is not polarised");
  Snf s = snf(w.inclusion());
  return s.d(3, 3);
}

namespace detail {

inline const std::vector<GluedInstance>& glued_pool(long n) {
  static std::map<long, std::vector<GluedInstance>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto pool = enumerate_glued_instances(Int(n), /*require_primitive=*/true);
  if (pool.empty()) throw Error("internal: no perfect glue exists for multiplier");
  return cache.emplace(n, std::move(pool)).first->second;
}

}  // namespace detail

/// Deterministic seeded generator of split-surface models with glue
/// multiplier n (glue index n^2) and tags (NonCM, CM of cm_disc).
inline SplitSurfaceModel generate_surface(std::uint64_t seed, long n, const Int& cm_disc) {
  if (n < 1) throw DomainError("glue multiplier must be positive");
  ImaginaryQuadraticOrder order(cm_disc);  // validates cm_disc
  Rng rng(seed);
  const auto& pool = detail::glued_pool(n);
  const GluedInstance& raw = pool[rng.index(pool.size())];
  auto [v, vinv] = random_unimodular_with_inverse(rng, 4);
  GluedInstance inst = conjugate_instance(raw, v, vinv);
  return SplitSurfaceModel(SymplecticLattice(Lattice::standard(4), inst.gram), inst.factor1,
                           inst.factor2, EndoTag::non_cm(), EndoTag::with_cm(order));
}

namespace detail {

/// Stabiliser of the surface lattice inside a frame acting factor-diagonally
/// through the given per-factor 2x2 rational representations of the frame
/// basis elements.
inline ProductOrder lattice_stabiliser(const ProductFrame& frame, const SplitSurfaceModel& s,
                                       const std::vector<QMat>& rho1,
                                       const std::vector<QMat>& rho2) {
  const std::size_t m = frame.rank();
  // P: columns = saturated factor bases (a basis of Lambda ⊗ Q)
  ZMat p(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      p(i, j) = s.factor1_saturation().basis()(i, j);
      p(i, 2 + j) = s.factor2_saturation().basis()(i, j);
    }
  QMat pq = to_qmat(p);
  QMat pq_inv = inverse(pq);

  // action of each frame basis element on Lambda ⊗ Q in lattice coordinates
  std::vector<QMat> actions;
  for (std::size_t j = 0; j < m; ++j) {
    QMat block(4, 4);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) {
        block(a, b) = rho1[j](a, b);
        block(2 + a, 2 + b) = rho2[j](a, b);
      }
    actions.push_back(pq * block * pq_inv);
  }

  // R = { a in Z^m : sum_j a_j action_j is an integer matrix }
  Int denom = 1;
  for (const QMat& act : actions)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) denom = lcm(denom, Int(act(i, j).get_den()));
  ZMat big(16, m + 16);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < 4; ++k) {
        Rat scaled = actions[j](i, k) * Rat(denom);
        big(i * 4 + k, j) = scaled.get_num();
      }
  for (std::size_t i = 0; i < 16; ++i) big(i, m + i) = denom;
  ZMat ker = kernel_z(big);
  ZMat a_part(m, ker.cols());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < ker.cols(); ++j) a_part(i, j) = ker(i, j);
  return ProductOrder(frame, hnf_of_span(a_part));
}

/// 2x2 rational matrices of {1, w_K} acting on the module {1, w_f} of the
/// conductor-f suborder (the factor lattice's identification).
inline std::vector<QMat> maximal_action_on_conductor_module(const ImaginaryQuadraticOrder& tag) {
  ImaginaryQuadraticOrder max_order(tag.fundamental_disc());
  const Int f = tag.conductor();
  const Int dk = max_order.disc();
  const Int gamma = f * dk * (f - 1) / 2;  // w_f = f w_K + gamma
  std::vector<QMat> out;
  out.push_back(QMat::identity(2));
  // w_K * 1 = (w_f - gamma)/f ; w_K * w_f = (-nr_f + (D_f - gamma) w_f)/f
  QMat wk(2, 2);
  wk(0, 0) = Rat(-gamma) / Rat(f);
  wk(1, 0) = Rat(1) / Rat(f);
  wk(0, 1) = Rat(-tag.omega_norm()) / Rat(f);
  wk(1, 1) = Rat(tag.disc() - gamma) / Rat(f);
  out.push_back(wk);
  return out;
}

}  // namespace detail

/// Endomorphism ring of the model: the subring of (Z or O_1) x O_2 acting
/// factor-diagonally that stabilises the lattice, with its index in the
/// product of the tag orders.  Z(End) = End here: the algebra is commutative
/// because the tags exclude the isotypic case.
inline ProductOrder end_ring_of_surface(const SplitSurfaceModel& s) {
  std::vector<ProductFrame::Component> comps;
  comps.push_back(s.tag1().cm);
  comps.push_back(s.tag2().cm);
  ProductFrame frame(comps);

  std::vector<QMat> rho1, rho2;
  auto component_action = [&](const EndoTag& tag) {
    std::vector<QMat> out;
    out.push_back(QMat::identity(2));
    if (tag.is_cm()) out.push_back(to_qmat(tag.cm->omega_matrix()));
    return out;
  };
  std::vector<QMat> act1 = component_action(s.tag1());
  std::vector<QMat> act2 = component_action(s.tag2());
  // frame basis order: component-1 elements then component-2 elements;
  // each acts trivially (zero) on the other factor -- here as scalar 0
  const std::size_t m1 = act1.size(), m2 = act2.size();
  for (std::size_t j = 0; j < m1; ++j) {
    rho1.push_back(act1[j]);
    rho2.push_back(QMat(2, 2));
  }
  for (std::size_t j = 0; j < m2; ++j) {
    rho1.push_back(QMat(2, 2));
    rho2.push_back(act2[j]);
  }
  return detail::lattice_stabiliser(frame, s, rho1, rho2);
}

/// Endomorphism-ring surrogate used by the complexity module: factor 1 is
/// given the hypothetical CM structure of `partner_disc` (taken maximal) and
/// the frame is the product of the maximal orders of both fields.
inline ProductOrder end_ring_with_partner(const SplitSurfaceModel& s, const Int& partner_disc) {
  ImaginaryQuadraticOrder partner(partner_disc);
  if (!partner.is_maximal()) partner = ImaginaryQuadraticOrder(partner.fundamental_disc());
  const ImaginaryQuadraticOrder& tag = s.cm_order();
  ImaginaryQuadraticOrder tag_max(tag.fundamental_disc());
  if (partner.disc() == tag_max.disc())
    throw DomainError("compositum degenerate");

  ProductFrame frame = ProductFrame::pair(partner, tag_max);
  std::vector<QMat> rho1, rho2;
  // partner acts on factor 1 via its own module {1, w}; maximal order of the
  // CM field acts on factor 2 through the conductor-f module identification
  std::vector<QMat> act1 = {QMat::identity(2), to_qmat(partner.omega_matrix())};
  std::vector<QMat> act2 = detail::maximal_action_on_conductor_module(tag);
  bool cm_first = s.tag1().is_cm();
  if (cm_first) throw DomainError("surrogate expects the CM factor in position 2");
  for (std::size_t j = 0; j < 2; ++j) {
    rho1.push_back(act1[j]);
    rho2.push_back(QMat(2, 2));
  }
  for (std::size_t j = 0; j < 2; ++j) {
    rho1.push_back(QMat(2, 2));
    rho2.push_back(act2[j]);
  }
  return detail::lattice_stabiliser(frame, s, rho1, rho2);
}

}  // namespace symplat

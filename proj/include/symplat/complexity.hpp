#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "symplat/fit.hpp"
#include "symplat/surfaces.hpp"

namespace symplat {

/// Per-surface complexity record.  delta_prime is exact; the Delta side is
/// a surrogate (max of the splitting-field discriminant D_T and the
/// profinite unit index), which is the quantity the adelic definition is
/// bounded through -- it is flagged as such.
struct ComplexityReport {
  // provenance of the underlying model (CSV columns)
  std::uint64_t seed = 0;
  long glue_n = 0;
  Int cm_disc = 0;

  Int n_min = 0;        // N(s), minimal product-isogeny degree
  Int cm_disc_abs = 0;  // |disc End(E_2)|
  Int delta_prime = 0;  // max(n_min, cm_disc_abs)

  std::optional<Int> d_t;              // |disc (F_1 F_2)| for the partner field
  std::optional<Int> unit_index;       // [O-hat^* : R-hat^*]
  std::optional<Int> delta_surrogate;  // max(d_t, unit_index)
  bool surrogate_is_upper_bound_flavoured = false;
};

/// Delta'(s) = max{N(s), |disc End(E_2)|}; exact.
inline ComplexityReport delta_prime(const SplitSurfaceModel& s, const EnumBudget& budget = {}) {
  ComplexityReport rep;
  rep.cm_disc = s.cm_order().disc();
  MinimalIsogenyResult mi = minimal_product_isogeny(s, budget);
  rep.n_min = mi.n_min;
  rep.cm_disc_abs = abs(s.cm_order().disc());
  rep.delta_prime = rep.n_min > rep.cm_disc_abs ? rep.n_min : rep.cm_disc_abs;
  return rep;
}

/// Fills the Delta-surrogate side: D_T from the compositum of the partner
/// field with the CM field, the unit index from the stabiliser suborder in
/// the maximal product frame.
inline ComplexityReport delta_surrogate(const SplitSurfaceModel& s, const Int& partner_disc,
                                        const EnumBudget& budget = {}) {
  ComplexityReport rep = delta_prime(s, budget);
  ImaginaryQuadraticOrder partner(partner_disc);
  ImaginaryQuadraticOrder partner_max(partner.fundamental_disc());
  ImaginaryQuadraticOrder cm_max(s.cm_order().fundamental_disc());
  if (partner_max.disc() == cm_max.disc()) throw DomainError("compositum degenerate");

  rep.d_t = compositum_disc(partner_max, cm_max);
  ProductOrder stab = end_ring_with_partner(s, partner_max.disc());
  ProductOrder maximal = ProductOrder::maximal(stab.frame());
  rep.unit_index = unit_index_profinite(maximal, stab);
  rep.delta_surrogate = *rep.d_t > *rep.unit_index ? *rep.d_t : *rep.unit_index;
  rep.surrogate_is_upper_bound_flavoured = true;
  return rep;
}

/// Empirical polynomial comparison of the two complexities over a family:
/// least squares of log(delta_prime) against log(delta_surrogate) in both
/// directions.  Requires at least 50 instances; a constant family is
/// flagged degenerate.
inline FitReport comparison_experiment(const std::vector<ComplexityReport>& rows) {
  if (rows.size() < 50) throw DomainError("family too small");
  std::vector<std::pair<double, double>> xy;
  for (const ComplexityReport& r : rows) {
    if (!r.delta_surrogate) throw DomainError("family rows must carry the surrogate value");
    xy.emplace_back(std::log(r.delta_surrogate->get_d()), std::log(r.delta_prime.get_d()));
  }
  return fit_loglog(xy);
}

/// Family configuration for the comparison experiment.
struct FamilySpec {
  std::vector<long> glue_multipliers = {1, 2, 3, 4, 5, 6};
  std::vector<long> cm_discs = {-3, -4, -7, -8, -11};
  int seeds_per_cell = 2;
  std::uint64_t base_seed = 1;
  // the two fixed partner CM fields; the second is used on collision
  Int partner_a = -163;
  Int partner_b = -67;
};

inline std::vector<ComplexityReport> complexity_family(const FamilySpec& spec,
                                                       const EnumBudget& budget = {}) {
  std::vector<ComplexityReport> rows;
  std::uint64_t seed = spec.base_seed;
  for (long n : spec.glue_multipliers)
    for (long d : spec.cm_discs)
      for (int i = 0; i < spec.seeds_per_cell; ++i, ++seed) {
        SplitSurfaceModel s = generate_surface(seed, n, Int(d));
        Int partner = spec.partner_a;
        if (ImaginaryQuadraticOrder(Int(d)).fundamental_disc() ==
            ImaginaryQuadraticOrder(partner).fundamental_disc())
          partner = spec.partner_b;
        ComplexityReport rep = delta_surrogate(s, partner, budget);
        rep.seed = seed;
        rep.glue_n = n;
        rep.cm_disc = d;
        rows.push_back(std::move(rep));
      }
  return rows;
}

inline std::string complexity_csv(const std::vector<ComplexityReport>& rows) {
  std::ostringstream os;
  os << "seed,n,cm_disc,N,delta_prime,d_t,unit_index\n";
  for (const ComplexityReport& r : rows) {
    os << r.seed << "," << r.glue_n << "," << r.cm_disc << "," << r.n_min << "," << r.delta_prime
       << ",";
    if (r.d_t) os << *r.d_t;
    os << ",";
    if (r.unit_index) os << *r.unit_index;
    os << "\n";
  }
  return os.str();
}

}  // namespace symplat

#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace symplat {

/// Least-squares line fit of (x, y) pairs in both directions.  The exact
/// data is converted to double only here, at the final fitting step.
struct FitReport {
  std::size_t count = 0;
  bool degenerate = false;
  double slope_up = 0, intercept_up = 0;      // y ~ slope * x + c
  double slope_down = 0, intercept_down = 0;  // x ~ slope * y + c
  double max_residual_up = 0;
};

inline FitReport fit_loglog(const std::vector<std::pair<double, double>>& xy) {
  FitReport fit;
  fit.count = xy.size();
  if (xy.empty()) {
    fit.degenerate = true;
    return fit;
  }
  const double n = static_cast<double>(xy.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (const auto& [x, y] : xy) {
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  if (vx < 1e-12 || vy < 1e-12) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope_up = cxy / vx;
  fit.intercept_up = (sy - fit.slope_up * sx) / n;
  fit.slope_down = cxy / vy;
  fit.intercept_down = (sx - fit.slope_down * sy) / n;
  for (const auto& [x, y] : xy) {
    double r = std::fabs(y - (fit.slope_up * x + fit.intercept_up));
    if (r > fit.max_residual_up) fit.max_residual_up = r;
  }
  return fit;
}

}  // namespace symplat

#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature with an absolute error
// target. The panel with the largest error estimate is bisected until the
// summed estimate meets the target or the subdivision budget runs out.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "psidensity/scalar_fn.hpp"

namespace psidensity {

struct QuadOptions {
  /// Initial panels are cut at multiples of this spacing when present.
  std::optional<double> half_period;
  /// Bisections allowed beyond the initial panels.
  std::size_t max_subdivisions = 100000;
  /// Initial panels per decade when b/a > 4 (geometric cuts).
  int panels_per_decade = 8;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // summed panel error estimates
  std::size_t panels = 0;
  std::size_t evaluations = 0;
};

/// Integral of f over [a, b] with estimated absolute error <= tol. Throws
/// ConvergenceError when the budget is exhausted, PreconditionError for
/// a >= b or tol <= 0, and propagates DomainError from f.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double tol,
                     const QuadOptions& opt = {});

/// Same, taking the half-period hint from f.
QuadResult integrate(const ScalarFn& f, double a, double b, double tol);

/// Initial panel boundaries used by integrate, a and b included.
std::vector<double> initial_cuts(double a, double b, const QuadOptions& opt);

}  // namespace psidensity

#pragma once

// Upper and lower psi-densities at a finite horizon, density bound reports,
// and sets extracted from predicates on a log grid.

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "psidensity/interval_set.hpp"
#include "psidensity/psi_scale.hpp"
#include "psidensity/scalar_fn.hpp"

namespace psidensity {

struct DensityEstimate {
  double upper = 0.0;
  double lower = 0.0;
  double cutoff = 0.0;  // x = log r
  std::size_t eval_points = 0;
  std::size_t tail_window = 0;
  /// Fewer candidate extrema than tail_window were available.
  bool low_confidence = false;
};

/// One candidate extremum of the density ratio D(r).
struct RatioPoint {
  double x = 0.0;
  double ratio = 0.0;
  bool is_max = false;
};

enum class Relation { ge, le, eq };

struct BoundReport {
  std::string id;
  double measured = 0.0;
  double bound = 0.0;
  Relation relation = Relation::ge;
  double slack = 0.0;
  bool pass = false;
  bool applicable = true;
  std::string note;
};

/// Builds a report; pass is decided from the relation and slack.
BoundReport make_report(std::string id, double measured, Relation rel, double bound, double slack,
                        std::string note = {});
/// A report whose premise failed; never passes.
BoundReport inapplicable(std::string id, std::string why);

const char* relation_symbol(Relation r);

inline constexpr std::size_t kDefaultTailWindow = 8;

/// D(r) = psi-measure(E n [r0, r)) / psi(r) at every candidate extremum below
/// the cutoff: right endpoints (maxima), left endpoints after a gap and the
/// cutoff itself (minima).
std::vector<RatioPoint> density_trajectory(const IntervalSet& e, const PsiScale& s, double x_cutoff);

/// Upper/lower density as max/min of D over the last `tail_window`
/// candidates. tail_window < 4 throws PreconditionError.
DensityEstimate estimate_density(const IntervalSet& e, const PsiScale& s, double x_cutoff,
                                 std::size_t tail_window = kDefaultTailWindow);

/// The chain 0 <= lower(e^psi) <= lower(psi) <= upper(psi) <= upper(e^psi) <= 1
/// at one horizon, slack 1e-2.
std::vector<BoundReport> check_chain(const IntervalSet& e, const PsiScale& s, double x_cutoff,
                                     std::size_t tail_window = kDefaultTailWindow);

/// Finite psi-measure implies zero upper e^psi-density. The measure must agree
/// within 1e-6 at the last two cutoffs (PreconditionError otherwise); the
/// report passes iff the e^psi ratio decreases along the cutoffs and ends
/// below 1e-3.
BoundReport check_finite_measure_zero_density(const IntervalSet& e, const PsiScale& s,
                                              const std::vector<double>& x_cutoffs);

struct GridSpec {
  int per_decade = 64;                      // points per factor 10 in r
  std::size_t max_uniform_points = 1u << 20;  // then geometric in x
  double refine_tol = 1e-9;                 // boundary width in x (relative in r)
};

/// Increasing x grid on (x_begin, x_end]: uniform with step ln(10)/per_decade,
/// geometric in x once the budget is spent, merged with the feature points.
std::vector<double> make_grid(double x_begin, double x_end, const GridSpec& g,
                              const std::vector<double>& features = {});

/// {x : pred(x)} below x_cutoff. Boundaries are bisected to width
/// refine_tol and placed at the first point of the new state, so intervals
/// are closed on the left. NaN or throwing evaluations count as outside.
IntervalSet extract_set(const std::function<bool(double)>& pred, Domain d, double x_cutoff,
                        const GridSpec& g = {}, const std::vector<double>& features = {});

/// {r : g(r) > 0}.
IntervalSet extract_positive(const ScalarFn& g, Domain d, double x_cutoff, const GridSpec& grid = {});

struct ExceptionalResult {
  double r_prime = 0.0;  // x-coordinate
  BoundReport report;
};

/// Smallest grid point x' with f(x) <= g(s(x)) for every grid x in (x', cutoff),
/// s(r) = psi^{-1}(alpha psi(r)). Checks monotonicity of f and g, f <= g off E,
/// and alpha > 1/(1 - upper density(E)); violations throw PreconditionError.
ExceptionalResult avoid_exceptional(const ScalarFn& f, const ScalarFn& g, const IntervalSet& e,
                                    const PsiScale& s, double alpha, double x_cutoff,
                                    std::size_t grid_points = 2000);

}  // namespace psidensity

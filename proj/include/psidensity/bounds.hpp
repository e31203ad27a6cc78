#pragma once

// Density bounds for the sets where a function is near its upper or lower
// limit, for comparison sets of two functions, and for the growth
// corollaries built on them. Every check materializes its sets with
// extract_set and measures them with estimate_density at one horizon.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psidensity/density.hpp"
#include "psidensity/growth.hpp"
#include "psidensity/scalar_fn.hpp"

namespace psidensity {

inline constexpr double kBoundSlack = 2e-2;
/// Extra slack when a limit, order or type was estimated instead of known.
inline constexpr double kEstimateSlack = 2e-2;

/// phi(r) = log T(r) / log r, with T's breakpoints as features.
ScalarFn order_ratio(const GrowthFunction& T);

struct LimitSetSpec {
  ScalarFn phi;
  PsiScale psi = PsiScale::make(ScaleKind::log, 1.0, kInf);
  /// limsup and liminf of phi; NaN means estimate them (slack widened).
  double K = std::numeric_limits<double>::quiet_NaN();
  double k = std::numeric_limits<double>::quiet_NaN();
  double eps = 0.5;
  double M = 10.0;  // threshold of H_M when K = inf
};

struct Limits {
  double upper = 0.0;
  double lower = 0.0;
};

/// Trailing-window limsup/liminf of phi at its local extrema.
Limits estimate_limits(const ScalarFn& phi, double x_begin, double x_cutoff,
                       std::size_t tail_window = kDefaultTailWindow, const GridSpec& grid = {});

/// Checks phi * psi non-decreasing on 10^3 points (relative tolerance 1e-12).
bool phi_psi_nondecreasing(const ScalarFn& phi, const PsiScale& psi, double x_begin, double x_cutoff);

/// Reports with ids "thm3.1: ..." (Eqs. for F_eps, G_eps, the e^psi claims,
/// or H_M when K is infinite) and, when eps < (K - k)/2, "prop3.2: ...".
std::vector<BoundReport> verify_limsup_sets(const LimitSetSpec& spec, double x_cutoff,
                                            std::size_t tail_window = kDefaultTailWindow,
                                            const GridSpec& grid = {});

enum class LimitMode { limsup, liminf };

/// G = {phi1 < phi2}: upper psi-density >= 1 - k1/k2 and upper e^psi-density 1.
/// k1, k2 default to trailing-window estimates in the given mode.
std::vector<BoundReport> verify_comparison(const ScalarFn& phi1, const ScalarFn& phi2, const PsiScale& psi,
                                           LimitMode mode, double x_cutoff,
                                           double k1 = std::numeric_limits<double>::quiet_NaN(),
                                           double k2 = std::numeric_limits<double>::quiet_NaN(),
                                           std::size_t tail_window = kDefaultTailWindow,
                                           const GridSpec& grid = {});

using Params = std::map<std::string, double>;

/// id is one of thm1.1, cor4.1 ... cor4.7. Parameters by id:
///   thm1.1, cor4.1: a, b (default midway between lower order and order)
///   cor4.2, cor4.3: eps
///   cor4.4: eps0, rho, tau (rho and tau default to estimates)
///   cor4.5: beta (default 1), xi (1 = order, 0 = lower order); uses T2
///   cor4.6: C, rho, tau1, tau2; uses T2
///   cor4.7: C1, C2, rho, tau
/// Premise failures come back as inapplicable reports naming the premise.
std::vector<BoundReport> verify_growth_corollary(const std::string& id, const Params& params,
                                                 const GrowthFunction& T1,
                                                 const std::optional<GrowthFunction>& T2, double x_cutoff,
                                                 std::size_t tail_window = kDefaultTailWindow,
                                                 const GridSpec& grid = {});

}  // namespace psidensity

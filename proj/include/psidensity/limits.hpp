#pragma once

// Limits in psi-density, psi-weighted Cesaro averages, the upgrade from a
// density limit to a usual limit, and numerical divergence witnesses.

#include <optional>
#include <string>
#include <vector>

#include "psidensity/density.hpp"
#include "psidensity/psi_scale.hpp"
#include "psidensity/scalar_fn.hpp"

namespace psidensity {

enum class VerdictKind { usual_limit, psi_density_limit, no_limit_detected, divergence_witness };

const char* verdict_name(VerdictKind k);

struct TrajectoryPoint {
  double r = 0.0;
  double value = 0.0;
};

struct LimitVerdict {
  VerdictKind kind = VerdictKind::no_limit_detected;
  std::optional<double> value;  // may be +-inf
  std::string psi;
  std::vector<TrajectoryPoint> evidence;
  std::vector<double> eps_grid;
  /// Upper psi-density of {|f - l| >= eps} for each eps (density certificates).
  std::vector<double> densities;
  /// Monotonicity screens of the usual-limit upgrade.
  std::optional<bool> condition_i;
  std::optional<bool> condition_ii;
  /// |q(r)| <= 2 int_{s(r)}^r |f| held on the evidence grid (condition (ii) only).
  std::optional<bool> tail_bound_holds;
  std::string note;
};

inline const std::vector<double> kDefaultEpsGrid{1.0, 0.3, 0.1, 0.03, 0.01};

/// (1/psi(r)) int_a^r psi(t) f(t) dt for each r in r_values (increasing,
/// all > a). Each panel between consecutive r is integrated once; the
/// absolute error of every average stays below tol.
std::vector<TrajectoryPoint> cesaro_psi_average(const ScalarFn& f, const PsiScale& psi, double a,
                                                const std::vector<double>& r_values, double tol);

/// l in psi-density: every S_eps = {|f - l| >= eps} (for l = +inf,
/// {f <= 1/eps}; for -inf, {f >= -1/eps}) has upper psi-density below
/// threshold at the cutoff (x = log r).
LimitVerdict density_limit_certify(const ScalarFn& f, double l, const PsiScale& psi,
                                   const std::vector<double>& eps_grid, double x_cutoff,
                                   double threshold = 1e-2, std::size_t tail_window = kDefaultTailWindow,
                                   const GridSpec& grid = {});

/// Screens of int_{r1}^inf |f|: per-decade increments must decay like
/// (log r)^-p with p >= 1.5 over the last two decades.
struct IntegrabilityScreen {
  bool converged = false;
  double integral = 0.0;  // int_{r1}^{cutoff} |f|
  double decay_exponent = 0.0;
  std::vector<TrajectoryPoint> increments;  // (decade end, increment)
};
IntegrabilityScreen screen_abs_integral(const ScalarFn& f, double r1, double r_cutoff);

/// q(r) = psi(r) f(r) / psi'(r) -> 0 when int |f| < inf and either
/// (i) psi^2 |f| / psi' is non-decreasing or (ii) |f| / psi' is
/// non-increasing on 10^3 log-spaced points of (r1, cutoff]. Falls back to
/// the density limit of q when neither screen passes.
LimitVerdict usual_limit_certify(const ScalarFn& f, const PsiScale& psi, double r1, double r_cutoff);

/// Either f psi is not non-decreasing on the grid, or f is within tol of l
/// at the trailing grid points.
BoundReport dichotomy_check(const ScalarFn& f, double l, const PsiScale& psi, double x_cutoff, double tol = 1e-2,
                            std::size_t grid_points = 1000);

/// Stabilized Cesaro averages away from 0 (or escaping ones) witness a
/// divergent integral. Stabilized: the last 5 points spread less than
/// tol max(1, |mean|). Escaping: |v| non-decreasing over the last 5
/// points, |v_last| >= 1.5 |v_mid| with v_mid halfway in log r, and
/// |v_last| > 10 tol.
LimitVerdict divergence_witness(const ScalarFn& f, const PsiScale& psi, double a,
                                const std::vector<double>& r_values, double tol = 1e-2);

/// Plain trailing-window limit check on the local extrema of f: a usual
/// limit is reported when max - min over the window is at most tol.
LimitVerdict window_limit_check(const ScalarFn& f, double x_begin, double x_cutoff, double tol = 1e-2,
                                std::size_t tail_window = kDefaultTailWindow, const GridSpec& grid = {});

/// n points log-spaced from a to b inclusive.
std::vector<double> log_spaced(double a, double b, std::size_t n);

}  // namespace psidensity

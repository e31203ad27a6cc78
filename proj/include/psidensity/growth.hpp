#pragma once

// Order, lower order and type of non-decreasing functions T, and zig-zag
// functions with prescribed lower order and order. T is handled through
// y(x) = log T(e^x) so that astronomically large r never overflow.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psidensity/density.hpp"
#include "psidensity/expr.hpp"

namespace psidensity {

/// Breakpoints of a zig-zag in (x, y) = (log r, log T) coordinates.
struct ZigzagMeta {
  double ell = 0.0;
  double L = 0.0;  // kInf for the unbounded variant
  std::vector<std::pair<double, double>> breakpoints;
  std::vector<double> slopes;  // slope of the segment starting at breakpoint i
};

class GrowthFunction {
 public:
  using LogFn = std::function<double(double)>;

  GrowthFunction(std::string name, LogFn log_value, std::vector<double> features = {});

  static GrowthFunction from_expression(const expr::Expression& e);
  /// "zigzag:ell,L" (L may be "inf") or an expression in t.
  static GrowthFunction parse(const std::string& spec);

  /// log T(e^x).
  double log_value(double x) const { return log_value_(x); }
  /// T(r); may overflow to inf where log_value does not.
  double value(double r) const;
  const std::string& name() const { return name_; }
  const std::vector<double>& features() const { return features_; }
  const std::optional<ZigzagMeta>& zigzag() const { return zigzag_; }
  GrowthFunction& with_zigzag(ZigzagMeta meta);

  /// T^c; zig-zag metadata is scaled along.
  GrowthFunction power(double c) const;

  /// Throws PreconditionError if y decreases (relative 1e-12) or is not
  /// finite on `points` evenly spaced x in [x_begin, x_end].
  void check_monotone(double x_begin, double x_end, std::size_t points = 1000) const;

 private:
  std::string name_;
  LogFn log_value_;
  std::vector<double> features_;
  std::optional<ZigzagMeta> zigzag_;
};

/// Default delta rule, min(1, L - ell)/(n + 1), n = 1, 2, ...
std::function<double(int)> default_delta(double ell, double L);

/// Piecewise linear y: flat until y/x = ell, then slope L until
/// y/x = L - delta_n, repeated. Starts at (x0, y0); y0 defaults to ell x0, so
/// the first segment rises. Left of x0, y = y0 x / x0. Breakpoints are built
/// up to x = 1e300.
GrowthFunction make_zigzag(double ell, double L, double x0 = 1.0,
                           double y0 = std::numeric_limits<double>::quiet_NaN(),
                           const std::function<double(int)>& delta = {});

/// Zig-zag of infinite order: rising segment n has slope ell + n and ends at
/// ratio ell + n - 1/2; flat segments return to ratio ell.
GrowthFunction make_zigzag_unbounded(double ell, double x0 = 1.0);

struct OrderEstimate {
  double upper_order = 0.0;  // kInf when infinite
  double lower_order = 0.0;
  bool upper_infinite = false;
  bool lower_infinite = false;
  double ratio_at_cutoff = 0.0;
  double cutoff = 0.0;  // x
  std::size_t tail_window = 0;
  std::size_t candidates = 0;
  bool low_confidence = false;
};

/// A local extremum (or the end point) of a sampled function.
struct Extremum {
  double x = 0.0;
  double value = 0.0;
  bool is_max = false;
};

/// Local extrema of g on a grid over (x_begin, x_end], each refined by a
/// golden-section (Brent) search between its grid neighbours, followed by
/// the end point x_end.
std::vector<Extremum> local_extrema(const std::function<double(double)>& g, double x_begin,
                                    double x_end, const GridSpec& grid = {},
                                    const std::vector<double>& features = {});

/// Trailing-window max and min of log T(r)/log r at its local extrema
/// (exactly at the breakpoints for zig-zags). Generic functions are sampled
/// from x_begin (default log r = 1).
OrderEstimate estimate_orders(const GrowthFunction& T, double x_cutoff,
                              std::size_t tail_window = kDefaultTailWindow, double x_begin = 1.0,
                              const GridSpec& grid = {});

/// Trailing-window max of T(r)/r^rho at candidate extrema.
double estimate_type(const GrowthFunction& T, double rho, double x_cutoff,
                     std::size_t tail_window = kDefaultTailWindow, double x_begin = 1.0,
                     const GridSpec& grid = {});

}  // namespace psidensity

#pragma once

// Real functions of one real variable r > 0, evaluable both at r and at
// x = log r. Optional hints (feature points, half period) help grids and
// quadrature see narrow or oscillating structure.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psidensity/expr.hpp"

namespace psidensity {

class ScalarFn {
 public:
  using Fn = std::function<double(double)>;

  ScalarFn() = default;
  /// `at_r` evaluates at r; `at_log` at x = log r. Either may be empty, in
  /// which case it is derived from the other.
  ScalarFn(std::string name, Fn at_r, Fn at_log);

  static ScalarFn from_expression(const expr::Expression& e);
  static ScalarFn parse(const std::string& text);
  static ScalarFn constant(double c);

  double operator()(double r) const { return at_r_(r); }
  double at_log(double x) const { return at_log_(x); }
  const std::string& name() const { return name_; }

  /// x positions the function changes character at (jumps, narrow spikes,
  /// kinks). Grids always include them.
  const std::vector<double>& features() const { return features_; }
  ScalarFn& with_features(std::vector<double> xs);
  /// Spacing in r between consecutive zeros of an oscillating factor.
  const std::optional<double>& half_period() const { return half_period_; }
  ScalarFn& with_half_period(double hp);

 private:
  std::string name_;
  Fn at_r_;
  Fn at_log_;
  std::vector<double> features_;
  std::optional<double> half_period_;
};

/// The indicator of the union over n >= 1 of [n, n + 2^-n], with feature
/// points at both ends of every spike and inside every gap below r = e^x_max.
ScalarFn spike_indicator(double x_max);

}  // namespace psidensity

#include "psidensity/scalar_fn.hpp"

#include <cmath>

#include "psidensity/error.hpp"

namespace psidensity {

ScalarFn::ScalarFn(std::string name, Fn at_r, Fn at_log) : name_(std::move(name)) {
  if (!at_r && !at_log) throw PreconditionError("ScalarFn needs an evaluator");
  if (!at_r) at_r = [g = at_log](double r) { return g(std::log(r)); };
  if (!at_log) at_log = [g = at_r](double x) { return g(std::exp(x)); };
  at_r_ = std::move(at_r);
  at_log_ = std::move(at_log);
}

ScalarFn ScalarFn::from_expression(const expr::Expression& e) {
  ScalarFn f(
      e.source(), [e](double r) { return expr::evaluate(e, r); },
      [e](double x) { return expr::evaluate_log(e, x).value(); });
  if (auto hp = e.half_period_hint()) f.with_half_period(*hp);
  return f;
}

ScalarFn ScalarFn::parse(const std::string& text) { return from_expression(expr::parse(text)); }

ScalarFn ScalarFn::constant(double c) {
  return ScalarFn(std::to_string(c), [c](double) { return c; }, [c](double) { return c; });
}

ScalarFn& ScalarFn::with_features(std::vector<double> xs) {
  features_ = std::move(xs);
  return *this;
}

ScalarFn& ScalarFn::with_half_period(double hp) {
  half_period_ = hp;
  return *this;
}

namespace {

// Spike n occupies [log n, log n + log1p(2^-n / n)] in x; both ends are
// computed the same way here and in the feature list so grid points at the
// features classify consistently.
double spike_end(double n) {
  return std::log(n) + std::log1p(std::ldexp(1.0, -static_cast<int>(std::min(n, 2000.0))) / n);
}

double spike_at_log(double x) {
  if (!(x >= 0.0) || x > 700.0) return 0.0;
  const double n = std::round(std::exp(x));
  for (double m : {n - 1.0, n}) {
    if (m < 1.0) continue;
    if (x >= std::log(m) && x <= spike_end(m)) return 1.0;
  }
  return 0.0;
}

}  // namespace

ScalarFn spike_indicator(double x_max) {
  ScalarFn f(
      "spikes",
      [](double r) {
        if (!(r >= 1.0)) return 0.0;
        const double n = std::floor(r);
        return r - n <= std::ldexp(1.0, -static_cast<int>(std::min(n, 2000.0))) ? 1.0 : 0.0;
      },
      spike_at_log);
  std::vector<double> xs;
  // A point inside every gap too: spikes are closer than any grid step once
  // 1/n < ln(10)/64, and extract_set only sees changes between points.
  for (double n = 1.0; std::log(n) < x_max; n += 1.0) {
    xs.push_back(std::log(n));
    const double b = spike_end(n);
    if (b > xs.back()) xs.push_back(b);
    xs.push_back(0.5 * (b + std::log(n + 1.0)));
  }
  f.with_features(std::move(xs));
  return f;
}

}  // namespace psidensity

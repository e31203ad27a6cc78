#include "psidensity/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>

#include "psidensity/error.hpp"

namespace psidensity {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b, std::size_t& evals) {
  const double half = 0.5 * (b - a);
  const double mid = a + half;
  // Kronrod node 2i is Gauss node i.
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double f0 = f(mid);
  double fv[15];
  fv[0] = f0;
  double kron = f0 * wk[0];
  double gauss = f0 * wg[0];
  double resabs = std::abs(f0) * wk[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double hi = f(mid + half * xk[i]);
    const double lo = f(mid - half * xk[i]);
    fv[2 * i - 1] = hi;
    fv[2 * i] = lo;
    kron += (hi + lo) * wk[i];
    resabs += (std::abs(hi) + std::abs(lo)) * wk[i];
    if (i % 2 == 0) gauss += (hi + lo) * wg[i / 2];
  }
  // QUADPACK error heuristic: scale |K - G| by the integrand's variation.
  const double mean = 0.5 * kron;
  double resasc = std::abs(fv[0] - mean) * wk[0];
  for (std::size_t i = 1; i < xk.size(); ++i)
    resasc += (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean)) * wk[i];
  const double v = kron;
  double err = std::abs(kron - gauss);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs);
  evals += 15;
  if (!std::isfinite(v)) throw DomainError("integrand not finite on [" + std::to_string(a) + ", " +
                                           std::to_string(b) + "]");
  return {a, b, half * v, std::abs(half) * err};
}

}  // namespace

std::vector<double> initial_cuts(double a, double b, const QuadOptions& opt) {
  std::vector<double> cuts{a, b};
  if (opt.half_period && *opt.half_period > 0.0) {
    const double hp = *opt.half_period;
    const double count = (b - a) / hp;
    if (count < 5e6) {
      for (double k = std::ceil(a / hp); k * hp < b; k += 1.0)
        if (k * hp > a) cuts.push_back(k * hp);
    }
  }
  if (a > 0.0 && b / a > 4.0 && opt.panels_per_decade > 0) {
    const double step = std::pow(10.0, 1.0 / opt.panels_per_decade);
    for (double x = a * step; x < b; x *= step) cuts.push_back(x);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double tol,
                     const QuadOptions& opt) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw PreconditionError("integrate needs finite a < b");
  if (!(tol > 0.0)) throw PreconditionError("integrate needs tol > 0");
  const auto cuts = initial_cuts(a, b, opt);
  QuadResult res;
  std::priority_queue<Panel, std::vector<Panel>, ByError> work;
  std::vector<Panel> done;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = eval_panel(f, cuts[i], cuts[i + 1], res.evaluations);
    total_err += p.error;
    work.push(p);
  }
  std::size_t splits = 0;
  while (total_err > tol && !work.empty()) {
    if (splits == opt.max_subdivisions)
      throw ConvergenceError("integrate: error estimate " + std::to_string(total_err) + " above tol " +
                             std::to_string(tol) + " after " + std::to_string(splits) + " subdivisions");
    const Panel p = work.top();
    work.pop();
    const double mid = p.a + 0.5 * (p.b - p.a);
    if (!(mid > p.a && mid < p.b)) {
      done.push_back(p);
      continue;
    }
    const Panel l = eval_panel(f, p.a, mid, res.evaluations);
    const Panel r = eval_panel(f, mid, p.b, res.evaluations);
    total_err += l.error + r.error - p.error;
    work.push(l);
    work.push(r);
    ++splits;
    if (splits % 1024 == 0) {
      // Refresh the running sum so cancellation cannot drift it.
      auto copy = work;
      total_err = 0.0;
      for (; !copy.empty(); copy.pop()) total_err += copy.top().error;
      for (const Panel& q : done) total_err += q.error;
    }
  }
  for (; !work.empty(); work.pop()) done.push_back(work.top());
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const Panel& p : done) {
    res.value += p.value;
    res.error += p.error;
  }
  res.panels = done.size();
  if (res.error > tol)
    throw ConvergenceError("integrate: error estimate " + std::to_string(res.error) + " above tol " +
                           std::to_string(tol) + " at machine resolution");
  return res;
}

QuadResult integrate(const ScalarFn& f, double a, double b, double tol) {
  QuadOptions opt;
  opt.half_period = f.half_period();
  return integrate([&](double r) { return f(r); }, a, b, tol, opt);
}

}  // namespace psidensity

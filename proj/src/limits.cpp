#include "psidensity/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psidensity/error.hpp"
#include "psidensity/growth.hpp"
#include "psidensity/quadrature.hpp"

namespace psidensity {

const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::usual_limit: return "usual-limit";
    case VerdictKind::psi_density_limit: return "psi-density-limit";
    case VerdictKind::no_limit_detected: return "no-limit-detected";
    case VerdictKind::divergence_witness: return "divergence-witness";
  }
  return "?";
}

std::vector<double> log_spaced(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > a) || n < 2) throw PreconditionError("log_spaced needs 0 < a < b and n >= 2");
  std::vector<double> out(n);
  const double la = std::log(a), lb = std::log(b);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

namespace {

QuadOptions options_for(const ScalarFn& f) {
  QuadOptions opt;
  opt.half_period = f.half_period();
  return opt;
}

}  // namespace

std::vector<TrajectoryPoint> cesaro_psi_average(const ScalarFn& f, const PsiScale& psi, double a,
                                                const std::vector<double>& r_values, double tol) {
  if (r_values.empty()) return {};
  if (!(tol > 0.0)) throw PreconditionError("tol must be positive");
  if (!(r_values.front() > a) || !std::is_sorted(r_values.begin(), r_values.end()))
    throw PreconditionError("r_values must increase and exceed the lower limit");
  if (!(a >= psi.r0())) throw DomainError("lower limit below the scale's r0");
  const QuadOptions opt = options_for(f);
  auto integrand = [&](double t) { return psi.forward(t) * f(t); };
  // Splitting tol over the segments, scaled by the smallest psi(r), bounds
  // the error of every average by tol.
  const double seg_tol =
      tol * std::max(psi.forward(r_values.front()), 1e-12) / static_cast<double>(r_values.size());
  std::vector<TrajectoryPoint> out;
  double acc = 0.0;
  double from = a;
  for (double r : r_values) {
    if (r > from) acc += integrate(integrand, from, r, seg_tol, opt).value;
    out.push_back({r, acc / psi.forward(r)});
    from = r;
  }
  return out;
}

LimitVerdict density_limit_certify(const ScalarFn& f, double l, const PsiScale& psi,
                                   const std::vector<double>& eps_grid, double x_cutoff, double threshold,
                                   std::size_t tail_window, const GridSpec& grid) {
  if (eps_grid.empty()) throw PreconditionError("eps_grid is empty");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0)) throw PreconditionError("eps_grid entries must be positive");
    if (i > 0 && !(eps_grid[i] < eps_grid[i - 1])) throw PreconditionError("eps_grid must decrease");
  }
  const Domain d = Domain::of(psi);
  LimitVerdict v;
  v.psi = psi.name();
  v.eps_grid = eps_grid;
  v.value = l;
  bool all_small = true;
  bool sparse = false;
  for (double eps : eps_grid) {
    std::function<bool(double)> outside;
    if (l == kInf) outside = [&](double x) { return f.at_log(x) <= 1.0 / eps; };
    else if (l == -kInf) outside = [&](double x) { return f.at_log(x) >= -1.0 / eps; };
    else outside = [&](double x) { return std::abs(f.at_log(x) - l) >= eps; };
    const IntervalSet s = extract_set(outside, d, x_cutoff, grid, f.features());
    const DensityEstimate est = estimate_density(s, psi, x_cutoff, tail_window);
    double ud = est.upper;
    if (est.low_confidence) {
      // Too few extrema for a trailing window: take the candidates where psi
      // is at least half its cutoff value, which always include the cutoff.
      const double lp_half = psi.log_psi_at(x_cutoff) - std::log(2.0);
      ud = 0.0;
      for (const RatioPoint& p : density_trajectory(s, psi, x_cutoff))
        if (psi.log_psi_at(p.x) >= lp_half) ud = std::max(ud, p.ratio);
      sparse = true;
    }
    v.densities.push_back(ud);
    all_small = all_small && ud < threshold;
  }
  v.kind = all_small ? VerdictKind::psi_density_limit : VerdictKind::no_limit_detected;
  if (!all_small) v.note = "some S_eps has upper density >= " + std::to_string(threshold);
  else if (sparse) v.note = "sparse S_eps measured on the half of the horizon where psi >= psi(cutoff)/2";
  return v;
}

IntegrabilityScreen screen_abs_integral(const ScalarFn& f, double r1, double r_cutoff) {
  if (!(r1 > 0.0 && r_cutoff > r1)) throw PreconditionError("need 0 < r1 < cutoff");
  IntegrabilityScreen s;
  const QuadOptions opt = options_for(f);
  auto absf = [&](double t) { return std::abs(f(t)); };
  double from = r1;
  while (from < r_cutoff) {
    const double to = std::min(from * 10.0, r_cutoff);
    const double inc = integrate(absf, from, to, 1e-10, opt).value;
    s.integral += inc;
    s.increments.push_back({to, inc});
    from = to;
  }
  // Use the last two full decades.
  std::vector<TrajectoryPoint> full;
  double prev_end = r1;
  for (const auto& p : s.increments) {
    if (p.r >= prev_end * 10.0 * (1.0 - 1e-12)) full.push_back(p);
    prev_end = p.r;
  }
  if (full.size() < 2) {
    s.converged = false;
    return s;
  }
  const auto& a = full[full.size() - 2];
  const auto& b = full.back();
  if (b.value == 0.0) {
    s.decay_exponent = kInf;
  } else if (a.value == 0.0) {
    s.decay_exponent = -kInf;
  } else {
    s.decay_exponent = -std::log(b.value / a.value) / std::log(std::log(b.r) / std::log(a.r));
  }
  s.converged = s.decay_exponent >= 1.5;
  return s;
}

LimitVerdict usual_limit_certify(const ScalarFn& f, const PsiScale& psi, double r1, double r_cutoff) {
  if (!psi.unbounded_domain()) throw PreconditionError("the usual-limit upgrade needs R = inf");
  if (!(r1 > psi.r0() && r_cutoff > r1)) throw PreconditionError("need r0 < r1 < cutoff");
  LimitVerdict v;
  v.psi = psi.name();
  const IntegrabilityScreen screen = screen_abs_integral(f, r1, r_cutoff);
  if (!screen.converged) {
    v.kind = VerdictKind::no_limit_detected;
    v.note = "inapplicable: int |f| not converged (decay exponent " + std::to_string(screen.decay_exponent) + ")";
    return v;
  }
  const std::vector<double> rs = log_spaced(r1, r_cutoff, 1001);
  bool cond_i = true, cond_ii = true;
  double prev_i = 0.0, prev_ii = 0.0;
  for (std::size_t i = 1; i < rs.size(); ++i) {
    const double r = rs[i];
    const double p = psi.forward(r), dp = psi.derivative(r), af = std::abs(f(r));
    const double vi = p * p * af / dp;
    const double vii = af / dp;
    if (i > 1) {
      cond_i = cond_i && vi >= prev_i;
      cond_ii = cond_ii && vii <= prev_ii;
    }
    prev_i = vi;
    prev_ii = vii;
  }
  v.condition_i = cond_i;
  v.condition_ii = cond_ii;
  ScalarFn q(
      "psi f/psi'", [f, psi](double r) { return psi.forward(r) * f(r) / psi.derivative(r); }, {});
  if (!cond_i && !cond_ii) {
    LimitVerdict fb = density_limit_certify(q, 0.0, psi, kDefaultEpsGrid, std::log(r_cutoff));
    fb.condition_i = false;
    fb.condition_ii = false;
    fb.note = "neither monotonicity screen holds; density limit of psi f/psi' checked instead";
    return fb;
  }
  const QuadOptions opt = options_for(f);
  bool tail_ok = true;
  for (double r : log_spaced(r1, r_cutoff, 50)) {
    const double qr = std::abs(q(r));
    v.evidence.push_back({r, qr});
    if (!cond_ii) continue;
    const double s = psi.inverse(0.5 * psi.forward(r));
    if (!(s > psi.r0() && s < r)) continue;
    const double tail =
        integrate([&](double t) { return std::abs(f(t)); }, s, r, std::max(1e-14, 1e-8 * qr), opt).value;
    tail_ok = tail_ok && qr <= 2.0 * tail * (1.0 + 1e-9);
  }
  if (cond_ii) v.tail_bound_holds = tail_ok;
  v.kind = VerdictKind::usual_limit;
  v.value = 0.0;
  v.note = "psi f/psi' -> 0; final |psi f/psi'| = " + std::to_string(v.evidence.back().value);
  return v;
}

BoundReport dichotomy_check(const ScalarFn& f, double l, const PsiScale& psi, double x_cutoff, double tol,
                            std::size_t grid_points) {
  const double x0 = psi.x0();
  if (!(x_cutoff > x0) || !std::isfinite(x_cutoff)) throw DomainError("cutoff outside the domain");
  std::vector<double> xs(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i)
    xs[i] = x0 + (x_cutoff - x0) * static_cast<double>(i + 1) / static_cast<double>(grid_points);
  for (double e : f.features())
    if (e > x0 && e < x_cutoff) xs.push_back(e);
  std::sort(xs.begin(), xs.end());
  std::vector<double> fv(xs.size());
  bool positive = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fv[i] = f.at_log(xs[i]);
    positive = positive && fv[i] > 0.0;
  }
  // Largest relative drop of f psi along the grid.
  double drop = 0.0;
  double prev = positive ? -kInf : std::nan("");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = positive ? std::log(fv[i]) + psi.log_psi_at(xs[i]) : fv[i] * psi.psi_at(xs[i]);
    if (i > 0) {
      const double d = positive ? prev - v : (prev - v) / std::max(1.0, std::abs(prev));
      drop = std::max(drop, d);
    }
    prev = v;
  }
  const bool monotone = drop <= 1e-12;
  if (!monotone)
    return make_report("dichotomy: f psi is not non-decreasing", drop, Relation::ge, 0.0, 0.0,
                       "second branch: f psi decreases somewhere on the grid");
  double worst = 0.0;
  const std::size_t trailing = std::max<std::size_t>(10, xs.size() / 100);
  for (std::size_t i = xs.size() - std::min(trailing, xs.size()); i < xs.size(); ++i)
    worst = std::max(worst, std::abs(fv[i] - l));
  return make_report("dichotomy: f psi non-decreasing, so f -> l", worst, Relation::le, tol, 0.0,
                     "first branch: |f - l| at the trailing grid points");
}

LimitVerdict divergence_witness(const ScalarFn& f, const PsiScale& psi, double a,
                                const std::vector<double>& r_values, double tol) {
  if (r_values.size() < 5) throw PreconditionError("divergence_witness needs at least 5 r values");
  LimitVerdict v;
  v.psi = psi.name();
  v.evidence = cesaro_psi_average(f, psi, a, r_values, tol * 1e-3);
  const auto& t = v.evidence;
  const std::size_t n = t.size();
  double lo = kInf, hi = -kInf, sum = 0.0;
  for (std::size_t i = n - 5; i < n; ++i) {
    lo = std::min(lo, t[i].value);
    hi = std::max(hi, t[i].value);
    sum += t[i].value;
  }
  const double mean = sum / 5.0;
  const double last = t.back().value;
  if (hi - lo < tol * std::max(1.0, std::abs(mean))) {
    if (std::abs(last) > 10.0 * tol) {
      v.kind = VerdictKind::divergence_witness;
      v.value = last;
      v.note = "averages stabilized away from 0; the integral diverges";
    } else {
      v.kind = VerdictKind::usual_limit;
      v.value = 0.0;
      v.note = "averages tend to 0; no witness";
    }
    return v;
  }
  const double mid_log = 0.5 * (std::log(t.front().r) + std::log(t.back().r));
  std::size_t mid = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(std::log(t[i].r) - mid_log) < std::abs(std::log(t[mid].r) - mid_log)) mid = i;
  bool monotone = true;
  for (std::size_t i = n - 4; i < n; ++i) monotone = monotone && std::abs(t[i].value) >= std::abs(t[i - 1].value);
  if (monotone && std::abs(last) >= 1.5 * std::abs(t[mid].value) && std::abs(last) > 10.0 * tol) {
    v.kind = VerdictKind::divergence_witness;
    v.value = last > 0.0 ? kInf : -kInf;
    v.note = "averages escape to infinity; the integral diverges";
    return v;
  }
  v.kind = VerdictKind::no_limit_detected;
  v.note = "averages neither stabilized nor escaping; inconclusive";
  return v;
}

LimitVerdict window_limit_check(const ScalarFn& f, double x_begin, double x_cutoff, double tol,
                                std::size_t tail_window, const GridSpec& grid) {
  if (tail_window < 4) throw PreconditionError("tail_window must be at least 4");
  const auto ext =
      local_extrema([&](double x) { return f.at_log(x); }, x_begin, x_cutoff, grid, f.features());
  LimitVerdict v;
  const std::size_t first = ext.size() > tail_window ? ext.size() - tail_window : 0;
  double lo = kInf, hi = -kInf;
  for (std::size_t i = first; i < ext.size(); ++i) {
    lo = std::min(lo, ext[i].value);
    hi = std::max(hi, ext[i].value);
    v.evidence.push_back({std::exp(ext[i].x), ext[i].value});
  }
  if (hi - lo <= tol) {
    v.kind = VerdictKind::usual_limit;
    v.value = 0.5 * (hi + lo);
    v.note = "trailing extrema within tol";
  } else {
    v.kind = VerdictKind::no_limit_detected;
    v.note = "trailing extrema spread " + std::to_string(hi - lo);
  }
  return v;
}

}  // namespace psidensity

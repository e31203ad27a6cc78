#include "psidensity/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psidensity/error.hpp"

namespace psidensity {

const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::ge: return ">=";
    case Relation::le: return "<=";
    case Relation::eq: return "==";
  }
  return "?";
}

BoundReport make_report(std::string id, double measured, Relation rel, double bound, double slack,
                        std::string note) {
  BoundReport r;
  r.id = std::move(id);
  r.measured = measured;
  r.bound = bound;
  r.relation = rel;
  r.slack = slack;
  r.note = std::move(note);
  switch (rel) {
    case Relation::ge: r.pass = measured >= bound - slack; break;
    case Relation::le: r.pass = measured <= bound + slack; break;
    case Relation::eq: r.pass = std::abs(measured - bound) <= slack; break;
  }
  if (std::isnan(measured)) r.pass = false;
  return r;
}

BoundReport inapplicable(std::string id, std::string why) {
  BoundReport r;
  r.id = std::move(id);
  r.measured = std::numeric_limits<double>::quiet_NaN();
  r.bound = std::numeric_limits<double>::quiet_NaN();
  r.applicable = false;
  r.pass = false;
  r.note = "inapplicable: " + std::move(why);
  return r;
}

namespace {

// Running log of a sum of positive terms given by their logs.
struct LogSum {
  double peak = -kInf;
  double scaled = 0.0;

  void add(double t) {
    if (t == -kInf || std::isnan(t)) return;
    if (t > peak) {
      scaled = scaled * std::exp(peak - t) + 1.0;
      peak = t;
    } else {
      scaled += std::exp(t - peak);
    }
  }
  double log() const { return scaled > 0.0 ? peak + std::log(scaled) : -kInf; }
};

double ratio_at(const LogSum& m, const PsiScale& s, double x) {
  const double lm = m.log();
  if (lm == -kInf) return 0.0;
  return std::clamp(std::exp(lm - s.log_psi_at(x)), 0.0, 1.0);
}

}  // namespace

std::vector<RatioPoint> density_trajectory(const IntervalSet& e, const PsiScale& s, double x_cutoff) {
  const Domain& d = e.domain();
  if (!(x_cutoff > d.x0) || x_cutoff > d.xR) throw DomainError("cutoff outside the domain");
  if (d.xR == x_cutoff && d.xR == kInf) throw DomainError("cutoff must be finite");
  const IntervalSet m = e.materialize(x_cutoff);
  if (m.horizon() < x_cutoff) throw PreconditionError("set is not known up to the cutoff");
  std::vector<RatioPoint> out;
  LogSum measure;
  double last_b = d.x0;
  for (const Interval& iv : m.intervals()) {
    if (iv.a > d.x0) out.push_back({iv.a, ratio_at(measure, s, iv.a), false});
    measure.add(s.log_psi_diff(iv.a, iv.b));
    out.push_back({iv.b, ratio_at(measure, s, iv.b), true});
    last_b = iv.b;
  }
  if (out.empty() || last_b < x_cutoff) out.push_back({x_cutoff, ratio_at(measure, s, x_cutoff), false});
  return out;
}

DensityEstimate estimate_density(const IntervalSet& e, const PsiScale& s, double x_cutoff,
                                 std::size_t tail_window) {
  if (tail_window < 4) throw PreconditionError("tail_window must be at least 4");
  const auto traj = density_trajectory(e, s, x_cutoff);
  DensityEstimate est;
  est.cutoff = x_cutoff;
  est.eval_points = traj.size();
  est.tail_window = tail_window;
  est.low_confidence = traj.size() < tail_window;
  const std::size_t first = traj.size() > tail_window ? traj.size() - tail_window : 0;
  est.upper = 0.0;
  est.lower = 1.0;
  for (std::size_t i = first; i < traj.size(); ++i) {
    est.upper = std::max(est.upper, traj[i].ratio);
    est.lower = std::min(est.lower, traj[i].ratio);
  }
  return est;
}

std::vector<BoundReport> check_chain(const IntervalSet& e, const PsiScale& s, double x_cutoff,
                                     std::size_t tail_window) {
  const PsiScale lift = s.exp_lift();
  const DensityEstimate p = estimate_density(e, s, x_cutoff, tail_window);
  const DensityEstimate q = estimate_density(e, lift, x_cutoff, tail_window);
  constexpr double slack = 1e-2;
  const std::string ps = s.name();
  const std::string qs = lift.name();
  std::vector<BoundReport> out;
  out.push_back(make_report("chain: lower " + qs + " <= lower " + ps, q.lower, Relation::le, p.lower, slack));
  out.push_back(make_report("chain: lower " + ps + " <= upper " + ps, p.lower, Relation::le, p.upper, slack));
  out.push_back(make_report("chain: upper " + ps + " <= upper " + qs, p.upper, Relation::le, q.upper, slack));
  BoundReport range = make_report("chain: 0 <= lower " + qs + ", upper " + qs + " <= 1", q.upper,
                                  Relation::le, 1.0, slack);
  range.pass = range.pass && q.lower >= -slack;
  out.push_back(range);
  return out;
}

BoundReport check_finite_measure_zero_density(const IntervalSet& e, const PsiScale& s,
                                              const std::vector<double>& x_cutoffs) {
  if (x_cutoffs.size() < 2) throw PreconditionError("need at least two cutoffs");
  if (!std::is_sorted(x_cutoffs.begin(), x_cutoffs.end()))
    throw PreconditionError("cutoffs must increase");
  const PsiScale lift = s.exp_lift();
  std::vector<double> measures, ratios;
  for (double c : x_cutoffs) {
    measures.push_back(psi_measure(e, s, c));
    const double lm = log_psi_measure(e, lift, c);
    ratios.push_back(lm == -kInf ? 0.0 : std::exp(lm - lift.log_psi_at(c)));
  }
  const double m1 = measures[measures.size() - 2];
  const double m2 = measures.back();
  if (!(std::abs(m2 - m1) <= 1e-6 * std::max(1.0, std::abs(m2))))
    throw PreconditionError("psi-measure not converged: " + std::to_string(m1) + " then " +
                            std::to_string(m2) + " at the last two cutoffs");
  bool decreasing = true;
  for (std::size_t i = 1; i < ratios.size(); ++i) decreasing = decreasing && ratios[i] <= ratios[i - 1];
  BoundReport r = make_report("finite measure => upper " + lift.name() + " density 0", ratios.back(),
                              Relation::le, 1e-3, 0.0);
  if (!decreasing) {
    r.pass = false;
    r.note = "ratio not decreasing along the cutoffs";
  }
  return r;
}

std::vector<double> make_grid(double x_begin, double x_end, const GridSpec& g,
                              const std::vector<double>& features) {
  if (g.per_decade < 64) throw PreconditionError("grid needs at least 64 points per decade");
  const double h = std::numbers::ln10 / g.per_decade;
  const double growth = std::pow(10.0, 1.0 / g.per_decade);
  std::vector<double> xs;
  double x = x_begin;
  std::size_t k = 0;
  while (true) {
    if (k < g.max_uniform_points || x <= 0.0) {
      ++k;
      x = x_begin + static_cast<double>(k) * h;
    } else {
      x = std::max(x * growth, x + h);
    }
    if (!(x < x_end)) break;
    xs.push_back(x);
  }
  xs.push_back(x_end);
  std::size_t n_grid = xs.size();
  for (double f : features)
    if (f > x_begin && f < x_end) xs.push_back(f);
  if (xs.size() > n_grid) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  }
  return xs;
}

IntervalSet extract_set(const std::function<bool(double)>& pred, Domain d, double x_cutoff,
                        const GridSpec& g, const std::vector<double>& features) {
  const double hi = std::min(x_cutoff, d.xR);
  if (!(hi > d.x0) || !std::isfinite(hi)) throw DomainError("extract_set: cutoff outside the domain");
  auto state = [&](double x) {
    try {
      return pred(x);
    } catch (const DomainError&) {
      return false;
    }
  };
  const auto xs = make_grid(d.x0, hi, g, features);
  std::vector<Interval> out;
  double prev_x = d.x0;
  bool prev = state(d.x0);
  double open_at = prev ? d.x0 : 0.0;
  for (double x : xs) {
    const bool cur = state(x);
    if (cur != prev) {
      double lo = prev_x, up = x;
      while (up - lo > g.refine_tol) {
        const double mid = lo + 0.5 * (up - lo);
        if (!(mid > lo && mid < up)) break;
        if (state(mid) == prev) lo = mid;
        else up = mid;
      }
      if (cur) open_at = up;
      else out.push_back({open_at, up});
    }
    prev = cur;
    prev_x = x;
  }
  if (prev) out.push_back({open_at, hi});
  return IntervalSet(d, std::move(out)).materialize(hi);
}

IntervalSet extract_positive(const ScalarFn& g, Domain d, double x_cutoff, const GridSpec& grid) {
  return extract_set([&](double x) { return g.at_log(x) > 0.0; }, d, x_cutoff, grid, g.features());
}

namespace {

bool non_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1] - 1e-12 * std::abs(v[i - 1])) return false;
  return true;
}

}  // namespace

ExceptionalResult avoid_exceptional(const ScalarFn& f, const ScalarFn& g, const IntervalSet& e,
                                    const PsiScale& s, double alpha, double x_cutoff,
                                    std::size_t grid_points) {
  const Domain& d = e.domain();
  if (!(x_cutoff > d.x0) || !std::isfinite(x_cutoff)) throw DomainError("cutoff outside the domain");
  const DensityEstimate ud = estimate_density(e, s, x_cutoff);
  if (!(ud.upper < 1.0)) throw PreconditionError("exceptional set has upper density 1");
  const double alpha_min = 1.0 / (1.0 - ud.upper);
  if (!(alpha > alpha_min))
    throw PreconditionError("alpha = " + std::to_string(alpha) + " must exceed 1/(1 - upper density) = " +
                            std::to_string(alpha_min));
  // Past the cutoff so membership at the last grid point is known.
  const IntervalSet m = e.materialize(std::min(d.xR, x_cutoff + 1.0));
  std::vector<double> xs(grid_points);
  std::vector<double> fv(grid_points), gv(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    xs[i] = d.x0 + (x_cutoff - d.x0) * static_cast<double>(i + 1) / static_cast<double>(grid_points);
    fv[i] = f.at_log(xs[i]);
    gv[i] = g.at_log(xs[i]);
  }
  if (!non_decreasing(fv)) throw PreconditionError("f is not non-decreasing on the grid");
  if (!non_decreasing(gv)) throw PreconditionError("g is not non-decreasing on the grid");
  for (std::size_t i = 0; i < grid_points; ++i) {
    if (!m.contains(xs[i]) && fv[i] > gv[i])
      throw PreconditionError("f > g outside the exceptional set at r = e^" + std::to_string(xs[i]));
  }
  const double log_alpha = std::log(alpha);
  double r_prime = d.x0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double sx = s.inverse_log(log_alpha + s.log_psi_at(xs[i]));
    if (fv[i] > g.at_log(sx)) r_prime = xs[i];
  }
  ExceptionalResult res;
  res.r_prime = r_prime;
  res.report = make_report("exceptional set avoided beyond r' (log r')", r_prime, Relation::le, x_cutoff, 0.0);
  res.report.pass = r_prime < x_cutoff;
  return res;
}

}  // namespace psidensity

#include "psidensity/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "psidensity/error.hpp"

namespace psidensity {

namespace {

std::string num(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string join(const std::string& id, const std::string& text) { return id + ": " + text; }

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// Spot-check points in (x_begin, x_cutoff]: geometric in x when the range
// spans more than a decade of x, uniform otherwise.
std::vector<double> spot_points(double x_begin, double x_cutoff, std::size_t n = 1000) {
  std::vector<double> xs(n);
  const bool geometric = x_begin > 0.0 && x_cutoff / x_begin > 10.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1) / static_cast<double>(n);
    xs[i] = geometric ? x_begin * std::pow(x_cutoff / x_begin, t) : x_begin + (x_cutoff - x_begin) * t;
  }
  xs.back() = x_cutoff;
  return xs;
}

double density_upper(const IntervalSet& e, const PsiScale& s, double c, std::size_t w) {
  return estimate_density(e, s, c, w).upper;
}

}  // namespace

ScalarFn order_ratio(const GrowthFunction& T) {
  ScalarFn phi("log(" + T.name() + ")/log(r)", {}, [T](double x) { return T.log_value(x) / x; });
  phi.with_features(T.features());
  return phi;
}

Limits estimate_limits(const ScalarFn& phi, double x_begin, double x_cutoff, std::size_t tail_window,
                       const GridSpec& grid) {
  if (tail_window < 4) throw PreconditionError("tail_window must be at least 4");
  const auto ext = local_extrema([&](double x) { return phi.at_log(x); }, x_begin, x_cutoff, grid,
                                 phi.features());
  Limits lim{-kInf, kInf};
  const std::size_t first = ext.size() > tail_window ? ext.size() - tail_window : 0;
  for (std::size_t i = first; i < ext.size(); ++i) {
    lim.upper = std::max(lim.upper, ext[i].value);
    lim.lower = std::min(lim.lower, ext[i].value);
  }
  return lim;
}

bool phi_psi_nondecreasing(const ScalarFn& phi, const PsiScale& psi, double x_begin, double x_cutoff) {
  const auto xs = spot_points(x_begin, x_cutoff);
  std::vector<double> phis(xs.size());
  bool positive = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    phis[i] = phi.at_log(xs[i]);
    if (std::isnan(phis[i])) return false;
    positive = positive && phis[i] > 0.0;
  }
  double prev = -kInf;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    // Compare logs when possible so psi(r) itself never has to be formed.
    const double v = positive ? std::log(phis[i]) + psi.log_psi_at(xs[i]) : phis[i] * psi.psi_at(xs[i]);
    if (std::isnan(v)) return false;
    if (v < prev - 1e-12 * std::max(1.0, std::abs(prev))) return false;
    prev = v;
  }
  return true;
}

std::vector<BoundReport> verify_limsup_sets(const LimitSetSpec& spec, double x_cutoff, std::size_t tail_window,
                                            const GridSpec& grid) {
  if (!(spec.eps > 0.0)) throw PreconditionError("eps must be positive");
  const PsiScale& psi = spec.psi;
  const Domain d = Domain::of(psi);
  const bool estimated = std::isnan(spec.K) || std::isnan(spec.k);
  double K = spec.K, k = spec.k;
  if (estimated) {
    const Limits lim = estimate_limits(spec.phi, d.x0, x_cutoff, tail_window, grid);
    if (std::isnan(K)) K = lim.upper;
    if (std::isnan(k)) k = lim.lower;
  }
  const double eps = spec.eps;
  const double slack = kBoundSlack + (estimated ? kEstimateSlack : 0.0);
  const std::string note = estimated ? "K, k estimated; slack widened" : "";
  const std::string params = " [K=" + num(K) + ", k=" + num(k) + ", eps=" + num(eps) + "]";
  if (!(k >= 0.0 && k < K)) return {inapplicable("thm3.1", "needs 0 <= k < K" + params)};
  if (!phi_psi_nondecreasing(spec.phi, psi, d.x0, x_cutoff))
    return {inapplicable("thm3.1", "phi*psi is not non-decreasing on the spot-check grid")};

  const PsiScale lift = psi.exp_lift();
  const std::string ps = psi.name(), qs = lift.name();
  const auto& phi = spec.phi;
  const auto& feats = phi.features();
  std::vector<BoundReport> out;
  const std::string onesided = "one-sided certification at a finite horizon";

  if (K == kInf) {
    const double M = spec.M;
    if (!(M > 0.0)) throw PreconditionError("M must be positive");
    const IntervalSet H = extract_set([&](double x) { return phi.at_log(x) > M; }, d, x_cutoff, grid, feats);
    const DensityEstimate h = estimate_density(H, psi, x_cutoff, tail_window);
    const std::string tag = " [k=" + num(k) + ", M=" + num(M) + "]";
    out.push_back(make_report(join("thm3.1", "upper " + ps + " density of H_M == 1" + tag), h.upper,
                              Relation::ge, 1.0, slack, note));
    out.push_back(make_report(join("thm3.1", "lower " + ps + " density of H_M <= k/M" + tag), h.lower,
                              Relation::le, k / M, slack, note));
    return out;
  }

  const IntervalSet F =
      extract_set([&](double x) { return std::abs(phi.at_log(x) - K) < eps; }, d, x_cutoff, grid, feats);
  const IntervalSet G =
      extract_set([&](double x) { return std::abs(phi.at_log(x) - k) < eps; }, d, x_cutoff, grid, feats);
  const DensityEstimate f = estimate_density(F, psi, x_cutoff, tail_window);
  const DensityEstimate g = estimate_density(G, psi, x_cutoff, tail_window);
  const DensityEstimate fl = estimate_density(F, lift, x_cutoff, tail_window);
  const DensityEstimate gl = estimate_density(G, lift, x_cutoff, tail_window);

  auto rep = [&](const std::string& id, const std::string& what, double m, Relation rel, double b,
                 const std::string& n) {
    out.push_back(make_report(join(id, what + params), m, rel, b, slack, n));
  };
  rep("thm3.1", "upper " + ps + " density of F_eps >= eps/K", f.upper, Relation::ge, eps / K, note);
  rep("thm3.1", "upper " + ps + " density of G_eps >= eps/(k+eps)", g.upper, Relation::ge, eps / (k + eps), note);
  rep("thm3.1", "lower " + ps + " density of F_eps <= k/(k+eps)", f.lower, Relation::le, k / (k + eps), note);
  rep("thm3.1", "lower " + ps + " density of G_eps <= (K-eps)/K", g.lower, Relation::le, (K - eps) / K, note);
  rep("thm3.1", "upper " + qs + " density of F_eps == 1", fl.upper, Relation::ge, 1.0, onesided);
  rep("thm3.1", "upper " + qs + " density of G_eps == 1", gl.upper, Relation::ge, 1.0, onesided);
  rep("thm3.1", "lower " + qs + " density of F_eps == 0", fl.lower, Relation::le, 0.0, onesided);
  rep("thm3.1", "lower " + qs + " density of G_eps == 0", gl.lower, Relation::le, 0.0, onesided);
  if (eps < (K - k) / 2.0) {
    rep("prop3.2", "upper " + ps + " density of F_eps >= 1-(k+eps)/K", f.upper, Relation::ge, 1.0 - (k + eps) / K,
        note);
    rep("prop3.2", "upper " + ps + " density of G_eps >= 1-k/(K-eps)", g.upper, Relation::ge, 1.0 - k / (K - eps),
        note);
    rep("prop3.2", "lower " + ps + " density of F_eps <= k/(K-eps)", f.lower, Relation::le, k / (K - eps), note);
    rep("prop3.2", "lower " + ps + " density of G_eps <= (k+eps)/K", g.lower, Relation::le, (k + eps) / K, note);
  }
  return out;
}

std::vector<BoundReport> verify_comparison(const ScalarFn& phi1, const ScalarFn& phi2, const PsiScale& psi,
                                           LimitMode mode, double x_cutoff, double k1, double k2,
                                           std::size_t tail_window, const GridSpec& grid) {
  const Domain d = Domain::of(psi);
  const bool estimated = std::isnan(k1) || std::isnan(k2);
  auto pick = [&](const ScalarFn& phi) {
    const Limits lim = estimate_limits(phi, d.x0, x_cutoff, tail_window, grid);
    return mode == LimitMode::limsup ? lim.upper : lim.lower;
  };
  if (std::isnan(k1)) k1 = pick(phi1);
  if (std::isnan(k2)) k2 = pick(phi2);
  const std::string params = " [k1=" + num(k1) + ", k2=" + num(k2) + "]";
  if (!(k1 < k2)) return {inapplicable("cor3.3", "needs k1 < k2" + params)};
  if (!phi_psi_nondecreasing(phi2, psi, d.x0, x_cutoff))
    return {inapplicable("cor3.3", "phi2*psi is not non-decreasing on the spot-check grid")};
  const double slack = kBoundSlack + (estimated ? kEstimateSlack : 0.0);
  const std::string note = estimated ? "k1, k2 estimated; slack widened" : "";
  const IntervalSet G = extract_set([&](double x) { return phi1.at_log(x) < phi2.at_log(x); }, d, x_cutoff,
                                    grid, merged(phi1.features(), phi2.features()));
  const PsiScale lift = psi.exp_lift();
  const double bound = k2 == kInf ? 1.0 : 1.0 - k1 / k2;
  std::vector<BoundReport> out;
  out.push_back(make_report(join("cor3.3", "upper " + psi.name() + " density of G >= 1-k1/k2" + params),
                            density_upper(G, psi, x_cutoff, tail_window), Relation::ge, bound, slack, note));
  out.push_back(make_report(join("cor3.3", "upper " + lift.name() + " density of G == 1" + params),
                            density_upper(G, lift, x_cutoff, tail_window), Relation::ge, 1.0, kBoundSlack,
                            "one-sided certification at a finite horizon"));
  return out;
}

namespace {

struct OrderInfo {
  double lower = 0.0;
  double upper = 0.0;
  bool estimated = false;
};

class CorollaryRun {
 public:
  CorollaryRun(std::string id, const Params& params, double x_cutoff, std::size_t window, const GridSpec& grid)
      : id_(std::move(id)),
        params_(params),
        cutoff_(x_cutoff),
        window_(window),
        grid_(grid),
        log_(PsiScale::make(ScaleKind::log, 1.0, kInf)),
        lin_(PsiScale::make(ScaleKind::linear, 1.0, kInf)) {}

  double param(const std::string& name, double fallback) const {
    auto it = params_.find(name);
    return it == params_.end() ? fallback : it->second;
  }
  bool has(const std::string& name) const { return params_.count(name) != 0; }

  OrderInfo orders(const GrowthFunction& T) const {
    if (const auto& z = T.zigzag()) return {z->ell, z->L, false};
    const OrderEstimate e = estimate_orders(T, cutoff_, window_, 1.0, grid_);
    return {e.lower_order, e.upper_order, true};
  }

  double type(const GrowthFunction& T, double rho) const { return estimate_type(T, rho, cutoff_, window_, 1.0, grid_); }

  IntervalSet set(const std::function<bool(double)>& pred, const std::vector<double>& features) const {
    return extract_set(pred, Domain{0.0, kInf}, cutoff_, grid_, features);
  }

  DensityEstimate density(const IntervalSet& e, bool linear) const {
    return estimate_density(e, linear ? lin_ : log_, cutoff_, window_);
  }

  void widen() {
    slack_ = kBoundSlack + kEstimateSlack;
    note_ = "order or type estimated; slack widened";
  }

  void report(const std::string& text, double measured, Relation rel, double bound) {
    out_.push_back(make_report(join(id_, text + tag_), measured, rel, bound, slack_, note_));
  }
  void report_id(const std::string& id, const std::string& text, double measured, Relation rel, double bound,
                 double slack) {
    out_.push_back(make_report(join(id, text + tag_), measured, rel, bound, slack, note_));
  }

  std::vector<BoundReport> fail(const std::string& why) const { return {inapplicable(id_, why + tag_)}; }

  void tag(const std::string& t) { tag_ = " [" + t + "]"; }
  std::vector<BoundReport> take() { return std::move(out_); }
  const std::string& id() const { return id_; }
  double cutoff() const { return cutoff_; }

 private:
  std::string id_;
  const Params& params_;
  double cutoff_;
  std::size_t window_;
  GridSpec grid_;
  PsiScale log_;
  PsiScale lin_;
  double slack_ = kBoundSlack;
  std::string note_;
  std::string tag_;
  std::vector<BoundReport> out_;
};

// The order and type premises: supplied values must agree with the estimates.
bool agrees(double supplied, double estimate) {
  return std::abs(supplied - estimate) <= 2e-2 * std::max(1.0, std::abs(supplied));
}

std::vector<BoundReport> corollary_ab(CorollaryRun& run, const GrowthFunction& T) {
  const OrderInfo o = run.orders(T);
  if (o.estimated) run.widen();
  const double ell = o.lower, L = o.upper;
  const double a = run.param("a", 0.5 * (ell + L));
  const double b = run.param("b", a);
  run.tag("l=" + num(ell) + ", L=" + num(L) + ", a=" + num(a) + ", b=" + num(b));
  if (!(ell > 0.0 && L < kInf)) return run.fail("needs 0 < lower order and finite order");
  if (!(ell < a && a <= b && b < L)) return run.fail("needs l < a <= b < L");
  const IntervalSet H = run.set([&](double x) { return T.log_value(x) <= a * x; }, T.features());
  const IntervalSet I = run.set([&](double x) { return T.log_value(x) > b * x; }, T.features());
  if (run.id() == "thm1.1") {
    const DensityEstimate h = run.density(H, true), i = run.density(I, true);
    run.report("upper linear density of H == 1", h.upper, Relation::ge, 1.0);
    run.report("lower linear density of H == 0", h.lower, Relation::le, 0.0);
    run.report("upper linear density of I == 1", i.upper, Relation::ge, 1.0);
    run.report("lower linear density of I == 0", i.lower, Relation::le, 0.0);
    return run.take();
  }
  const DensityEstimate h = run.density(H, false), i = run.density(I, false);
  run.report("upper log density of H >= max{(a-l)/a, (L-a)/(L+l-a)}", h.upper, Relation::ge,
             std::max((a - ell) / a, (L - a) / (L + ell - a)));
  run.report("lower log density of I <= min{l/b, l/(L+l-b)}", i.lower, Relation::le,
             std::min(ell / b, ell / (L + ell - b)));
  run.report("lower log density of H <= min{a/L, (L+l-a)/L}", h.lower, Relation::le,
             std::min(a / L, (L + ell - a) / L));
  run.report("upper log density of I >= max{(L-b)/L, (b-l)/L}", i.upper, Relation::ge,
             std::max((L - b) / L, (b - ell) / L));
  return run.take();
}

std::vector<BoundReport> corollary_band(CorollaryRun& run, const GrowthFunction& T, bool at_order) {
  const OrderInfo o = run.orders(T);
  if (o.estimated) run.widen();
  const double xi = at_order ? o.upper : o.lower;
  const double eps = run.param("eps", 0.5);
  run.tag(std::string(at_order ? "L=" : "l=") + num(xi) + ", eps=" + num(eps));
  if (!(xi > 0.0 && xi < kInf)) return run.fail(at_order ? "needs 0 < L < inf" : "needs 0 < l < inf");
  if (!(eps > 0.0)) return run.fail("needs eps > 0");
  const IntervalSet K =
      run.set([&](double x) { return std::abs(T.log_value(x) / x - xi) <= eps; }, T.features());
  const DensityEstimate k = run.density(K, false);
  if (at_order) run.report("upper log density of K1 >= eps/L", k.upper, Relation::ge, eps / xi);
  else run.report("upper log density of K2 >= eps/(l+eps)", k.upper, Relation::ge, eps / (xi + eps));
  return run.take();
}

// Order rho and type tau of T, supplied or estimated, checked against each other.
// A shared order (the pair corollary) comes in through `common_rho`.
std::optional<std::string> order_and_type(CorollaryRun& run, const GrowthFunction& T, const std::string& rho_key,
                                          const std::string& tau_key, double& rho, double& tau,
                                          std::optional<double> common_rho = std::nullopt) {
  const OrderInfo o = run.orders(T);
  if (o.estimated) run.widen();
  const bool supplied = run.has(rho_key) || common_rho.has_value();
  rho = common_rho ? *common_rho : run.has(rho_key) ? run.param(rho_key, 0.0) : o.upper;
  if (supplied && !agrees(rho, o.upper))
    return "order " + num(rho) + " disagrees with the order estimate " + num(o.upper);
  if (!(rho > 0.0 && rho < kInf)) return std::string("needs order in (0, inf), got ") + num(rho);
  const double tau_est = run.type(T, rho);
  run.widen();
  tau = run.has(tau_key) ? run.param(tau_key, 0.0) : tau_est;
  if (run.has(tau_key) && !agrees(tau, tau_est))
    return tau_key + " = " + num(tau) + " disagrees with the type estimate " + num(tau_est);
  if (!(tau > 0.0 && tau < kInf)) return std::string("needs type in (0, inf), got ") + num(tau);
  return std::nullopt;
}

std::vector<BoundReport> corollary_type_band(CorollaryRun& run, const GrowthFunction& T) {
  double rho = 0.0, tau = 0.0;
  const double eps0 = run.param("eps0", 1.0);
  const auto bad = order_and_type(run, T, "rho", "tau", rho, tau);
  run.tag("rho=" + num(rho) + ", tau=" + num(tau) + ", eps0=" + num(eps0));
  if (bad) return run.fail(*bad);
  if (!(eps0 > 0.0)) return run.fail("needs eps0 > 0");
  const double lo = std::log(std::max(tau - eps0, 0.0));
  const double hi = std::log(tau + eps0);
  const IntervalSet N = run.set(
      [&](double x) {
        const double v = T.log_value(x) - rho * x;
        return lo <= v && v <= hi;
      },
      T.features());
  const double base = std::max(tau - eps0, 0.0) / tau;
  run.report("upper linear density of N1 >= 1-((tau-eps0)/tau)^(1/rho)", run.density(N, true).upper, Relation::ge,
             1.0 - std::pow(base, 1.0 / rho));
  return run.take();
}

std::vector<BoundReport> corollary_small(CorollaryRun& run, const GrowthFunction& T1, const GrowthFunction& T2) {
  const double beta = run.param("beta", 1.0);
  const bool by_order = run.param("xi", 1.0) != 0.0;
  const OrderInfo o1 = run.orders(T1), o2 = run.orders(T2);
  if (o1.estimated || o2.estimated) run.widen();
  const double xi1 = by_order ? o1.upper : o1.lower;
  const double xi2 = by_order ? o2.upper : o2.lower;
  run.tag(std::string(by_order ? "order" : "lower order") + " xi1=" + num(xi1) + ", xi2=" + num(xi2) +
          ", beta=" + num(beta));
  if (!(beta > 0.0)) return run.fail("needs beta > 0");
  if (!(xi1 < xi2)) return run.fail("needs xi(T1) < xi(T2)");
  // phi(r) = (log r)^beta, so log phi = beta log x.
  const IntervalSet P = run.set(
      [&](double x) { return beta * std::log(x) + T1.log_value(x) < T2.log_value(x); },
      merged(T1.features(), T2.features()));
  const double bound = xi2 == kInf ? 1.0 : 1.0 - xi1 / xi2;
  run.report("upper log density of P >= 1-xi(T1)/xi(T2)", run.density(P, false).upper, Relation::ge, bound);
  run.report("upper linear density of P == 1", run.density(P, true).upper, Relation::ge, 1.0);
  return run.take();
}

std::vector<BoundReport> corollary_type_ratio(CorollaryRun& run, const GrowthFunction& T1,
                                              const GrowthFunction& T2) {
  double rho1 = 0.0, tau1 = 0.0, rho2 = 0.0, tau2 = 0.0;
  // Both types are taken with respect to one order, T1's unless rho is given.
  const double rho = run.has("rho") ? run.param("rho", 0.0) : run.orders(T1).upper;
  const auto bad1 = order_and_type(run, T1, "rho", "tau1", rho1, tau1, rho);
  const auto bad2 = order_and_type(run, T2, "rho", "tau2", rho2, tau2, rho);
  const double C = run.param("C", 0.0);
  run.tag("rho=" + num(rho) + ", tau1=" + num(tau1) + ", tau2=" + num(tau2) + ", C=" + num(C));
  if (bad1) return run.fail("T1: " + *bad1);
  if (bad2) return run.fail("T2: " + *bad2);
  if (!(tau1 < tau2)) return run.fail("needs tau(T1) < tau(T2)");
  if (!(C > 1.0 && C < tau2 / tau1)) return run.fail("needs C in (1, tau(T2)/tau(T1))");
  const double logC = std::log(C);
  const IntervalSet Q = run.set([&](double x) { return logC + T1.log_value(x) < T2.log_value(x); },
                                merged(T1.features(), T2.features()));
  run.report("upper linear density of Q >= 1-C^(1/rho)(tau1/tau2)^(1/rho)", run.density(Q, true).upper,
             Relation::ge, 1.0 - std::pow(C * tau1 / tau2, 1.0 / rho));
  return run.take();
}

std::vector<BoundReport> corollary_shift(CorollaryRun& run, const GrowthFunction& T) {
  double rho = 0.0, tau = 0.0;
  const double C1 = run.param("C1", 0.0), C2 = run.param("C2", 0.0);
  const auto bad = order_and_type(run, T, "rho", "tau", rho, tau);
  run.tag("rho=" + num(rho) + ", tau=" + num(tau) + ", C1=" + num(C1) + ", C2=" + num(C2));
  if (bad) return run.fail(*bad);
  if (!(C1 > 1.0 && C2 > 1.0)) return run.fail("needs C1 > 1 and C2 > 1");
  const double s = std::log(C1), lc2 = std::log(C2);
  std::vector<double> feats = T.features();
  for (double f : T.features()) feats.push_back(f - s);
  std::sort(feats.begin(), feats.end());
  const IntervalSet V = run.set([&](double x) { return T.log_value(x + s) - T.log_value(x) >= lc2; }, feats);
  const double hayman = rho * s / lc2;
  std::vector<BoundReport> out;
  if (std::pow(C2, 1.0 / rho) < C1)
    run.report("upper linear density of V >= 1-C2^(1/rho)/C1", run.density(V, true).upper, Relation::ge,
               1.0 - std::pow(C2, 1.0 / rho) / C1);
  else
    out = run.fail("needs C2^(1/rho) < C1");
  run.report("upper log density of V <= rho log C1/log C2", run.density(V, false).upper, Relation::le, hayman);
  auto rest = run.take();
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

std::vector<BoundReport> verify_growth_corollary(const std::string& id, const Params& params,
                                                 const GrowthFunction& T1, const std::optional<GrowthFunction>& T2,
                                                 double x_cutoff, std::size_t tail_window, const GridSpec& grid) {
  if (!(x_cutoff > 1.0) || !std::isfinite(x_cutoff)) throw DomainError("cutoff must exceed e");
  CorollaryRun run(id, params, x_cutoff, tail_window, grid);
  auto need_pair = [&]() -> const GrowthFunction& {
    if (!T2) throw PreconditionError(id + " needs a second function");
    return *T2;
  };
  if (id == "thm1.1" || id == "cor4.1") return corollary_ab(run, T1);
  if (id == "cor4.2") return corollary_band(run, T1, true);
  if (id == "cor4.3") return corollary_band(run, T1, false);
  if (id == "cor4.4") return corollary_type_band(run, T1);
  if (id == "cor4.5") return corollary_small(run, T1, need_pair());
  if (id == "cor4.6") return corollary_type_ratio(run, T1, need_pair());
  if (id == "cor4.7") return corollary_shift(run, T1);
  throw PreconditionError("unknown corollary id '" + id + "'");
}

}  // namespace psidensity

#include "psidensity/growth.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdlib>
#include <memory>

#include "psidensity/error.hpp"

namespace psidensity {

GrowthFunction::GrowthFunction(std::string name, LogFn log_value, std::vector<double> features)
    : name_(std::move(name)), log_value_(std::move(log_value)), features_(std::move(features)) {}

GrowthFunction GrowthFunction::from_expression(const expr::Expression& e) {
  return GrowthFunction(e.source(), [e](double x) {
    const expr::LogMagnitude v = expr::evaluate_log(e, x);
    if (v.sign <= 0) throw DomainError("T(r) <= 0 at r = e^" + std::to_string(x));
    return v.log_abs;
  });
}

GrowthFunction GrowthFunction::parse(const std::string& spec) {
  if (spec.rfind("zigzag:", 0) == 0) {
    const std::string args = spec.substr(7);
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw DomainError("zigzag needs 'zigzag:ell,L'");
    const std::string a = args.substr(0, comma);
    const std::string b = args.substr(comma + 1);
    char* end = nullptr;
    const double ell = std::strtod(a.c_str(), &end);
    if (a.empty() || *end != '\0') throw DomainError("bad zigzag parameter '" + a + "'");
    if (b == "inf") return make_zigzag_unbounded(ell);
    const double L = std::strtod(b.c_str(), &end);
    if (b.empty() || *end != '\0') throw DomainError("bad zigzag parameter '" + b + "'");
    return make_zigzag(ell, L);
  }
  return from_expression(expr::parse(spec));
}

double GrowthFunction::value(double r) const { return std::exp(log_value_(std::log(r))); }

GrowthFunction& GrowthFunction::with_zigzag(ZigzagMeta meta) {
  zigzag_ = std::move(meta);
  return *this;
}

GrowthFunction GrowthFunction::power(double c) const {
  if (!(c > 0.0)) throw PreconditionError("power needs c > 0");
  GrowthFunction g(name_ + "^" + std::to_string(c), [f = log_value_, c](double x) { return c * f(x); },
                   features_);
  if (zigzag_) {
    ZigzagMeta m = *zigzag_;
    m.ell *= c;
    m.L *= c;
    for (auto& bp : m.breakpoints) bp.second *= c;
    for (double& s : m.slopes) s *= c;
    g.with_zigzag(std::move(m));
  }
  return g;
}

void GrowthFunction::check_monotone(double x_begin, double x_end, std::size_t points) const {
  double prev = -kInf;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = x_begin + (x_end - x_begin) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double y = log_value_(x);
    if (!std::isfinite(y)) throw PreconditionError("log T not finite at r = e^" + std::to_string(x));
    if (y < prev - 1e-12 * std::abs(prev))
      throw PreconditionError("T is not non-decreasing near r = e^" + std::to_string(x));
    prev = y;
  }
}

std::function<double(int)> default_delta(double ell, double L) {
  const double scale = std::min(1.0, L - ell);
  return [scale](int n) { return scale / (n + 1.0); };
}

namespace {

constexpr double kBreakpointLimit = 1e300;

GrowthFunction zigzag_from(std::string name, ZigzagMeta meta) {
  auto m = std::make_shared<const ZigzagMeta>(std::move(meta));
  const double x0 = m->breakpoints.front().first;
  const double y0 = m->breakpoints.front().second;
  auto eval = [m, x0, y0](double x) {
    if (x < x0) return y0 * x / x0;
    const auto& bp = m->breakpoints;
    auto it = std::upper_bound(bp.begin(), bp.end(), x,
                               [](double v, const std::pair<double, double>& p) { return v < p.first; });
    const std::size_t i = static_cast<std::size_t>(it - bp.begin()) - 1;
    return bp[i].second + m->slopes[i] * (x - bp[i].first);
  };
  std::vector<double> features;
  for (const auto& bp : m->breakpoints) features.push_back(bp.first);
  GrowthFunction g(std::move(name), eval, std::move(features));
  g.with_zigzag(*m);
  return g;
}

}  // namespace

GrowthFunction make_zigzag(double ell, double L, double x0, double y0,
                           const std::function<double(int)>& delta) {
  if (!(ell > 0.0) || !(L > ell) || !std::isfinite(L))
    throw PreconditionError("zigzag needs 0 < ell < L < inf");
  if (!(x0 > 0.0)) throw PreconditionError("zigzag needs x0 > 0");
  if (std::isnan(y0)) y0 = ell * x0;
  if (!(y0 > 0.0) || !(y0 / x0 < L)) throw PreconditionError("zigzag start must satisfy 0 < y0/x0 < L");
  const auto dn = delta ? delta : default_delta(ell, L);
  ZigzagMeta m;
  m.ell = ell;
  m.L = L;
  m.breakpoints.push_back({x0, y0});
  bool rising = y0 / x0 <= ell;
  int n = 1;
  while (m.breakpoints.back().first < kBreakpointLimit) {
    const auto [x1, y1] = m.breakpoints.back();
    if (rising) {
      const double d = dn(n);
      if (!(d > 0.0 && d < L - ell))
        throw PreconditionError("delta_" + std::to_string(n) + " outside (0, L - ell)");
      if (y1 / x1 < L - d) {
        const double x = (L * x1 - y1) / d;
        m.slopes.push_back(L);
        m.breakpoints.push_back({x, y1 + L * (x - x1)});
      }
      ++n;
    } else {
      m.slopes.push_back(0.0);
      m.breakpoints.push_back({y1 / ell, y1});
    }
    rising = !rising;
  }
  m.slopes.push_back(rising ? L : 0.0);
  char name[96];
  std::snprintf(name, sizeof name, "zigzag:%.17g,%.17g", ell, L);
  return zigzag_from(name, std::move(m));
}

GrowthFunction make_zigzag_unbounded(double ell, double x0) {
  if (!(ell > 0.0)) throw PreconditionError("zigzag needs ell > 0");
  if (!(x0 > 0.0)) throw PreconditionError("zigzag needs x0 > 0");
  ZigzagMeta m;
  m.ell = ell;
  m.L = kInf;
  m.breakpoints.push_back({x0, ell * x0});
  int n = 1;
  bool rising = true;
  while (m.breakpoints.back().first < kBreakpointLimit) {
    const auto [x1, y1] = m.breakpoints.back();
    if (rising) {
      const double slope = ell + n;
      const double x = (slope * x1 - y1) / 0.5;
      m.slopes.push_back(slope);
      m.breakpoints.push_back({x, y1 + slope * (x - x1)});
      ++n;
    } else {
      m.slopes.push_back(0.0);
      m.breakpoints.push_back({y1 / ell, y1});
    }
    rising = !rising;
  }
  m.slopes.push_back(rising ? ell + n : 0.0);
  char name[64];
  std::snprintf(name, sizeof name, "zigzag:%.17g,inf", ell);
  return zigzag_from(name, std::move(m));
}

std::vector<Extremum> local_extrema(const std::function<double(double)>& g, double x_begin,
                                    double x_end, const GridSpec& grid,
                                    const std::vector<double>& features) {
  const auto xs = make_grid(x_begin, x_end, grid, features);
  std::vector<double> v(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) v[i] = g(xs[i]);
  std::vector<Extremum> out;
  int last_sign = 0;
  std::size_t last_turn = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double dv = v[i] - v[i - 1];
    const int sign = dv > 0.0 ? 1 : dv < 0.0 ? -1 : 0;
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) {
      const std::size_t k = i - 1;  // the grid point where the slope turned
      const bool is_max = last_sign > 0;
      const double lo = xs[std::min(last_turn, k - 1)];
      const double hi = xs[i];
      const double flip = is_max ? -1.0 : 1.0;
      const auto [bx, bf] = boost::math::tools::brent_find_minima(
          [&](double x) { return flip * g(x); }, lo, hi, 40);
      Extremum e{xs[k], v[k], is_max};
      if (bf < flip * v[k]) e = {bx, flip * bf, is_max};
      out.push_back(e);
    }
    if (sign != last_sign) last_turn = i - 1;
    last_sign = sign;
  }
  out.push_back({xs.back(), v.back(), last_sign > 0});
  return out;
}

namespace {

struct Window {
  double max = -kInf;
  double min = kInf;
  std::size_t count = 0;
};

template <class Vec, class Get>
Window trailing(const Vec& c, std::size_t window, Get get) {
  Window w;
  w.count = c.size();
  const std::size_t first = c.size() > window ? c.size() - window : 0;
  for (std::size_t i = first; i < c.size(); ++i) {
    w.max = std::max(w.max, get(c[i]));
    w.min = std::min(w.min, get(c[i]));
  }
  return w;
}

// Candidate points of a zig-zag in (x_begin, x_cutoff]: its breakpoints and the cutoff.
std::vector<std::pair<double, double>> zigzag_candidates(const GrowthFunction& T, double x_begin,
                                                         double x_cutoff) {
  std::vector<std::pair<double, double>> c;
  for (const auto& [x, y] : T.zigzag()->breakpoints) {
    if (x >= x_cutoff) break;
    if (x > x_begin) c.push_back({x, y});
  }
  c.push_back({x_cutoff, T.log_value(x_cutoff)});
  return c;
}

}  // namespace

OrderEstimate estimate_orders(const GrowthFunction& T, double x_cutoff, std::size_t tail_window,
                              double x_begin, const GridSpec& grid) {
  if (tail_window < 4) throw PreconditionError("tail_window must be at least 4");
  if (!(x_cutoff > x_begin) || !(x_begin > 0.0)) throw PreconditionError("need 0 < x_begin < cutoff");
  OrderEstimate est;
  est.cutoff = x_cutoff;
  est.tail_window = tail_window;
  const double yc = T.log_value(x_cutoff);
  est.ratio_at_cutoff = yc / x_cutoff;
  if (T.zigzag()) {
    const auto c = zigzag_candidates(T, x_begin, x_cutoff);
    const Window w = trailing(c, tail_window, [](const auto& p) { return p.second / p.first; });
    est.candidates = w.count;
    est.low_confidence = w.count < tail_window;
    est.upper_order = w.max;
    est.lower_order = w.min;
    if (T.zigzag()->L == kInf) {
      est.upper_infinite = true;
      est.upper_order = kInf;
    }
    return est;
  }
  if (!std::isfinite(yc)) {
    est.upper_infinite = est.lower_infinite = true;
    est.upper_order = est.lower_order = kInf;
    est.ratio_at_cutoff = kInf;
    return est;
  }
  T.check_monotone(x_begin, x_cutoff);
  auto ratio = [&](double x) { return T.log_value(x) / x; };
  const auto ext = local_extrema(ratio, x_begin, x_cutoff, grid, T.features());
  const Window w = trailing(ext, tail_window, [](const Extremum& e) { return e.value; });
  est.candidates = w.count;
  est.low_confidence = w.count < tail_window;
  est.upper_order = w.max;
  est.lower_order = w.min;
  // Escaping ratio: grows by half again at each of the last three doublings.
  bool escaping = true;
  double prev = ratio(x_cutoff / 8.0);
  for (double f : {4.0, 2.0, 1.0}) {
    const double cur = ratio(x_cutoff / f);
    escaping = escaping && prev > 0.0 && cur >= 1.5 * prev;
    prev = cur;
  }
  if (escaping) {
    est.upper_infinite = true;
    est.upper_order = kInf;
    const bool min_in_tail = std::any_of(ext.begin(), ext.end() - 1, [&](const Extremum& e) {
      return !e.is_max && e.x >= x_cutoff / 2.0;
    });
    if (!min_in_tail) {
      est.lower_infinite = true;
      est.lower_order = kInf;
    }
  }
  return est;
}

double estimate_type(const GrowthFunction& T, double rho, double x_cutoff, std::size_t tail_window,
                     double x_begin, const GridSpec& grid) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw PreconditionError("type needs 0 < rho < inf");
  if (tail_window < 4) throw PreconditionError("tail_window must be at least 4");
  if (!(x_cutoff > x_begin)) throw PreconditionError("need x_begin < cutoff");
  if (T.zigzag()) {
    const auto c = zigzag_candidates(T, x_begin, x_cutoff);
    const Window w = trailing(c, tail_window, [rho](const auto& p) { return p.second - rho * p.first; });
    return std::exp(w.max);
  }
  T.check_monotone(x_begin, x_cutoff);
  const auto ext = local_extrema([&](double x) { return T.log_value(x) - rho * x; }, x_begin, x_cutoff,
                                 grid, T.features());
  const Window w = trailing(ext, tail_window, [](const Extremum& e) { return e.value; });
  return std::exp(w.max);
}

}  // namespace psidensity

#include "psidensity/interval_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "psidensity/error.hpp"

namespace psidensity {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<Interval> normalize(std::vector<Interval> iv) {
  std::erase_if(iv, [](const Interval& i) { return !(i.a < i.b); });
  std::sort(iv.begin(), iv.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });
  std::vector<Interval> out;
  out.reserve(iv.size());
  for (const Interval& i : iv) {
    if (!out.empty() && i.a <= out.back().b) {
      out.back().b = std::max(out.back().b, i.b);
    } else {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<Interval> clip(const std::vector<Interval>& iv, double lo, double hi) {
  std::vector<Interval> out;
  for (const Interval& i : iv) {
    if (i.a >= hi) break;
    const Interval c{std::max(i.a, lo), std::min(i.b, hi)};
    if (c.a < c.b) out.push_back(c);
  }
  return out;
}

// Complement of a normalized list within [lo, hi).
std::vector<Interval> invert(const std::vector<Interval>& iv, double lo, double hi) {
  std::vector<Interval> out;
  double cur = lo;
  for (const Interval& i : iv) {
    if (i.a > cur) out.push_back({cur, std::min(i.a, hi)});
    cur = std::max(cur, i.b);
    if (cur >= hi) break;
  }
  if (cur < hi) out.push_back({cur, hi});
  return normalize(std::move(out));
}

std::vector<Interval> intersect(const std::vector<Interval>& x, const std::vector<Interval>& y) {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const double a = std::max(x[i].a, y[j].a);
    const double b = std::min(x[i].b, y[j].b);
    if (a < b) out.push_back({a, b});
    if (x[i].b < y[j].b) ++i;
    else ++j;
  }
  return out;
}

std::vector<Interval> unite(const std::vector<Interval>& x, const std::vector<Interval>& y) {
  std::vector<Interval> all = x;
  all.insert(all.end(), y.begin(), y.end());
  return normalize(std::move(all));
}

std::vector<Interval> apply(SetOp op, const std::vector<Interval>& x, const std::vector<Interval>& y,
                            double lo, double hi) {
  switch (op) {
    case SetOp::set_union: return unite(x, y);
    case SetOp::intersection: return intersect(x, y);
    case SetOp::difference: return intersect(x, invert(y, lo, hi));
    case SetOp::complement: return invert(x, lo, hi);
  }
  return {};
}

const char* op_name(SetOp op) {
  switch (op) {
    case SetOp::set_union: return "union";
    case SetOp::intersection: return "intersection";
    case SetOp::difference: return "difference";
    case SetOp::complement: return "complement";
  }
  return "?";
}

class CombinedGenerator final : public Generator {
 public:
  CombinedGenerator(IntervalSet a, IntervalSet b, SetOp op)
      : a_(std::move(a)), b_(std::move(b)), op_(op) {}

  std::vector<Interval> upto(double x0, double x_cutoff) const override {
    const auto ma = a_.materialize(x_cutoff);
    const auto mb = op_ == SetOp::complement ? ma : b_.materialize(x_cutoff);
    const double hi = std::min(ma.horizon(), mb.horizon());
    return apply(op_, clip(ma.intervals(), x0, hi), clip(mb.intervals(), x0, hi), x0, hi);
  }

  std::string describe() const override {
    if (op_ == SetOp::complement) return "complement(" + a_.describe() + ")";
    return std::string(op_name(op_)) + "(" + a_.describe() + ", " + b_.describe() + ")";
  }

 private:
  IntervalSet a_;
  IntervalSet b_;
  SetOp op_;
};

class GeoRule final : public RuleGenerator {
 public:
  GeoRule(double q, double theta) : lq_(std::log(q)), q_(q), theta_(theta) {}
  std::optional<Interval> next_after(double x) const override {
    double k = std::max(0.0, std::floor(x / lq_ - theta_));
    while ((k + theta_) * lq_ <= x) k += 1.0;
    return Interval{k * lq_, (k + theta_) * lq_};
  }
  std::string describe() const override { return "geo:" + fmt(q_) + "," + fmt(theta_); }

 private:
  double lq_, q_, theta_;
};

class AccelRule final : public RuleGenerator {
 public:
  AccelRule(double lambda, double c) : lambda_(lambda), c_(c) {}
  std::optional<Interval> next_after(double x) const override {
    double k = 0.0;
    if (x > c_) k = std::max(0.0, std::floor(std::log(x / c_) / std::log(lambda_)) - 1.0);
    while (c_ * std::pow(lambda_, k) <= x) k += 1.0;
    const double start = std::pow(lambda_, k);
    if (!std::isfinite(c_ * start)) return std::nullopt;
    return Interval{start, c_ * start};
  }
  std::string describe() const override { return "accel:" + fmt(lambda_) + "," + fmt(c_); }

 private:
  double lambda_, c_;
};

class ThinRule final : public RuleGenerator {
 public:
  std::optional<Interval> next_after(double x) const override {
    double n = std::max(1.0, std::floor(x));
    for (;; n += 1.0) {
      const double b = n + std::log1p(std::ldexp(1.0, -static_cast<int>(std::min(n, 2000.0))));
      if (b > x && b > n) return Interval{n, b};
      if (b <= n && n > x) return std::nullopt;  // widths vanish in double precision
    }
  }
  std::string describe() const override { return "thin"; }
};

class SpikesRule final : public RuleGenerator {
 public:
  std::optional<Interval> next_after(double x) const override {
    double n = std::max(1.0, std::floor(std::exp(std::min(x, 700.0))));
    for (int guard = 0; guard < 4; ++guard, n += 1.0) {
      const double a = std::log(n);
      const double b = a + std::log1p(std::ldexp(1.0, -static_cast<int>(std::min(n, 2000.0))) / n);
      if (b > x) return Interval{a, b};
    }
    return Interval{std::log(n), std::log(n)};  // zero width, dropped on normalization
  }
  std::string describe() const override { return "spikes"; }
};

}  // namespace

Domain Domain::from_r(double r0, double R) {
  if (!(r0 > 0.0) || !(R > r0)) throw DomainError("domain needs 0 < r0 < R");
  return {std::log(r0), R == kInf ? kInf : std::log(R)};
}

double Domain::r0() const { return std::exp(x0); }
double Domain::R() const { return std::exp(xR); }

std::vector<Interval> RuleGenerator::upto(double x0, double x_cutoff) const {
  std::vector<Interval> out;
  double x = x0;
  while (x < x_cutoff) {
    auto next = next_after(x);
    if (!next) break;
    if (next->a >= x_cutoff) break;
    if (next->b <= x) break;  // no progress: rule exhausted in double precision
    out.push_back(*next);
    x = next->b;
  }
  return out;
}

IntervalSet::IntervalSet(Domain d, std::vector<Interval> intervals)
    : IntervalSet(d, std::move(intervals), d.xR) {}

IntervalSet::IntervalSet(Domain d, std::vector<Interval> intervals, double horizon)
    : domain_(d), intervals_(normalize(std::move(intervals))), horizon_(horizon) {
  if (!(d.x0 < d.xR)) throw DomainError("empty domain");
  for (const Interval& i : intervals_) {
    if (i.a < d.x0 || i.b > d.xR)
      throw DomainError("interval [" + fmt(std::exp(i.a)) + ", " + fmt(std::exp(i.b)) +
                        ") leaves the domain");
  }
}

IntervalSet IntervalSet::generated(Domain d, std::shared_ptr<const Generator> g) {
  IntervalSet s(d, {}, d.xR);
  s.generator_ = std::move(g);
  return s;
}

IntervalSet IntervalSet::full(Domain d) { return IntervalSet(d, {{d.x0, d.xR}}); }
IntervalSet IntervalSet::empty(Domain d) { return IntervalSet(d, {}); }

IntervalSet IntervalSet::from_r(double r0, double R,
                                const std::vector<std::pair<double, double>>& iv) {
  const Domain d = Domain::from_r(r0, R);
  std::vector<Interval> x;
  for (const auto& [a, b] : iv) {
    if (!(a > 0.0)) throw DomainError("interval endpoint must be positive");
    x.push_back({a == r0 ? d.x0 : std::log(a), b == R ? d.xR : std::log(b)});
  }
  return IntervalSet(d, std::move(x));
}

IntervalSet IntervalSet::materialize(double x_cutoff) const {
  const double hi = std::min(x_cutoff, domain_.xR);
  if (generator_) {
    auto raw = generator_->upto(domain_.x0, hi);
    return IntervalSet(domain_, clip(normalize(std::move(raw)), domain_.x0, hi), hi);
  }
  const double h = std::min(hi, horizon_);
  return IntervalSet(domain_, clip(intervals_, domain_.x0, h), h);
}

const std::vector<Interval>& IntervalSet::intervals() const {
  if (generator_) throw PreconditionError("generated set must be materialized first");
  return intervals_;
}

bool IntervalSet::contains(double x) const {
  if (generator_) return materialize(x + 1.0).contains(x);
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](double v, const Interval& i) { return v < i.a; });
  if (it == intervals_.begin()) return false;
  --it;
  return x >= it->a && x < it->b;
}

std::string IntervalSet::describe() const {
  if (generator_) return generator_->describe();
  std::string out;
  for (const Interval& i : intervals_) {
    if (!out.empty()) out += ",";
    out += fmt(std::exp(i.a)) + ":" + fmt(std::exp(i.b));
  }
  return out.empty() ? "empty" : out;
}

IntervalSet combine(const IntervalSet& a, const IntervalSet& b, SetOp op) {
  if (op != SetOp::complement && !(a.domain() == b.domain()))
    throw DomainError("combine: operands have different domains");
  const Domain d = a.domain();
  if (a.is_generated() || (op != SetOp::complement && b.is_generated()))
    return IntervalSet::generated(d, std::make_shared<CombinedGenerator>(a, b, op));
  const double hi = op == SetOp::complement ? a.horizon() : std::min(a.horizon(), b.horizon());
  const auto& bi = op == SetOp::complement ? a.intervals() : b.intervals();
  auto result = apply(op, clip(a.intervals(), d.x0, hi), clip(bi, d.x0, hi), d.x0, hi);
  return IntervalSet(d, std::move(result)).materialize(hi);
}

IntervalSet complement(const IntervalSet& a) { return combine(a, a, SetOp::complement); }

double log_psi_measure(const IntervalSet& e, const PsiScale& s, double x_upto) {
  const Domain& d = e.domain();
  if (!(x_upto > d.x0) || x_upto > d.xR) throw DomainError("measure bound outside the domain");
  const IntervalSet m = e.materialize(x_upto);
  if (m.horizon() < x_upto) throw PreconditionError("set is not known up to the requested bound");
  // Streaming log-sum-exp: total = exp(peak) * scaled.
  double peak = -kInf;
  double scaled = 0.0;
  for (const Interval& i : m.intervals()) {
    const double t = s.log_psi_diff(i.a, i.b);
    if (t == -kInf) continue;
    if (t > peak) {
      scaled = scaled * std::exp(peak - t) + 1.0;
      peak = t;
    } else {
      scaled += std::exp(t - peak);
    }
  }
  return scaled > 0.0 ? peak + std::log(scaled) : -kInf;
}

double psi_measure(const IntervalSet& e, const PsiScale& s, double x_upto) {
  return std::exp(log_psi_measure(e, s, x_upto));
}

std::shared_ptr<const Generator> geo_rule(double q, double theta) {
  if (!(q > 1.0) || !(theta > 0.0 && theta < 1.0)) throw DomainError("geo needs q > 1 and 0 < theta < 1");
  return std::make_shared<GeoRule>(q, theta);
}

std::shared_ptr<const Generator> accel_rule(double lambda, double c) {
  if (!(c > 1.0 && lambda > c)) throw DomainError("accel needs 1 < c < lambda");
  return std::make_shared<AccelRule>(lambda, c);
}

std::shared_ptr<const Generator> thin_rule() { return std::make_shared<ThinRule>(); }
std::shared_ptr<const Generator> spikes_rule() { return std::make_shared<SpikesRule>(); }

namespace {

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw DomainError("bad number '" + item + "' in set spec");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

IntervalSet parse_one(const std::string& spec, Domain d) {
  if (spec.empty()) throw DomainError("empty set spec");
  if (std::isalpha(static_cast<unsigned char>(spec[0]))) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::vector<double> p =
        colon == std::string::npos ? std::vector<double>{} : parse_numbers(spec.substr(colon + 1));
    auto want = [&](std::size_t n) {
      if (p.size() != n) throw DomainError("set rule '" + name + "' takes " + std::to_string(n) + " parameter(s)");
    };
    if (name == "geo2") { want(0); return IntervalSet::generated(d, geo_rule(4.0, 0.5)); }
    if (name == "accel4") { want(0); return IntervalSet::generated(d, accel_rule(4.0, 2.0)); }
    if (name == "geo") { want(2); return IntervalSet::generated(d, geo_rule(p[0], p[1])); }
    if (name == "accel") { want(2); return IntervalSet::generated(d, accel_rule(p[0], p[1])); }
    if (name == "thin") { want(0); return IntervalSet::generated(d, thin_rule()); }
    if (name == "spikes") { want(0); return IntervalSet::generated(d, spikes_rule()); }
    if (name == "full") { want(0); return IntervalSet::full(d); }
    if (name == "empty") { want(0); return IntervalSet::empty(d); }
    throw DomainError("unknown set rule '" + name + "'");
  }
  std::vector<Interval> iv;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', pos), spec.size());
    const std::string item = spec.substr(pos, comma - pos);
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw DomainError("interval '" + item + "' needs the form a:b");
    const std::vector<double> ab = parse_numbers(item.substr(0, colon) + "," + item.substr(colon + 1));
    if (!(ab[0] > 0.0 && ab[1] > 0.0)) throw DomainError("interval endpoints must be positive");
    if (!(ab[0] < ab[1])) throw DomainError("interval '" + item + "' needs a < b");
    iv.push_back({std::log(ab[0]), ab[1] == kInf ? kInf : std::log(ab[1])});
    pos = comma + 1;
  }
  for (Interval& i : iv) {
    i.a = std::max(i.a, d.x0);
    i.b = std::min(i.b, d.xR);
  }
  return IntervalSet(d, std::move(iv));
}

}  // namespace

IntervalSet parse_set(const std::string& spec, Domain d) {
  std::size_t pos = 0;
  std::optional<IntervalSet> acc;
  while (pos <= spec.size()) {
    const std::size_t bar = std::min(spec.find('|', pos), spec.size());
    IntervalSet part = parse_one(spec.substr(pos, bar - pos), d);
    acc = acc ? combine(*acc, part, SetOp::set_union) : part;
    pos = bar + 1;
  }
  return *acc;
}

}  // namespace psidensity

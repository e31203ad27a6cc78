#include "psidensity/psi_scale.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "psidensity/error.hpp"

namespace psidensity {
namespace {

std::string kind_name(ScaleKind k) {
  switch (k) {
    case ScaleKind::linear: return "linear";
    case ScaleKind::log: return "log";
    case ScaleKind::loglog: return "loglog";
    case ScaleKind::powlog: return "powlog";
    case ScaleKind::neglog1m: return "neglog1m";
  }
  return "?";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PsiScale PsiScale::make(ScaleKind kind, double r0, double R, double beta) {
  const std::string name = kind_name(kind);
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw DomainError(name + ": r0 must be positive and finite");
  if (!(R > r0)) throw DomainError(name + ": R must exceed r0");
  switch (kind) {
    case ScaleKind::neglog1m:
      if (R != 1.0) throw DomainError("neglog1m needs R = 1, got R = " + fmt(R));
      break;
    case ScaleKind::linear:
    case ScaleKind::log:
    case ScaleKind::loglog:
    case ScaleKind::powlog:
      if (R != kInf) throw DomainError(name + " needs R = inf, got R = " + fmt(R));
      break;
  }
  if ((kind == ScaleKind::log || kind == ScaleKind::powlog) && r0 < 1.0)
    throw DomainError(name + " is not positive below r = 1 (r0 = " + fmt(r0) + ")");
  if (kind == ScaleKind::loglog && r0 < std::numbers::e)
    throw DomainError("loglog is not positive below r = e (r0 = " + fmt(r0) + ")");
  if (kind == ScaleKind::powlog && !(beta > 0.0 && std::isfinite(beta)))
    throw DomainError("powlog needs beta > 0, got " + fmt(beta));
  return PsiScale(kind, r0, R, kind == ScaleKind::powlog ? beta : 1.0, false);
}

PsiScale PsiScale::exp_lift() const {
  if (lifted_) throw PreconditionError("exp_lift of a lifted scale is not supported");
  return PsiScale(kind_, r0_, R_, beta_, true);
}

double PsiScale::x0() const { return std::log(r0_); }
double PsiScale::xR() const { return R_ == kInf ? kInf : std::log(R_); }

std::string PsiScale::name() const {
  std::string n = kind_name(kind_);
  if (kind_ == ScaleKind::powlog) n += ":" + fmt(beta_);
  return lifted_ ? "exp:" + n : n;
}

double PsiScale::base_psi_at(double x) const {
  switch (kind_) {
    case ScaleKind::linear: return std::exp(x);
    case ScaleKind::log: return x;
    case ScaleKind::loglog: return std::log(x);
    case ScaleKind::powlog: return std::pow(x, beta_);
    case ScaleKind::neglog1m: return -std::log(-std::expm1(x));
  }
  return 0.0;
}

double PsiScale::base_log_psi_at(double x) const {
  switch (kind_) {
    case ScaleKind::linear: return x;
    case ScaleKind::log: return std::log(x);
    case ScaleKind::loglog: return std::log(std::log(x));
    case ScaleKind::powlog: return beta_ * std::log(x);
    case ScaleKind::neglog1m: return std::log(-std::log(-std::expm1(x)));
  }
  return 0.0;
}

double PsiScale::base_inverse_x(double y) const {
  switch (kind_) {
    case ScaleKind::linear: return std::log(y);
    case ScaleKind::log: return y;
    case ScaleKind::loglog: return std::exp(y);
    case ScaleKind::powlog: return std::pow(y, 1.0 / beta_);
    case ScaleKind::neglog1m: return std::log1p(-std::exp(-y));
  }
  return 0.0;
}

double PsiScale::base_inverse_log(double ly) const {
  switch (kind_) {
    case ScaleKind::linear: return ly;
    case ScaleKind::log: return std::exp(ly);
    case ScaleKind::loglog: return std::exp(std::exp(ly));
    case ScaleKind::powlog: return std::exp(ly / beta_);
    case ScaleKind::neglog1m: return std::log1p(-std::exp(-std::exp(ly)));
  }
  return 0.0;
}

double PsiScale::psi_at(double x) const {
  return lifted_ ? std::exp(base_psi_at(x)) : base_psi_at(x);
}

double PsiScale::log_psi_at(double x) const {
  return lifted_ ? base_psi_at(x) : base_log_psi_at(x);
}

double PsiScale::inverse_log(double ly) const {
  return lifted_ ? base_inverse_x(ly) : base_inverse_log(ly);
}

double PsiScale::log_psi_diff(double a, double b) const {
  const bool linear_like = (!lifted_ && kind_ == ScaleKind::linear) || (lifted_ && kind_ == ScaleKind::log);
  if (linear_like) return b + std::log(-std::expm1(a - b));
  if (!lifted_ && kind_ == ScaleKind::log) return std::log(b - a);
  const double la = log_psi_at(a);
  const double lb = log_psi_at(b);
  return lb + std::log(-std::expm1(la - lb));
}

double PsiScale::base_forward(double r) const {
  switch (kind_) {
    case ScaleKind::linear: return r;
    case ScaleKind::log: return std::log(r);
    case ScaleKind::loglog: return std::log(std::log(r));
    case ScaleKind::powlog: return std::pow(std::log(r), beta_);
    case ScaleKind::neglog1m: return -std::log1p(-r);
  }
  return 0.0;
}

double PsiScale::base_derivative(double r) const {
  switch (kind_) {
    case ScaleKind::linear: return 1.0;
    case ScaleKind::log: return 1.0 / r;
    case ScaleKind::loglog: return 1.0 / (r * std::log(r));
    case ScaleKind::powlog: return beta_ * std::pow(std::log(r), beta_ - 1.0) / r;
    case ScaleKind::neglog1m: return 1.0 / (1.0 - r);
  }
  return 0.0;
}

namespace {
void check_domain(const PsiScale& s, double r, const char* what) {
  if (!(r >= s.r0() && r < s.R()))
    throw DomainError(std::string(what) + ": r = " + fmt(r) + " outside [" + fmt(s.r0()) + ", " +
                      fmt(s.R()) + ") for scale " + s.name());
}
}  // namespace

double PsiScale::forward(double r) const {
  check_domain(*this, r, "forward");
  const double v = base_forward(r);
  return lifted_ ? std::exp(v) : v;
}

double PsiScale::derivative(double r) const {
  check_domain(*this, r, "derivative");
  const double d = base_derivative(r);
  return lifted_ ? d * std::exp(base_forward(r)) : d;
}

double PsiScale::inverse(double y) const {
  const double lo = forward(r0_);
  if (!(y >= lo) || !std::isfinite(y))
    throw DomainError("inverse: y = " + fmt(y) + " outside the range of " + name());
  const double yb = lifted_ ? std::log(y) : y;
  switch (kind_) {
    case ScaleKind::linear: return yb;
    case ScaleKind::log: return std::exp(yb);
    case ScaleKind::loglog: return std::exp(std::exp(yb));
    case ScaleKind::powlog: return std::exp(std::pow(yb, 1.0 / beta_));
    case ScaleKind::neglog1m: return -std::expm1(-yb);
  }
  return 0.0;
}

PsiScale parse_scale(const std::string& spec, double r0, double R) {
  std::string rest = spec;
  bool lift = false;
  if (rest.rfind("exp:", 0) == 0) {
    lift = true;
    rest = rest.substr(4);
  }
  std::string name = rest;
  double beta = 1.0;
  if (auto colon = rest.find(':'); colon != std::string::npos) {
    name = rest.substr(0, colon);
    const std::string arg = rest.substr(colon + 1);
    char* end = nullptr;
    beta = std::strtod(arg.c_str(), &end);
    if (arg.empty() || *end != '\0') throw DomainError("bad scale parameter '" + arg + "'");
  }
  ScaleKind kind;
  if (name == "linear") kind = ScaleKind::linear;
  else if (name == "log") kind = ScaleKind::log;
  else if (name == "loglog") kind = ScaleKind::loglog;
  else if (name == "powlog") kind = ScaleKind::powlog;
  else if (name == "neglog1m") kind = ScaleKind::neglog1m;
  else throw DomainError("unknown scale '" + spec + "'");
  if (kind != ScaleKind::powlog && name != rest) throw DomainError("scale '" + name + "' takes no parameter");
  if (std::isnan(r0)) {
    r0 = kind == ScaleKind::loglog ? std::numbers::e : kind == ScaleKind::neglog1m ? 0.5 : 1.0;
  }
  if (std::isnan(R)) R = kind == ScaleKind::neglog1m ? 1.0 : kInf;
  PsiScale s = PsiScale::make(kind, r0, R, beta);
  return lift ? s.exp_lift() : s;
}

}  // namespace psidensity

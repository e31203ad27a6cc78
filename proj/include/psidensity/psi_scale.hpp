#pragma once

// Scale functions psi on (r0, R): positive, unbounded, differentiable and
// strictly increasing. Besides the ordinary r-coordinate API every scale can
// be evaluated in the log coordinate x = log r, with log psi returned, so
// horizons such as r = e^(1e12) never form r itself.

#include <limits>
#include <string>

namespace psidensity {

enum class ScaleKind { linear, log, loglog, powlog, neglog1m };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class PsiScale {
 public:
  /// Throws DomainError when the kind is not a valid scale on (r0, R):
  /// neglog1m needs R = 1, the others R = inf; log and powlog need r0 >= 1,
  /// loglog needs r0 >= e; powlog needs beta > 0.
  static PsiScale make(ScaleKind kind, double r0, double R, double beta = 1.0);

  /// The scale e^psi. Lifting a lift throws PreconditionError.
  PsiScale exp_lift() const;

  ScaleKind kind() const { return kind_; }
  bool lifted() const { return lifted_; }
  double beta() const { return beta_; }
  double r0() const { return r0_; }
  double R() const { return R_; }
  bool unbounded_domain() const { return R_ == kInf; }
  double x0() const;  // log r0
  double xR() const;  // log R (inf, or 0 for R = 1)

  /// Name as accepted by the CLI, e.g. "log", "powlog:2", "exp:log".
  std::string name() const;

  // r-coordinate API. Inputs outside the domain (or range, for inverse)
  // throw DomainError.
  double forward(double r) const;
  double derivative(double r) const;
  double inverse(double y) const;

  // x-coordinate API, x = log r. No domain checks; values may be +-inf at
  // the domain ends.
  double psi_at(double x) const;      // psi(e^x)
  double log_psi_at(double x) const;  // log psi(e^x)
  /// x-coordinate of psi^{-1}(e^ly).
  double inverse_log(double ly) const;
  /// log(psi(e^b) - psi(e^a)) for a < b, without cancellation where the
  /// closed form allows it.
  double log_psi_diff(double a, double b) const;

 private:
  PsiScale(ScaleKind kind, double r0, double R, double beta, bool lifted)
      : kind_(kind), r0_(r0), R_(R), beta_(beta), lifted_(lifted) {}

  double base_psi_at(double x) const;
  double base_log_psi_at(double x) const;
  double base_inverse_x(double y) const;  // x of psi_base^{-1}(y)
  double base_inverse_log(double ly) const;
  double base_forward(double r) const;
  double base_derivative(double r) const;

  ScaleKind kind_;
  double r0_;
  double R_;
  double beta_;
  bool lifted_;
};

/// Parses "linear", "log", "loglog", "powlog:2", "neglog1m", "exp:log", ...
/// r0 and R default to 1 and inf (loglog: e; neglog1m: 0.5 and 1) when NaN.
PsiScale parse_scale(const std::string& spec,
                     double r0 = std::numeric_limits<double>::quiet_NaN(),
                     double R = std::numeric_limits<double>::quiet_NaN());

}  // namespace psidensity

#pragma once

// Finite unions of half-open intervals inside a domain (r0, R), stored in the
// log coordinate x = log r. A set is either explicit (a sorted list known up
// to a horizon) or generated by a rule that can be materialized up to any
// cutoff.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "psidensity/psi_scale.hpp"

namespace psidensity {

/// [a, b) in x = log r.
struct Interval {
  double a = 0.0;
  double b = 0.0;
  bool operator==(const Interval&) const = default;
};

struct Domain {
  double x0 = 0.0;   // log r0
  double xR = kInf;  // log R

  static Domain from_r(double r0, double R);
  static Domain of(const PsiScale& s) { return {s.x0(), s.xR()}; }
  double r0() const;
  double R() const;
  bool operator==(const Domain&) const = default;
};

class Generator {
 public:
  virtual ~Generator() = default;
  /// Intervals of the rule meeting [x0, x_cutoff), unclipped, in order.
  virtual std::vector<Interval> upto(double x0, double x_cutoff) const = 0;
  virtual std::string describe() const = 0;
};

/// A stateless rule that hands out its intervals one at a time.
class RuleGenerator : public Generator {
 public:
  /// First interval of the rule with b > x, or nothing when the rule is
  /// exhausted.
  virtual std::optional<Interval> next_after(double x) const = 0;
  std::vector<Interval> upto(double x0, double x_cutoff) const override;
};

class IntervalSet {
 public:
  /// Explicit set known on the whole domain. Intervals are sorted, merged
  /// and degenerate ones dropped; an interval leaving the domain throws
  /// DomainError.
  IntervalSet(Domain d, std::vector<Interval> intervals);

  static IntervalSet generated(Domain d, std::shared_ptr<const Generator> g);
  static IntervalSet full(Domain d);
  static IntervalSet empty(Domain d);
  static IntervalSet from_r(double r0, double R, const std::vector<std::pair<double, double>>& iv);

  const Domain& domain() const { return domain_; }
  bool is_generated() const { return generator_ != nullptr; }
  const std::shared_ptr<const Generator>& generator() const { return generator_; }
  /// x up to which membership is known (xR for explicit sets).
  double horizon() const { return horizon_; }

  /// Explicit set equal to this one on [x0, min(x_cutoff, horizon)).
  IntervalSet materialize(double x_cutoff) const;

  /// Intervals of an explicit set; a generated set throws PreconditionError.
  const std::vector<Interval>& intervals() const;

  bool contains(double x) const;
  std::string describe() const;

 private:
  IntervalSet(Domain d, std::vector<Interval> intervals, double horizon);

  Domain domain_;
  std::vector<Interval> intervals_;
  double horizon_;
  std::shared_ptr<const Generator> generator_;
};

enum class SetOp { set_union, intersection, difference, complement };

/// Exact boolean algebra on endpoints. Both operands must share a domain
/// (complement ignores `b`). Explicit results are known up to the smaller
/// horizon; if an operand is generated the result is generated too.
IntervalSet combine(const IntervalSet& a, const IntervalSet& b, SetOp op);
IntervalSet complement(const IntervalSet& a);

/// psi-measure of E intersected with [r0, e^x_upto). Requires
/// x_upto <= horizon for explicit sets.
double psi_measure(const IntervalSet& e, const PsiScale& s, double x_upto);
/// log of the same quantity (-inf for measure zero), safe at astronomical x.
double log_psi_measure(const IntervalSet& e, const PsiScale& s, double x_upto);

// Rule generators.

/// Union over k >= 0 of [q^k, q^(k+theta)); geo(4, 0.5) is the union of
/// [2^(2k), 2^(2k+1)).
std::shared_ptr<const Generator> geo_rule(double q, double theta);
/// Union over k >= 0 of [e^(lambda^k), e^(c lambda^k)), 1 < c < lambda.
std::shared_ptr<const Generator> accel_rule(double lambda, double c);
/// Union over n >= 1 of [e^n, e^n (1 + 2^-n)): finite logarithmic measure.
std::shared_ptr<const Generator> thin_rule();
/// Union over n >= 1 of [n, n + 2^-n).
std::shared_ptr<const Generator> spikes_rule();

/// Parses a set spec. Explicit lists use r-coordinates, "2:3,5:8"; named
/// rules are geo2, accel4, geo:q,theta, accel:lambda,c, thin, spikes, full,
/// empty; "A|B" is a union.
IntervalSet parse_set(const std::string& spec, Domain d);

}  // namespace psidensity

#include "psidensity/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>

#include "psidensity/bounds.hpp"
#include "psidensity/density.hpp"
#include "psidensity/error.hpp"
#include "psidensity/expr.hpp"
#include "psidensity/growth.hpp"
#include "psidensity/interval_set.hpp"
#include "psidensity/limits.hpp"
#include "psidensity/psi_scale.hpp"

namespace psidensity::cli {

using json = nlohmann::ordered_json;

double parse_log_cutoff(const std::string& text) {
  const expr::LogMagnitude v = expr::evaluate_log(expr::parse(text), 0.0);
  if (v.sign <= 0 || !std::isfinite(v.log_abs)) throw DomainError("cutoff must be a positive finite number");
  return v.log_abs;
}

namespace {

struct UsageError : Error {
  using Error::Error;
};

json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

double parse_value(const std::string& s) {
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  return expr::evaluate(expr::parse(s), 1.0);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_value(item));
  return out;
}

// "a=2,b=2,xi=lower": numeric values, plus the named words of xi and mode.
Params parse_params(const std::string& s) {
  static const std::map<std::string, std::map<std::string, double>> words{
      {"xi", {{"order", 1.0}, {"lower", 0.0}}}, {"mode", {{"limsup", 1.0}, {"liminf", 0.0}}}};
  Params p;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("parameter '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    auto w = words.find(key);
    if (w != words.end()) {
      auto v = w->second.find(val);
      if (v == w->second.end()) throw UsageError("bad value '" + val + "' for " + key);
      p[key] = v->second;
    } else {
      p[key] = parse_value(val);
    }
  }
  return p;
}

json report_json(const BoundReport& r) {
  return {{"id", r.id},
          {"measured", number(r.measured)},
          {"bound", number(r.bound)},
          {"relation", relation_symbol(r.relation)},
          {"slack", r.slack},
          {"pass", r.pass},
          {"applicable", r.applicable},
          {"note", r.note}};
}

std::string reports_csv(const std::vector<BoundReport>& rs) {
  std::ostringstream o;
  o.precision(17);
  o << "id,measured,relation,bound,slack,pass,applicable\n";
  for (const auto& r : rs)
    o << '"' << r.id << "\"," << r.measured << ',' << relation_symbol(r.relation) << ',' << r.bound << ','
      << r.slack << ',' << (r.pass ? "true" : "false") << ',' << (r.applicable ? "true" : "false") << '\n';
  return o.str();
}

json verdict_json(const LimitVerdict& v) {
  json j{{"kind", verdict_name(v.kind)}, {"value", v.value ? number(*v.value) : json(nullptr)}, {"psi", v.psi}};
  if (!v.eps_grid.empty()) {
    j["eps_grid"] = v.eps_grid;
    j["densities"] = v.densities;
  }
  if (v.condition_i) j["condition_i"] = *v.condition_i;
  if (v.condition_ii) j["condition_ii"] = *v.condition_ii;
  if (v.tail_bound_holds) j["tail_bound_holds"] = *v.tail_bound_holds;
  j["note"] = v.note;
  json ev = json::array();
  for (const auto& p : v.evidence) ev.push_back({number(p.r), number(p.value)});
  j["evidence"] = ev;
  return j;
}

std::string verdict_csv(const LimitVerdict& v) {
  std::ostringstream o;
  o.precision(17);
  if (!v.eps_grid.empty()) {
    o << "eps,upper_density\n";
    for (std::size_t i = 0; i < v.eps_grid.size(); ++i) o << v.eps_grid[i] << ',' << v.densities[i] << '\n';
  } else {
    o << "r,value\n";
    for (const auto& p : v.evidence) o << p.r << ',' << p.value << '\n';
  }
  return o.str();
}

bool all_pass(const std::vector<BoundReport>& rs) {
  for (const auto& r : rs)
    if (!r.pass) return false;
  return !rs.empty();
}

struct Common {
  bool csv = false;
  std::string out;
  std::size_t tail_window = kDefaultTailWindow;
};

void add_common(CLI::App* sub, Common& c, bool window = true) {
  sub->add_flag("--csv", c.csv, "CSV instead of JSON");
  sub->add_flag("--json", [&c](std::int64_t) { c.csv = false; }, "JSON output (default)");
  sub->add_option("--out", c.out, "write the document to this path instead of stdout");
  if (window) sub->add_option("--tail-window", c.tail_window, "trailing window size")->capture_default_str();
}

struct Emit {
  std::string text;
  int code = kOk;
};

Emit emit(const Common& c, const json& j, const std::string& csv, int code) {
  return {c.csv ? csv : j.dump(2) + "\n", code};
}

GrowthFunction growth_from(const std::string& zigzag, const std::string& fn) {
  if (!zigzag.empty()) return GrowthFunction::parse("zigzag:" + zigzag);
  if (!fn.empty()) return GrowthFunction::parse(fn);
  throw UsageError("one of --zigzag or --fn is required");
}

ScalarFn scalar_from(const std::string& fn, double x_cutoff) {
  if (fn == "spikes") return spike_indicator(x_cutoff);
  return ScalarFn::parse(fn);
}

}  // namespace

Result run(const std::vector<std::string>& argv) {
  CLI::App app{"Densities of sets of reals, growth of functions and limits in density", "psidens"};
  app.require_subcommand(1);
  Common common;

  // density / chain
  std::string set_spec = "geo2", psi_spec = "log", cutoff = "1e24";
  auto* density = app.add_subcommand("density", "upper and lower psi-density of a set");
  auto* chain = app.add_subcommand("chain", "the density chain of a set at one horizon");
  for (auto* sub : {density, chain}) {
    sub->add_option("--set", set_spec, "set spec: r-intervals '2:3,5:8' or geo2, accel4, thin, spikes, ...")
        ->capture_default_str();
    sub->add_option("--psi", psi_spec, "scale: linear, log, loglog, powlog:b, neglog1m, exp:<scale>")
        ->capture_default_str();
    sub->add_option("--cutoff", cutoff, "horizon r, e.g. 1e24, 2^81, e^1e4")->capture_default_str();
    add_common(sub, common);
  }

  // order
  std::string fn, zigzag, rho_text;
  std::string order_cutoff = "e^1e4";
  auto* order = app.add_subcommand("order", "order, lower order and type of a growth function");
  order->add_option("--fn", fn, "growth function: expression in t, or zigzag:l,L");
  order->add_option("--zigzag", zigzag, "zig-zag with lower order l and order L, 'l,L'");
  order->add_option("--rho", rho_text, "also estimate the type with respect to this order");
  order->add_option("--cutoff", order_cutoff, "horizon r")->capture_default_str();
  add_common(order, common);

  // verify
  std::string id = "thm3.1", params_text, fn2, phi1 = "1", verify_cutoff = "e^1e4";
  auto* verify = app.add_subcommand("verify", "check density bounds for level sets of growth functions");
  verify->add_option("--id", id, "thm3.1, prop3.2, cor3.3, thm1.1, cor4.1 ... cor4.7")->capture_default_str();
  verify->add_option("--params", params_text, "k=v,...: eps, M, K, k, a, b, rho, tau, C, C1, C2, beta, xi, mode");
  verify->add_option("--fn", fn, "growth function T (expression in t or zigzag:l,L)");
  verify->add_option("--zigzag", zigzag, "zig-zag T, 'l,L' (L may be inf)");
  verify->add_option("--fn2", fn2, "second growth function T2 (cor4.5, cor4.6)");
  verify->add_option("--phi1", phi1, "phi1 of cor3.3 as an expression in t")->capture_default_str();
  verify->add_option("--psi", psi_spec, "scale for thm3.1, prop3.2, cor3.3")->capture_default_str();
  verify->add_option("--cutoff", verify_cutoff, "horizon r")->capture_default_str();
  add_common(verify, common);

  // limit-density
  std::string l_text = "0", eps_text, ld_cutoff = "1e4";
  double threshold = 1e-2;
  auto* limit = app.add_subcommand("limit-density", "certify a limit in psi-density");
  limit->add_option("--fn", fn, "f as an expression in t, or 'spikes'")->required();
  limit->add_option("--l", l_text, "the limit: a number, inf or -inf")->capture_default_str();
  limit->add_option("--psi", psi_spec, "scale")->capture_default_str();
  limit->add_option("--cutoff", ld_cutoff, "horizon r")->capture_default_str();
  limit->add_option("--eps", eps_text, "decreasing eps list (default 1,0.3,0.1,0.03,0.01)");
  limit->add_option("--threshold", threshold, "density threshold")->capture_default_str();
  add_common(limit, common);

  // integrability
  std::string rmax = "1e6";
  double lower_limit = 2.0, tol = 1e-2;
  std::size_t points = 25;
  auto* integ = app.add_subcommand("integrability", "psi-weighted Cesaro averages and divergence witness");
  integ->add_option("--fn", fn, "f as an expression in t")->required();
  integ->add_option("--psi", psi_spec, "scale")->capture_default_str();
  integ->add_option("--rmax", rmax, "last r of the trajectory")->capture_default_str();
  integ->add_option("--a", lower_limit, "lower limit of the integrals")->capture_default_str();
  integ->add_option("--points", points, "log-spaced trajectory points from 10 a")->capture_default_str();
  integ->add_option("--tol", tol, "stabilization tolerance")->capture_default_str();
  add_common(integ, common, false);

  Result res;
  std::vector<std::string> args{"psidens"};
  args.insert(args.end(), argv.begin(), argv.end());
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  auto help_of = [&]() -> std::string {
    const auto subs = app.get_subcommands();
    return subs.empty() ? app.help() : subs.front()->help();
  };
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp&) {
    res.diagnostics = help_of();
    return res;
  } catch (const CLI::ParseError& e) {
    res.exit_code = kUsage;
    res.diagnostics = std::string("error: ") + e.what() + "\n" + help_of();
    return res;
  }

  Emit out;
  try {
    if (density->parsed() || chain->parsed()) {
      const PsiScale psi = parse_scale(psi_spec);
      const IntervalSet e = parse_set(set_spec, Domain::of(psi));
      const double xc = parse_log_cutoff(cutoff);
      if (density->parsed()) {
        const DensityEstimate d = estimate_density(e, psi, xc, common.tail_window);
        json j{{"command", "density"},      {"set", set_spec},
               {"psi", psi.name()},         {"cutoff", cutoff},
               {"log_cutoff", xc},          {"upper", d.upper},
               {"lower", d.lower},          {"eval_points", d.eval_points},
               {"tail_window", d.tail_window}, {"low_confidence", d.low_confidence}};
        std::ostringstream csv;
        csv.precision(17);
        csv << "log_r,ratio,is_max\n";
        for (const auto& p : density_trajectory(e, psi, xc))
          csv << p.x << ',' << p.ratio << ',' << (p.is_max ? 1 : 0) << '\n';
        out = emit(common, j, csv.str(), kOk);
      } else {
        const auto reports = check_chain(e, psi, xc, common.tail_window);
        json j{{"command", "chain"}, {"set", set_spec}, {"psi", psi.name()}, {"cutoff", cutoff}};
        j["reports"] = json::array();
        for (const auto& r : reports) j["reports"].push_back(report_json(r));
        j["pass"] = all_pass(reports);
        out = emit(common, j, reports_csv(reports), all_pass(reports) ? kOk : kFailed);
      }
    } else if (order->parsed()) {
      const GrowthFunction T = growth_from(zigzag, fn);
      const double xc = parse_log_cutoff(order_cutoff);
      const OrderEstimate o = estimate_orders(T, xc, common.tail_window);
      json j{{"command", "order"},
             {"fn", T.name()},
             {"cutoff", order_cutoff},
             {"log_cutoff", xc},
             {"upper_order", number(o.upper_order)},
             {"lower_order", number(o.lower_order)},
             {"upper_infinite", o.upper_infinite},
             {"lower_infinite", o.lower_infinite},
             {"ratio_at_cutoff", number(o.ratio_at_cutoff)},
             {"tail_window", o.tail_window},
             {"candidates", o.candidates},
             {"low_confidence", o.low_confidence}};
      if (!rho_text.empty()) j["type"] = number(estimate_type(T, parse_value(rho_text), xc, common.tail_window));
      std::ostringstream csv;
      csv.precision(17);
      if (T.zigzag()) {
        csv << "log_r,log_T\n";
        for (const auto& [x, y] : T.zigzag()->breakpoints) {
          if (x > xc) break;
          csv << x << ',' << y << '\n';
        }
      } else {
        csv << "upper_order,lower_order\n" << o.upper_order << ',' << o.lower_order << '\n';
      }
      out = emit(common, j, csv.str(), kOk);
    } else if (verify->parsed()) {
      const Params params = parse_params(params_text);
      auto param = [&](const std::string& k, double d) {
        auto it = params.find(k);
        return it == params.end() ? d : it->second;
      };
      const double xc = parse_log_cutoff(verify_cutoff);
      const GrowthFunction T = growth_from(zigzag, fn);
      std::vector<BoundReport> reports;
      if (id == "thm3.1" || id == "prop3.2") {
        LimitSetSpec spec{order_ratio(T)};
        spec.psi = parse_scale(psi_spec);
        if (T.zigzag()) {
          spec.K = T.zigzag()->L;
          spec.k = T.zigzag()->ell;
        }
        spec.K = param("K", spec.K);
        spec.k = param("k", spec.k);
        spec.eps = param("eps", spec.eps);
        spec.M = param("M", spec.M);
        for (auto& r : verify_limsup_sets(spec, xc, common.tail_window))
          if (r.id.rfind(id, 0) == 0 || !r.applicable) reports.push_back(std::move(r));
        if (reports.empty()) reports.push_back(inapplicable(id, "needs eps < (K-k)/2"));
      } else if (id == "cor3.3") {
        const PsiScale psi = parse_scale(psi_spec);
        const bool limsup = param("mode", 0.0) != 0.0;
        double k2 = std::nan("");
        if (T.zigzag()) k2 = limsup ? T.zigzag()->L : T.zigzag()->ell;
        reports = verify_comparison(ScalarFn::parse(phi1), order_ratio(T), psi,
                                    limsup ? LimitMode::limsup : LimitMode::liminf, xc, param("k1", std::nan("")),
                                    param("k2", k2), common.tail_window);
      } else {
        std::optional<GrowthFunction> T2;
        if (!fn2.empty()) T2 = GrowthFunction::parse(fn2);
        reports = verify_growth_corollary(id, params, T, T2, xc, common.tail_window);
      }
      json j{{"command", "verify"}, {"id", id}, {"fn", T.name()}, {"cutoff", verify_cutoff}};
      j["reports"] = json::array();
      for (const auto& r : reports) j["reports"].push_back(report_json(r));
      j["pass"] = all_pass(reports);
      out = emit(common, j, reports_csv(reports), all_pass(reports) ? kOk : kFailed);
    } else if (limit->parsed()) {
      const PsiScale psi = parse_scale(psi_spec);
      const double xc = parse_log_cutoff(ld_cutoff);
      const ScalarFn f = scalar_from(fn, xc);
      const std::vector<double> eps = eps_text.empty() ? kDefaultEpsGrid : parse_list(eps_text);
      const LimitVerdict v = density_limit_certify(f, parse_value(l_text), psi, eps, xc, threshold,
                                                   common.tail_window);
      json j{{"command", "limit-density"}, {"fn", fn}, {"l", number(parse_value(l_text))}, {"cutoff", ld_cutoff}};
      j["verdict"] = verdict_json(v);
      out = emit(common, j, verdict_csv(v), v.kind == VerdictKind::psi_density_limit ? kOk : kFailed);
    } else if (integ->parsed()) {
      const PsiScale psi = parse_scale(psi_spec);
      const ScalarFn f = ScalarFn::parse(fn);
      const double r_max = std::exp(parse_log_cutoff(rmax));
      if (!(r_max > 10.0 * lower_limit)) throw UsageError("--rmax must exceed 10 a");
      const LimitVerdict v = divergence_witness(f, psi, lower_limit, log_spaced(10.0 * lower_limit, r_max, points), tol);
      json j{{"command", "integrability"}, {"fn", fn}, {"rmax", rmax}, {"a", lower_limit}};
      j["verdict"] = verdict_json(v);
      out = emit(common, j, verdict_csv(v), v.kind == VerdictKind::no_limit_detected ? kFailed : kOk);
    }
  } catch (const ConvergenceError& e) {
    res.exit_code = kNonConvergence;
    res.diagnostics = std::string("non-convergence: ") + e.what() + "\n";
    return res;
  } catch (const Error& e) {
    res.exit_code = kUsage;
    res.diagnostics = std::string("error: ") + e.what() + "\n" + help_of();
    return res;
  }

  res.exit_code = out.code;
  if (common.out.empty()) {
    res.output = std::move(out.text);
  } else {
    std::ofstream file(common.out, std::ios::binary);
    if (!file) {
      res.exit_code = kUsage;
      res.diagnostics = "error: cannot write " + common.out + "\n";
      return res;
    }
    file << out.text;
  }
  return res;
}

}  // namespace psidensity::cli

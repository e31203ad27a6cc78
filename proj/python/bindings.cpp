#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "psidensity/bounds.hpp"
#include "psidensity/cli.hpp"
#include "psidensity/density.hpp"
#include "psidensity/error.hpp"
#include "psidensity/growth.hpp"
#include "psidensity/interval_set.hpp"
#include "psidensity/limits.hpp"
#include "psidensity/psi_scale.hpp"
#include "psidensity/quadrature.hpp"
#include "psidensity/scalar_fn.hpp"

namespace py = pybind11;
using namespace psidensity;

namespace {

// Python callables of r become ScalarFns; the log-coordinate view is r = e^x.
ScalarFn from_callable(const std::string& name, const std::function<double(double)>& f) {
  return ScalarFn(name, f, [f](double x) { return f(std::exp(x)); });
}

py::dict report_dict(const BoundReport& r) {
  py::dict d;
  d["id"] = r.id;
  d["measured"] = r.measured;
  d["bound"] = r.bound;
  d["relation"] = relation_symbol(r.relation);
  d["slack"] = r.slack;
  d["pass"] = r.pass;
  d["applicable"] = r.applicable;
  d["note"] = r.note;
  return d;
}

py::list reports(const std::vector<BoundReport>& rs) {
  py::list out;
  for (const auto& r : rs) out.append(report_dict(r));
  return out;
}

py::list trajectory(const std::vector<TrajectoryPoint>& t) {
  py::list out;
  for (const auto& p : t) out.append(py::make_tuple(p.r, p.value));
  return out;
}

py::dict verdict_dict(const LimitVerdict& v) {
  py::dict d;
  d["kind"] = verdict_name(v.kind);
  d["value"] = v.value ? py::cast(*v.value) : py::none();
  d["psi"] = v.psi;
  d["evidence"] = trajectory(v.evidence);
  d["eps_grid"] = v.eps_grid;
  d["densities"] = v.densities;
  d["condition_i"] = v.condition_i ? py::cast(*v.condition_i) : py::none();
  d["condition_ii"] = v.condition_ii ? py::cast(*v.condition_ii) : py::none();
  d["tail_bound_holds"] = v.tail_bound_holds ? py::cast(*v.tail_bound_holds) : py::none();
  d["note"] = v.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Psi-densities of real sets, growth orders and limit certification";

  auto base = py::register_exception<Error>(m, "PsiDensityError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  py::class_<PsiScale>(m, "PsiScale")
      .def_static(
          "parse", [](const std::string& spec) { return parse_scale(spec); }, py::arg("spec"))
      .def_property_readonly("name", &PsiScale::name)
      .def_property_readonly("r0", &PsiScale::r0)
      .def_property_readonly("R", &PsiScale::R)
      .def_property_readonly("lifted", &PsiScale::lifted)
      .def("forward", &PsiScale::forward, py::arg("r"))
      .def("derivative", &PsiScale::derivative, py::arg("r"))
      .def("inverse", &PsiScale::inverse, py::arg("y"))
      .def("psi_at", &PsiScale::psi_at, py::arg("x"))
      .def("log_psi_at", &PsiScale::log_psi_at, py::arg("x"))
      .def("exp_lift", &PsiScale::exp_lift)
      .def("__repr__", [](const PsiScale& s) { return "PsiScale('" + s.name() + "')"; });

  py::class_<IntervalSet>(m, "IntervalSet")
      .def_static(
          "parse", [](const std::string& spec, double r0, double R) { return parse_set(spec, Domain::from_r(r0, R)); },
          py::arg("spec"), py::arg("r0") = 1.0, py::arg("R") = kInf)
      .def_static("from_r", &IntervalSet::from_r, py::arg("r0"), py::arg("R"), py::arg("intervals"))
      .def("intervals",
           [](const IntervalSet& e, double x_cutoff) {
             std::vector<std::pair<double, double>> out;
             const IntervalSet m = e.materialize(x_cutoff);
             for (const Interval& i : m.intervals()) out.emplace_back(i.a, i.b);
             return out;
           },
           py::arg("x_cutoff"), "Intervals as (log a, log b) pairs up to x_cutoff = log r.")
      .def("contains", &IntervalSet::contains, py::arg("x"))
      .def("complement", [](const IntervalSet& e) { return complement(e); })
      .def("union", [](const IntervalSet& a, const IntervalSet& b) { return combine(a, b, SetOp::set_union); })
      .def("intersection",
           [](const IntervalSet& a, const IntervalSet& b) { return combine(a, b, SetOp::intersection); })
      .def("difference", [](const IntervalSet& a, const IntervalSet& b) { return combine(a, b, SetOp::difference); })
      .def("psi_measure", [](const IntervalSet& e, const PsiScale& s, double x) { return psi_measure(e, s, x); },
           py::arg("psi"), py::arg("x_upto"))
      .def("__repr__", [](const IntervalSet& e) { return "IntervalSet('" + e.describe() + "')"; });

  py::class_<DensityEstimate>(m, "DensityEstimate")
      .def_readonly("upper", &DensityEstimate::upper)
      .def_readonly("lower", &DensityEstimate::lower)
      .def_readonly("cutoff", &DensityEstimate::cutoff)
      .def_readonly("eval_points", &DensityEstimate::eval_points)
      .def_readonly("tail_window", &DensityEstimate::tail_window)
      .def_readonly("low_confidence", &DensityEstimate::low_confidence);

  m.def("estimate_density", &estimate_density, py::arg("set"), py::arg("psi"), py::arg("x_cutoff"),
        py::arg("tail_window") = kDefaultTailWindow);
  m.def(
      "density_trajectory",
      [](const IntervalSet& e, const PsiScale& s, double x) {
        std::vector<std::tuple<double, double, bool>> out;
        for (const auto& p : density_trajectory(e, s, x)) out.emplace_back(p.x, p.ratio, p.is_max);
        return out;
      },
      py::arg("set"), py::arg("psi"), py::arg("x_cutoff"));

  py::class_<ScalarFn>(m, "ScalarFn")
      .def_static("parse", &ScalarFn::parse, py::arg("text"))
      .def_static("from_callable", &from_callable, py::arg("name"), py::arg("f"))
      .def_static("spikes", &spike_indicator, py::arg("x_max"))
      .def_property_readonly("name", &ScalarFn::name)
      .def("__call__", &ScalarFn::operator(), py::arg("r"))
      .def("at_log", &ScalarFn::at_log, py::arg("x"));

  py::class_<GrowthFunction>(m, "GrowthFunction")
      .def_static("parse", &GrowthFunction::parse, py::arg("spec"))
      .def_static(
          "zigzag", [](double ell, double L) { return L == kInf ? make_zigzag_unbounded(ell) : make_zigzag(ell, L); },
          py::arg("ell"), py::arg("L"))
      .def_property_readonly("name", &GrowthFunction::name)
      .def("log_value", &GrowthFunction::log_value, py::arg("x"))
      .def("power", &GrowthFunction::power, py::arg("c"));

  py::class_<OrderEstimate>(m, "OrderEstimate")
      .def_readonly("upper_order", &OrderEstimate::upper_order)
      .def_readonly("lower_order", &OrderEstimate::lower_order)
      .def_readonly("upper_infinite", &OrderEstimate::upper_infinite)
      .def_readonly("lower_infinite", &OrderEstimate::lower_infinite)
      .def_readonly("cutoff", &OrderEstimate::cutoff)
      .def_readonly("tail_window", &OrderEstimate::tail_window)
      .def_readonly("low_confidence", &OrderEstimate::low_confidence);

  m.def(
      "estimate_orders",
      [](const GrowthFunction& T, double x, std::size_t w) { return estimate_orders(T, x, w); },
      py::arg("T"), py::arg("x_cutoff"), py::arg("tail_window") = kDefaultTailWindow);
  m.def(
      "estimate_type",
      [](const GrowthFunction& T, double rho, double x, std::size_t w) { return estimate_type(T, rho, x, w); },
      py::arg("T"), py::arg("rho"), py::arg("x_cutoff"), py::arg("tail_window") = kDefaultTailWindow);

  m.def(
      "verify_limsup_sets",
      [](const GrowthFunction& T, double eps, double x, double K, double k) {
        LimitSetSpec spec;
        spec.phi = order_ratio(T);
        spec.eps = eps;
        spec.K = K;
        spec.k = k;
        return reports(verify_limsup_sets(spec, x));
      },
      py::arg("T"), py::arg("eps"), py::arg("x_cutoff"), py::arg("K") = std::nan(""), py::arg("k") = std::nan(""));
  m.def(
      "verify_corollary",
      [](const std::string& id, const Params& params, const GrowthFunction& T1, std::optional<GrowthFunction> T2,
         double x) { return reports(verify_growth_corollary(id, params, T1, T2, x)); },
      py::arg("id"), py::arg("params"), py::arg("T1"), py::arg("T2") = py::none(), py::arg("x_cutoff"));

  m.def(
      "integrate",
      [](const ScalarFn& f, double a, double b, double tol) {
        const QuadResult q = integrate(f, a, b, tol);
        return py::make_tuple(q.value, q.error);
      },
      py::arg("f"), py::arg("a"), py::arg("b"), py::arg("tol") = 1e-10);
  m.def(
      "cesaro_psi_average",
      [](const ScalarFn& f, const PsiScale& s, double a, const std::vector<double>& rs, double tol) {
        return trajectory(cesaro_psi_average(f, s, a, rs, tol));
      },
      py::arg("f"), py::arg("psi"), py::arg("a"), py::arg("r_values"), py::arg("tol") = 1e-8);
  m.def(
      "density_limit_certify",
      [](const ScalarFn& f, double l, const PsiScale& s, double x, const std::vector<double>& eps, double thr) {
        return verdict_dict(density_limit_certify(f, l, s, eps, x, thr));
      },
      py::arg("f"), py::arg("l"), py::arg("psi"), py::arg("x_cutoff"), py::arg("eps_grid") = kDefaultEpsGrid,
      py::arg("threshold") = 1e-2);
  m.def(
      "usual_limit_certify",
      [](const ScalarFn& f, const PsiScale& s, double r1, double r) { return verdict_dict(usual_limit_certify(f, s, r1, r)); },
      py::arg("f"), py::arg("psi"), py::arg("r1"), py::arg("r_cutoff"));
  m.def(
      "divergence_witness",
      [](const ScalarFn& f, const PsiScale& s, double a, const std::vector<double>& rs, double tol) {
        return verdict_dict(divergence_witness(f, s, a, rs, tol));
      },
      py::arg("f"), py::arg("psi"), py::arg("a"), py::arg("r_values"), py::arg("tol") = 1e-2);
  m.def("log_spaced", &log_spaced, py::arg("a"), py::arg("b"), py::arg("n"));

  m.def("parse_log_cutoff", &cli::parse_log_cutoff, py::arg("text"));
  m.def(
      "run_cli",
      [](const std::vector<std::string>& argv) {
        const cli::Result r = cli::run(argv);
        return py::make_tuple(r.exit_code, r.output, r.diagnostics);
      },
      py::arg("argv"));
}

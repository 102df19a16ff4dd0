#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "freemult/commands.hpp"
#include "freemult/config_io.hpp"
#include "freemult/criteria.hpp"
#include "freemult/errors.hpp"
#include "freemult/unimodality.hpp"
#include "freemult/zhong.hpp"

namespace py = pybind11;
using namespace freemult;

namespace {

py::tuple interval_tuple(const Interval& i) { return py::make_tuple(i.lo, i.hi); }

py::list interval_list(const std::vector<Interval>& v) {
  py::list out;
  for (const auto& i : v) out.append(interval_tuple(i));
  return out;
}

}  // namespace

PYBIND11_MODULE(_freemult, m) {
  m.doc() = "Free positive multiplicative Brownian motion: densities and log-unimodality checks";

  // Messages start with the error code name, e.g. "EmptyVSet: ...".
  py::register_exception<Error>(m, "FreemultError", PyExc_RuntimeError);

  py::class_<Measure>(m, "Measure")
      .def_static("from_yaml", [](const std::string& text) { return build_measure(parse_measure(text)); },
                  py::arg("text"))
      .def_static("dirac", &Measure::dirac, py::arg("c"))
      .def_static("lambda_", &Measure::lambda, py::arg("b"))
      .def_static("half_normal", &Measure::half_normal, py::arg("t"))
      .def_static("gamma", &Measure::gamma, py::arg("p"), py::arg("theta"))
      .def_static("beta", &Measure::beta, py::arg("p"), py::arg("q"))
      .def_static("marchenko_pastur", &Measure::marchenko_pastur)
      .def_static("marchenko_pastur_inverse", &Measure::marchenko_pastur_inverse)
      .def_static("boolean_stable", &Measure::boolean_stable, py::arg("alpha"))
      .def_static("uniform", &Measure::uniform, py::arg("alpha"), py::arg("beta"))
      .def_static("log_normal", &Measure::log_normal, py::arg("m"), py::arg("s"))
      .def_static(
          "atomic",
          [](const std::vector<std::pair<double, double>>& atoms) {
            std::vector<Atom> a;
            for (const auto& [w, x] : atoms) a.push_back({w, x});
            return Measure::atomic(a);
          },
          py::arg("atoms"), "Atoms as (weight, location) pairs.")
      .def_static("grid", [](std::vector<double> x, std::vector<double> f) { return Measure::grid(x, f); },
                  py::arg("x"), py::arg("f"))
      .def("density", &Measure::density, py::arg("x"))
      .def("cdf", &Measure::cdf, py::arg("x"))
      .def("has_density", &Measure::has_density)
      .def("support", [](const Measure& nu) { return interval_tuple(nu.support()); })
      .def("to_yaml", [](const Measure& nu) { return serialize_measure(spec_of(nu)); })
      .def("__repr__", [](const Measure& nu) { return "<Measure " + nu.describe() + ">"; });

  py::class_<DensityCurve>(m, "DensityCurve")
      .def_readonly("x", &DensityCurve::x)
      .def_readonly("q", &DensityCurve::q)
      .def_property_readonly("support", [](const DensityCurve& c) { return interval_list(c.support.intervals); })
      .def("integral", &DensityCurve::integral)
      .def("mean", &DensityCurve::mean)
      .def("__len__", [](const DensityCurve& c) { return c.x.size(); });

  m.def(
      "density_curve",
      [](const Measure& nu, double t, int points, std::optional<std::pair<double, double>> window) {
        CurveSpec spec{.points = points};
        if (window) spec.window = Interval{window->first, window->second};
        py::gil_scoped_release release;
        return density_curve(ZhongContext(nu, t), spec);
      },
      py::arg("measure"), py::arg("t"), py::arg("points") = 2048, py::arg("window") = py::none());
  m.def("density", [](const Measure& nu, double t, double x) { return density(ZhongContext(nu, t), x); },
        py::arg("measure"), py::arg("t"), py::arg("x"));

  py::class_<ModeReport>(m, "ModeReport")
      .def_property_readonly("verdict", [](const ModeReport& r) { return std::string(to_string(r.verdict)); })
      .def_readonly("num_local_maxima", &ModeReport::num_local_maxima)
      .def_readonly("modes", &ModeReport::modes)
      .def_readonly("max_level_crossings", &ModeReport::max_level_crossings)
      .def_readonly("resolution", &ModeReport::resolution)
      .def_readonly("note", &ModeReport::note);
  m.def(
      "is_log_unimodal", [](const Measure& nu, double eps) { return is_log_unimodal(nu, eps); }, py::arg("measure"),
      py::arg("hysteresis") = kDefaultHysteresis);
  m.def(
      "is_log_unimodal", [](const DensityCurve& c, double eps) { return is_log_unimodal(c, eps); },
      py::arg("curve"), py::arg("hysteresis") = kDefaultHysteresis);

  py::class_<PickReport>(m, "PickReport")
      .def_readonly("holds", &PickReport::holds)
      .def_readonly("evidence", &PickReport::evidence)
      .def_readonly("extreme", &PickReport::extreme)
      .def_property_readonly("violations", [](const PickReport& r) {
        py::list out;
        for (const auto& v : r.violations) out.append(py::make_tuple(v.z, v.value));
        return out;
      });
  m.def(
      "pick_inequality_check", [](const Measure& nu, double c) { return pick_inequality_check(nu, c); },
      py::arg("measure"), py::arg("c"));

  py::class_<StrongCheck>(m, "StrongCheck")
      .def_readonly("strongly_log_unimodal", &StrongCheck::strongly_log_unimodal)
      .def_readonly("witness", &StrongCheck::witness)
      .def_readonly("cos_b", &StrongCheck::cos_b);
  m.def("lambda_strong_check", &lambda_strong_check, py::arg("b"));

  py::class_<SolutionCount>(m, "SolutionCount")
      .def_readonly("count", &SolutionCount::count)
      .def_readonly("count_with_multiplicity", &SolutionCount::count_with_multiplicity)
      .def_readonly("locations", &SolutionCount::locations)
      .def_readonly("boundary", &SolutionCount::boundary);
  py::class_<CriterionReport>(m, "CriterionReport")
      .def_readonly("t", &CriterionReport::t)
      .def_readonly("R", &CriterionReport::R)
      .def_readonly("counts", &CriterionReport::counts)
      .def_readonly("max_count", &CriterionReport::max_count)
      .def_readonly("verdict", &CriterionReport::verdict);
  m.def("theta_R", [](const Measure& nu, double R, double r) { return theta_R(nu, R, r); }, py::arg("measure"),
        py::arg("R"), py::arg("r"));
  m.def(
      "theta_sweep",
      [](const Measure& nu, double t, std::optional<std::vector<double>> R) {
        py::gil_scoped_release release;
        return theta_sweep(nu, t, R ? *R : default_R_sweep());
      },
      py::arg("measure"), py::arg("t"), py::arg("R") = py::none());
  m.def("d_bound", &d_bound, py::arg("alpha"), py::arg("beta"));
  m.def(
      "mult_convolve", [](const Measure& a, const Measure& b) { return mult_convolve(a, b); }, py::arg("mu"),
      py::arg("nu"));

  py::class_<GapCertificate>(m, "GapCertificate")
      .def_readonly("k", &GapCertificate::k)
      .def_readonly("b_k", &GapCertificate::b_k)
      .def_readonly("f_at_b_k", &GapCertificate::f_at_bk)
      .def_readonly("below", &GapCertificate::below);
  m.def(
      "counterexample", [](int N, bool inverted) { return build_counterexample(N, example48_rules(), inverted).first; },
      py::arg("N") = 30, py::arg("inverted") = false);
  m.def(
      "first_gap_certificate", [](const Measure& nu, double t) { return first_gap_certificate(nu, t); },
      py::arg("measure"), py::arg("t"));

  m.def(
      "run_command",
      [](const std::string& config_yaml, const std::string& out_dir) {
        auto cfg = parse_config(config_yaml);
        cfg.outputs.dir = out_dir;
        CommandResult r;
        {
          py::gil_scoped_release release;
          r = run_command(cfg);
        }
        return py::make_tuple(r.exit_code, r.report.IsNull() ? std::string() : emit(r.report), r.files);
      },
      py::arg("config_yaml"), py::arg("out_dir"),
      "Runs one command config; returns (exit_code, report_yaml, files).");
  m.def(
      "run_scenario",
      [](const std::string& source, const std::string& out_dir) {
        CommandResult r;
        {
          py::gil_scoped_release release;
          r = cmd_scenario(source, out_dir);
        }
        return py::make_tuple(r.exit_code, r.report.IsNull() ? std::string() : emit(r.report), r.files);
      },
      py::arg("source"), py::arg("out_dir"));
}

#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cmcindex/cli.hpp"
#include "cmcindex/errors.hpp"
#include "cmcindex/index_engine.hpp"
#include "cmcindex/version.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace cmc;

namespace {

QuadratureSpec quadrature(int points, const std::string& rule) {
  return QuadratureSpec{points, parse_quadrature_rule(rule)};
}

py::dict index_dict(const IndexCount& c) {
  return py::dict("strong"_a = c.strong, "weak"_a = c.weak, "zeroModes"_a = c.zero_modes, "zeroTol"_a = c.zero_tol);
}

}  // namespace

PYBIND11_MODULE(_cmcindex, m) {
  m.doc() = "Morse index of closed-form CMC hypersurfaces in S^{n+1}";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<DegenerateChartError>(m, "DegenerateChartError", base.ptr());
  py::register_exception<UnsupportedFamilyError>(m, "UnsupportedFamilyError", base.ptr());
  py::register_exception<InsufficientEnumerationError>(m, "InsufficientEnumerationError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<InvariantViolation>(m, "InvariantViolation", base.ptr());

  py::class_<AnalyticFamily>(m, "Family")
      .def_static("round_sphere", py::overload_cast<int, double, int>(&AnalyticFamily::round_sphere), "n"_a, "r"_a,
                  "orientation"_a = 1)
      .def_static(
          "round_sphere_exact",
          [](int n, const std::string& r2, int orientation) {
            return AnalyticFamily::round_sphere(n, parse_rational(r2), orientation);
          },
          "n"_a, "r2"_a, "orientation"_a = 1)
      .def_static("clifford_torus", py::overload_cast<int, int, double, int>(&AnalyticFamily::clifford_torus), "n"_a,
                  "k"_a, "r"_a, "orientation"_a = 1)
      .def_static(
          "clifford_torus_exact",
          [](int n, int k, const std::string& r2, int orientation) {
            return AnalyticFamily::clifford_torus(n, k, parse_rational(r2), orientation);
          },
          "n"_a, "k"_a, "r2"_a, "orientation"_a = 1)
      .def_static("minimal_clifford", &AnalyticFamily::minimal_clifford, "n"_a, "k"_a, "orientation"_a = 1)
      .def_property_readonly("n", &AnalyticFamily::n)
      .def_property_readonly("k", &AnalyticFamily::k)
      .def_property_readonly("r", &AnalyticFamily::r)
      .def_property_readonly("orientation", &AnalyticFamily::orientation)
      .def_property_readonly("is_sphere", &AnalyticFamily::is_sphere)
      .def_property_readonly("label", &AnalyticFamily::label)
      .def("__repr__", &AnalyticFamily::label);

  m.def("builtin_families", &builtin_families);

  m.def("curvature_invariants", [](const AnalyticFamily& f) {
    const CurvatureInvariants c = curvature_invariants(f);
    return py::dict("meanCurvature"_a = c.mean_curvature, "normA2"_a = c.norm_a2, "normPhi2"_a = c.norm_phi2,
                    "hypothesisGap"_a = c.hypothesis_gap);
  });
  m.def("position", &position, "family"_a, "u"_a);
  m.def("normal", &normal, "family"_a, "u"_a);
  m.def("principal_curvatures", &principal_curvatures);

  m.def(
      "stability_modes",
      [](const AnalyticFamily& f, double cutoff) {
        py::list out;
        for (const Mode& mode : stability_modes(f, cutoff).modes) {
          out.append(py::dict("label"_a = mode.label.str(), "eigenvalue"_a = mode.eigenvalue,
                              "multiplicity"_a = mode.multiplicity));
        }
        return out;
      },
      "family"_a, "cutoff"_a = 1.0);

  m.def(
      "compute_index",
      [](const AnalyticFamily& f, const std::string& engine, double cutoff, std::optional<double> zero_tol, int mesh) {
        IndexParams p;
        p.cutoff = cutoff;
        p.zero_tol = zero_tol;
        p.mesh_m1 = p.mesh_m2 = mesh;
        const Engine e = parse_engine(engine);
        IndexCount c;
        {
          py::gil_scoped_release release;
          c = compute_index(f, e, p);
        }
        return index_dict(c);
      },
      "family"_a, "engine"_a = "closed", "cutoff"_a = 1.0, "zero_tol"_a = py::none(), "mesh"_a = 64);

  m.def(
      "weak_index_sweep",
      [](int n, int k, const std::vector<double>& radii) {
        py::list out;
        for (const auto& [r, c] : weak_index_sweep(n, k, radii)) {
          py::dict row = index_dict(c);
          row["r"] = r;
          out.append(row);
        }
        return out;
      },
      "n"_a, "k"_a, "radii"_a);

  m.def(
      "identity_residuals",
      [](const AnalyticFamily& f, const Eigen::VectorXd& v, int samples) {
        const IdentityResidualReport r = identity_residuals(f, v, samples);
        return py::dict("maxHessL"_a = r.max_hess_l, "maxHessF"_a = r.max_hess_f, "maxLapL"_a = r.max_lap_l,
                        "maxLapF"_a = r.max_lap_f, "maxJPsi"_a = r.max_j_psi, "evaluated"_a = r.evaluated,
                        "skipped"_a = r.skipped);
      },
      "family"_a, "v"_a, "samples"_a = 200);

  m.def(
      "q_psi",
      [](const AnalyticFamily& f, const Eigen::VectorXd& v, int points, const std::string& rule) {
        return q_form(f, TestFunction::psi(v), quadrature(points, rule)).value;
      },
      "family"_a, "v"_a, "points"_a = 256, "rule"_a = "trapezoid");

  m.def(
      "proposition_check",
      [](const AnalyticFamily& f, int points, const std::string& rule) {
        const PropositionCheck c = proposition_check(f, quadrature(points, rule));
        return py::dict("lhs"_a = c.lhs, "rhs"_a = c.rhs, "relResidual"_a = c.rel_residual);
      },
      "family"_a, "points"_a = 256, "rule"_a = "trapezoid");

  m.def(
      "gram_rank",
      [](const AnalyticFamily& f, int points, double rank_tol) {
        return lemma_gram_check(f, quadrature(points, "trapezoid"), rank_tol).rank;
      },
      "family"_a, "points"_a = 256, "rank_tol"_a = kDefaultRankTol);

  m.def(
      "theorem_check",
      [](const AnalyticFamily& f, const std::string& engine, int points) {
        TheoremOptions o;
        o.engine = parse_engine(engine);
        o.quadrature = quadrature(points, "trapezoid");
        const TheoremReport t = theorem_check(f, o);
        py::dict d("caseApplied"_a = to_string(t.case_applied), "hypothesisGap"_a = t.hypothesis_gap,
                   "absH"_a = t.abs_h, "perBasisIntegralSign"_a = t.per_basis_integral_sign,
                   "computedWeakIndex"_a = t.computed_weak_index, "consistent"_a = t.consistent);
        d["predictedLowerBound"] = t.predicted_lower_bound ? py::object(py::int_(*t.predicted_lower_bound)) : py::none();
        return d;
      },
      "family"_a, "engine"_a = "closed", "points"_a = 256);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      "args"_a, "Runs a CLI subcommand in-process; returns (exit_code, stdout, stderr).");
}

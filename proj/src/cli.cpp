#include "cmcindex/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "cmcindex/closed_spectrum.hpp"
#include "cmcindex/errors.hpp"
#include "cmcindex/fem.hpp"
#include "cmcindex/geometry.hpp"
#include "cmcindex/index_engine.hpp"
#include "cmcindex/support.hpp"
#include "cmcindex/svg_plot.hpp"
#include "cmcindex/version.hpp"

namespace cmc::cli {

namespace {

void ensure_parent(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  if (ec) throw ParameterError("cannot create '" + parent.string() + "': " + ec.message());
}

using json = nlohmann::json;

struct RunConfig {
  std::string command;
  bool family_given = false;
  std::string family = "clifford";
  int n = 2;
  int k = 1;
  std::optional<double> r;
  std::optional<std::string> r2;
  int orientation = 1;
  std::string engine = "closed";
  int m1 = 64;
  int m2 = 64;
  QuadratureSpec quadrature;
  double cutoff = 1.0;
  std::optional<double> zero_tol;
  std::string format = "json";
  std::string output;
  bool plot = false;
  double r_min = 0.3;
  double r_max = 0.95;
  int steps = 27;
  int samples = 200;
  int count = 8;
  std::string export_pencil;
  std::vector<double> u;
};

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json config_json(const RunConfig& c) {
  json family = {{"kind", c.family_given ? json(c.family) : json(nullptr)},
                 {"n", c.n},
                 {"k", c.family == "clifford" ? json(c.k) : json(nullptr)},
                 {"r", optional_json(c.r)},
                 {"r2", c.r2 ? json(*c.r2) : json(nullptr)},
                 {"orientation", c.orientation}};
  return {{"command", c.command},
          {"family", family},
          {"engine", c.engine},
          {"mesh", {c.m1, c.m2}},
          {"quadrature", {{"pointsPerDim", c.quadrature.points_per_dim},
                          {"rule", to_string(c.quadrature.rule)}}},
          {"cutoff", c.cutoff},
          {"zeroTol", optional_json(c.zero_tol)},
          {"format", c.format},
          {"output", c.output.empty() ? json(nullptr) : json(c.output)},
          {"plot", c.plot},
          {"sweep", {{"rMin", c.r_min}, {"rMax", c.r_max}, {"steps", c.steps}}},
          {"samples", c.samples},
          {"count", c.count},
          {"u", c.u}};
}

template <class T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<T>();
}

template <class T>
void take(const json& j, const char* key, std::optional<T>& field) {
  if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<T>();
}

void apply_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
    if (j.contains("family") && j["family"].is_object()) {
      const json& f = j["family"];
      if (f.contains("kind") && !f["kind"].is_null()) {
        c.family = f["kind"].get<std::string>();
        c.family_given = true;
      }
      take(f, "n", c.n);
      take(f, "k", c.k);
      take(f, "r", c.r);
      take(f, "r2", c.r2);
      take(f, "orientation", c.orientation);
    }
    take(j, "engine", c.engine);
    if (j.contains("mesh") && j["mesh"].is_array() && j["mesh"].size() == 2) {
      c.m1 = j["mesh"][0].get<int>();
      c.m2 = j["mesh"][1].get<int>();
    }
    if (j.contains("quadrature") && j["quadrature"].is_object()) {
      take(j["quadrature"], "pointsPerDim", c.quadrature.points_per_dim);
      if (j["quadrature"].contains("rule")) {
        c.quadrature.rule = parse_quadrature_rule(j["quadrature"]["rule"].get<std::string>());
      }
    }
    take(j, "cutoff", c.cutoff);
    take(j, "zeroTol", c.zero_tol);
    take(j, "format", c.format);
    take(j, "output", c.output);
    take(j, "plot", c.plot);
    if (j.contains("sweep") && j["sweep"].is_object()) {
      take(j["sweep"], "rMin", c.r_min);
      take(j["sweep"], "rMax", c.r_max);
      take(j["sweep"], "steps", c.steps);
    }
    take(j, "samples", c.samples);
    take(j, "count", c.count);
    take(j, "u", c.u);
  } catch (const json::exception& e) {
    throw ParameterError("invalid config file '" + path + "': " + e.what());
  }
}

void validate(RunConfig& c) {
  if (c.family != "sphere" && c.family != "clifford") {
    throw ParameterError("--family must be 'sphere' or 'clifford'");
  }
  if (c.r && c.r2) throw ParameterError("give either --r or --r2, not both");
  parse_engine(c.engine);
  if (c.format != "json" && c.format != "csv") throw ParameterError("--format must be json or csv");
  if (c.format == "csv" && c.command != "sweep" && c.command != "spectrum" && c.command != "index") {
    throw ParameterError("csv output is available for sweep, spectrum and index");
  }
  if (c.m1 < 4 || c.m2 < 4) throw ParameterError("mesh needs at least 4 nodes per period");
  if (c.quadrature.points_per_dim < 2) throw ParameterError("--points must be at least 2");
  if (!(c.cutoff > 0.0)) throw ParameterError("--cutoff must be positive");
  if (c.zero_tol && !(*c.zero_tol >= 0.0)) throw ParameterError("--zero-tol must be non-negative");
  if (c.samples < 1) throw ParameterError("--samples must be at least 1");
  if (c.count < 1) throw ParameterError("--count must be at least 1");
  if (c.command == "sweep") {
    if (c.family != "clifford") throw ParameterError("sweep runs over Clifford tori");
    if (c.steps < 2) throw ParameterError("--steps must be at least 2");
    if (!(c.r_min > 0.0 && c.r_max < 1.0 && c.r_min < c.r_max)) {
      throw ParameterError("sweep needs 0 < r-min < r-max < 1");
    }
  }
  if (!c.export_pencil.empty() && c.engine != "fem") {
    throw ParameterError("--export-pencil needs --engine fem");
  }
}

AnalyticFamily make_family(const RunConfig& c) {
  if (c.family == "sphere") {
    if (c.r2) return AnalyticFamily::round_sphere(c.n, parse_rational(*c.r2), c.orientation);
    return AnalyticFamily::round_sphere(c.n, c.r.value_or(1.0), c.orientation);
  }
  if (c.r2) return AnalyticFamily::clifford_torus(c.n, c.k, parse_rational(*c.r2), c.orientation);
  if (c.r) return AnalyticFamily::clifford_torus(c.n, c.k, *c.r, c.orientation);
  return AnalyticFamily::minimal_clifford(c.n, c.k, c.orientation);
}

IndexParams index_params(const RunConfig& c) {
  IndexParams p;
  p.cutoff = c.cutoff;
  p.zero_tol = c.zero_tol;
  p.mesh_m1 = c.m1;
  p.mesh_m2 = c.m2;
  return p;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
  return rows;
}

json family_json(const AnalyticFamily& f) {
  json j = {{"label", f.label()},
            {"kind", f.is_sphere() ? "sphere" : "clifford"},
            {"n", f.n()},
            {"k", f.is_torus() ? json(f.k()) : json(nullptr)},
            {"r", f.r()},
            {"orientation", f.orientation()}};
  j["r2"] = f.r2() ? json(std::to_string(f.r2()->num) + "/" + std::to_string(f.r2()->den))
                   : json(nullptr);
  return j;
}

json index_json(const IndexCount& c) {
  return {{"strong", c.strong}, {"weak", c.weak}, {"zeroModes", c.zero_modes}, {"zeroTol", c.zero_tol}};
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Outcome {
  json result = json::object();
  json residuals = json::object();
  std::string csv;
  std::string svg;
  int exit = kOk;
};

Outcome cmd_geometry(const RunConfig& c) {
  const AnalyticFamily family = make_family(c);
  ChartPoint u(family.n());
  if (!c.u.empty()) {
    if (static_cast<int>(c.u.size()) != family.n()) {
      throw ParameterError("--u needs " + std::to_string(family.n()) + " chart coordinates");
    }
    for (int i = 0; i < family.n(); ++i) u[i] = c.u[i];
  } else {
    const auto kinds = chart_layout(family);
    for (int i = 0; i < family.n(); ++i) u[i] = kinds[i] == AngleKind::Polar ? std::numbers::pi / 2 : 0.0;
  }
  const GeometryFrame fr = frame(family, u);
  const CurvatureInvariants inv = curvature_invariants(family);
  Outcome o;
  o.result = {{"family", family_json(family)},
              {"meanCurvature", inv.mean_curvature},
              {"absH", std::abs(inv.mean_curvature)},
              {"normA2", inv.norm_a2},
              {"normPhi2", inv.norm_phi2},
              {"hypothesisGap", inv.hypothesis_gap},
              {"principalCurvatures", principal_curvatures(family)},
              {"umbilical", is_umbilical(family)},
              {"frame",
               {{"u", vector_json(u)},
                {"position", vector_json(fr.position)},
                {"normal", vector_json(fr.normal)},
                {"metric", matrix_json(fr.metric)},
                {"shape", matrix_json(fr.shape)},
                {"meanCurvature", fr.mean_curvature},
                {"normA2", fr.norm_a2},
                {"normPhi2", fr.norm_phi2}}}};
  const Eigen::MatrixXd second = fr.metric * fr.shape;
  o.residuals = {{"unitPosition", std::abs(fr.position.norm() - 1.0)},
                 {"unitNormal", std::abs(fr.normal.norm() - 1.0)},
                 {"normalPosition", std::abs(fr.normal.dot(fr.position))},
                 {"shapeSelfAdjoint", (second - second.transpose()).cwiseAbs().maxCoeff()},
                 {"meanCurvatureClosedForm", std::abs(fr.mean_curvature - inv.mean_curvature)}};
  return o;
}

Outcome cmd_spectrum(const RunConfig& c) {
  const AnalyticFamily family = make_family(c);
  Outcome o;
  if (parse_engine(c.engine) == Engine::Closed) {
    const ModeSpectrum spectrum = stability_modes(family, c.cutoff);
    json modes = json::array();
    o.csv = "label,eigenvalue,multiplicity\n";
    for (const Mode& m : spectrum.modes) {
      json label = json::array({m.label.p});
      if (m.label.q) label.push_back(*m.label.q);
      modes.push_back({{"label", label}, {"eigenvalue", m.eigenvalue}, {"multiplicity", m.multiplicity},
                       {"exactSign", m.exact_sign ? json(*m.exact_sign) : json(nullptr)}});
      o.csv += "\"" + m.label.str() + "\"," + csv_number(m.eigenvalue) + "," +
               std::to_string(m.multiplicity) + "\n";
    }
    o.result = {{"family", family_json(family)},
                {"engine", "closed"},
                {"potential", spectrum.potential},
                {"cutoff", spectrum.cutoff},
                {"modes", modes}};
    return o;
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const fem::StabilityPencil pencil = fem::assemble(family, fem::build_mesh(c.m1, c.m2, {two_pi, two_pi}));
  const fem::PencilSpectrum spectrum = fem::eigen_solve(pencil, c.count);
  json exported = json::array();
  if (!c.export_pencil.empty()) {
    ensure_parent(c.export_pencil);
    for (const std::string& path : fem::export_pencil(pencil, c.export_pencil)) exported.push_back(path);
  }
  o.csv = "index,eigenvalue\n";
  for (int i = 0; i < spectrum.count_computed; ++i) {
    o.csv += std::to_string(i) + "," + csv_number(spectrum.eigenvalues[i]) + "\n";
  }
  o.result = {{"family", family_json(family)},
              {"engine", "fem"},
              {"mesh", {c.m1, c.m2}},
              {"eigenvalues", vector_json(spectrum.eigenvalues)},
              {"exported", exported}};
  o.residuals = {{"maxEigenResidual", spectrum.max_residual}, {"iterations", spectrum.iterations}};
  return o;
}

Outcome cmd_index(const RunConfig& c) {
  const AnalyticFamily family = make_family(c);
  const Engine engine = parse_engine(c.engine);
  const IndexCount count = compute_index(family, engine, index_params(c));
  Outcome o;
  o.result = index_json(count);
  o.result["engine"] = to_string(engine);
  o.result["family"] = family_json(family);
  o.csv = "strong,weak,zeroModes\n" + std::to_string(count.strong) + "," + std::to_string(count.weak) +
          "," + std::to_string(count.zero_modes) + "\n";
  return o;
}

json check_json(double value, double threshold, bool pass) {
  return {{"value", value}, {"threshold", threshold}, {"pass", pass}};
}

json verify_family(const AnalyticFamily& family, const RunConfig& c, const QuadratureSpec& quad,
                   json& worst, bool& all_pass) {
  constexpr double kPointwiseTol = 1e-5;
  constexpr double kMeanZeroTol = 1e-10;
  constexpr double kPropositionTol = 1e-6;
  constexpr double kIntegralTol = 1e-8;

  const int n = family.n();
  const int D = family.ambient_dim();
  IdentityResidualReport ir;
  for (int i = 0; i < D; ++i) {
    const IdentityResidualReport r = identity_residuals(family, basis_vector(family, i), c.samples);
    ir.max_hess_l = std::max(ir.max_hess_l, r.max_hess_l);
    ir.max_hess_f = std::max(ir.max_hess_f, r.max_hess_f);
    ir.max_lap_l = std::max(ir.max_lap_l, r.max_lap_l);
    ir.max_lap_f = std::max(ir.max_lap_f, r.max_lap_f);
    ir.max_j_psi = std::max(ir.max_j_psi, r.max_j_psi);
    ir.evaluated += r.evaluated;
    ir.skipped += r.skipped;
  }
  const SupportMoments moments = support_moments(family, quad);
  const double H = curvature_invariants(family).mean_curvature;
  double mean_zero = 0.0;
  double integral_identity = 0.0;
  double psi_split = 0.0;
  for (int i = 0; i < D; ++i) {
    mean_zero = std::max(mean_zero, std::abs(moments.psi_mean[i]) / moments.area);
    const double lhs = n * H * moments.lf(i, i);
    const double rhs = -moments.grad_ll(i, i) + n * moments.ll(i, i);
    integral_identity = std::max(integral_identity, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    const double split = -moments.phi_ll(i, i) + moments.phi_h_lf(i, i);
    psi_split = std::max(psi_split, std::abs(moments.q(i, i) - split) / (1.0 + std::abs(moments.q(i, i))));
  }
  const PropositionCheck prop = proposition_check(moments);
  const CorollaryCheck cor = corollary_check(family, moments);
  const GramReport gram = lemma_gram_check(moments, kDefaultRankTol);
  const bool umbilical = is_umbilical(family);

  json checks;
  checks["hessL"] = check_json(ir.max_hess_l, kPointwiseTol, ir.max_hess_l <= kPointwiseTol);
  checks["hessF"] = check_json(ir.max_hess_f, kPointwiseTol, ir.max_hess_f <= kPointwiseTol);
  checks["lapL"] = check_json(ir.max_lap_l, kPointwiseTol, ir.max_lap_l <= kPointwiseTol);
  checks["lapF"] = check_json(ir.max_lap_f, kPointwiseTol, ir.max_lap_f <= kPointwiseTol);
  checks["jPsi"] = check_json(ir.max_j_psi, kPointwiseTol, ir.max_j_psi <= kPointwiseTol);
  checks["meanZero"] = check_json(mean_zero, kMeanZeroTol, mean_zero <= kMeanZeroTol);
  checks["psiSplit"] = check_json(psi_split, kIntegralTol, psi_split <= kIntegralTol);
  checks["integralIdentity"] = check_json(integral_identity, kIntegralTol, integral_identity <= kIntegralTol);
  checks["proposition"] = {{"lhs", prop.lhs}, {"rhs", prop.rhs}, {"value", prop.rel_residual},
                           {"threshold", kPropositionTol}, {"pass", prop.rel_residual <= kPropositionTol}};
  checks["corollary"] = {{"witness", cor.witness ? json(*cor.witness + 1) : json(nullptr)},
                         {"qValues", cor.q_values},
                         {"pass", cor.witness.has_value() == !umbilical}};
  const bool rank_ok = umbilical ? gram.rank < D : gram.rank == D;
  checks["lemmaRank"] = {{"rank", gram.rank}, {"expected", umbilical ? n + 1 : n + 2},
                         {"rankTol", gram.rank_tol}, {"pass", rank_ok}};
  bool pass = true;
  for (auto it = checks.begin(); it != checks.end(); ++it) pass = pass && it.value()["pass"].get<bool>();
  all_pass = all_pass && pass;

  auto bump = [&](const char* key, double v) { worst[key] = std::max(worst.value(key, 0.0), v); };
  bump("maxHessL", ir.max_hess_l);
  bump("maxHessF", ir.max_hess_f);
  bump("maxLapL", ir.max_lap_l);
  bump("maxLapF", ir.max_lap_f);
  bump("maxJPsi", ir.max_j_psi);
  bump("maxMeanZero", mean_zero);
  bump("maxProposition", prop.rel_residual);
  bump("maxIntegralIdentity", integral_identity);
  bump("maxPsiSplit", psi_split);

  return {{"family", family_json(family)},
          {"samplesEvaluated", ir.evaluated},
          {"samplesSkipped", ir.skipped},
          {"quadrature", {{"pointsPerDim", quad.points_per_dim}, {"rule", to_string(quad.rule)}}},
          {"checks", checks},
          {"pass", pass}};
}

Outcome cmd_verify(const RunConfig& c) {
  std::vector<AnalyticFamily> families;
  if (c.family_given) {
    families.push_back(make_family(c));
  } else {
    families = builtin_families();
  }
  Outcome o;
  json list = json::array();
  json worst = json::object();
  bool all_pass = true;
  for (const AnalyticFamily& family : families) {
    const QuadratureSpec quad = c.family_given ? c.quadrature : suite_quadrature(family);
    list.push_back(verify_family(family, c, quad, worst, all_pass));
  }
  o.result = {{"families", list}, {"allPass", all_pass}};
  o.residuals = worst;
  o.exit = all_pass ? kOk : kInvariantViolation;
  return o;
}

json theorem_json(const AnalyticFamily& family, const TheoremReport& t) {
  return {{"family", family_json(family)},
          {"hypothesisGap", t.hypothesis_gap},
          {"absH", t.abs_h},
          {"caseApplied", to_string(t.case_applied)},
          {"perBasisIntegralSign", t.per_basis_integral_sign},
          {"worstGeMargin", t.worst_ge_margin},
          {"worstLeMargin", t.worst_le_margin},
          {"randomVectors", t.random_vectors},
          {"predictedLowerBound", t.predicted_lower_bound ? json(*t.predicted_lower_bound) : json(nullptr)},
          {"computedWeakIndex", t.computed_weak_index},
          {"strong", t.computed.strong},
          {"weak", t.computed.weak},
          {"zeroModes", t.computed.zero_modes},
          {"consistent", t.consistent},
          {"case1", t.case1_bound_holds ? json{{"q", t.case1_q}, {"bound", t.case1_bound},
                                               {"holds", *t.case1_bound_holds}}
                                        : json(nullptr)}};
}

Outcome cmd_theorem(const RunConfig& c) {
  const AnalyticFamily family = make_family(c);
  TheoremOptions options;
  options.engine = parse_engine(c.engine);
  options.index = index_params(c);
  options.quadrature = c.quadrature;
  const TheoremReport t = theorem_check(family, options);
  Outcome o;
  o.result = theorem_json(family, t);
  o.residuals = {{"worstGeMargin", t.worst_ge_margin}, {"worstLeMargin", t.worst_le_margin}};
  const bool violated = !t.consistent || (t.case1_bound_holds && !*t.case1_bound_holds);
  o.exit = violated ? kInvariantViolation : kOk;
  return o;
}

Outcome cmd_sweep(const RunConfig& c) {
  const Engine engine = parse_engine(c.engine);
  const IndexParams params = index_params(c);
  std::vector<double> radii;
  for (int i = 0; i < c.steps; ++i) radii.push_back(c.r_min + (c.r_max - c.r_min) * i / (c.steps - 1));

  struct Row {
    IndexCount count;
    CurvatureInvariants inv;
  };
  std::vector<Row> rows(radii.size());
  parallel::for_each_index(radii.size(), [&](std::size_t i) {
    const AnalyticFamily family = AnalyticFamily::clifford_torus(c.n, c.k, radii[i], c.orientation);
    rows[i] = {compute_index(family, engine, params), curvature_invariants(family)};
  });

  Outcome o;
  json list = json::array();
  o.csv = "r,strong,weak,zeroModes,absH,hypothesisGap\n";
  std::vector<double> weak;
  std::vector<double> abs_h;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const Row& row = rows[i];
    const double h = std::abs(row.inv.mean_curvature);
    list.push_back({{"r", radii[i]}, {"strong", row.count.strong}, {"weak", row.count.weak},
                    {"zeroModes", row.count.zero_modes}, {"absH", h},
                    {"hypothesisGap", row.inv.hypothesis_gap}});
    o.csv += csv_number(radii[i]) + "," + std::to_string(row.count.strong) + "," +
             std::to_string(row.count.weak) + "," + std::to_string(row.count.zero_modes) + "," +
             csv_number(h) + "," + csv_number(row.inv.hypothesis_gap) + "\n";
    weak.push_back(row.count.weak);
    abs_h.push_back(h);
  }
  o.result = {{"n", c.n}, {"k", c.k}, {"engine", to_string(engine)}, {"rows", list}};
  if (c.plot) {
    char title[96];
    std::snprintf(title, sizeof title, "Clifford tori S^%d x S^%d: weak index and |H|", c.k, c.n - c.k);
    o.svg = render_svg_plot(title, "r", radii,
                            {{"weak index", "#1f77b4", weak, true}, {"|H|", "#d62728", abs_h, false}});
  }
  return o;
}

void write_atomic(const std::string& path, const std::string& content) {
  ensure_parent(path);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ParameterError("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw ParameterError("failed writing '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ParameterError("cannot move output into '" + path + "': " + ec.message());
}

json versions_json() {
  return {{"cmcindex", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message, int code,
                 std::optional<double> best_residual = std::nullopt) {
  json j = {{"error", kind}, {"message", message}, {"exitCode", code}};
  if (best_residual) j["bestResidual"] = std::isfinite(*best_residual) ? json(*best_residual) : json(nullptr);
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string config_path;
  std::vector<std::function<void(RunConfig&)>> overrides;

  CLI::App app{"Morse index of CMC hypersurfaces in the unit sphere"};
  app.name("cmcindex");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration; flags override it");
    sub->add_option_function<std::string>(
        "--family", [&](const std::string& v) { overrides.push_back([v](RunConfig& c) { c.family = v; c.family_given = true; }); },
        "sphere | clifford");
    sub->add_option_function<int>("--n", [&](const int& v) { overrides.push_back([v](RunConfig& c) { c.n = v; }); },
                                  "hypersurface dimension");
    sub->add_option_function<int>("--k", [&](const int& v) { overrides.push_back([v](RunConfig& c) { c.k = v; }); },
                                  "first Clifford factor dimension");
    sub->add_option_function<double>("--r", [&](const double& v) { overrides.push_back([v](RunConfig& c) { c.r = v; }); },
                                      "radius (floating point)");
    sub->add_option_function<std::string>(
        "--r2", [&](const std::string& v) { overrides.push_back([v](RunConfig& c) { c.r2 = v; }); },
        "exact squared radius p/q or decimal");
    sub->add_option_function<int>(
        "--orientation", [&](const int& v) { overrides.push_back([v](RunConfig& c) { c.orientation = v; }); },
        "+1 or -1");
    sub->add_option_function<std::string>(
        "--engine", [&](const std::string& v) { overrides.push_back([v](RunConfig& c) { c.engine = v; }); },
        "closed | fem");
    sub->add_option_function<int>(
        "--mesh", [&](const int& v) { overrides.push_back([v](RunConfig& c) { c.m1 = c.m2 = v; }); },
        "FEM nodes per period in both directions");
    sub->add_option_function<int>("--m1", [&](const int& v) { overrides.push_back([v](RunConfig& c) { c.m1 = v; }); },
                                  "FEM nodes along the first period");
    sub->add_option_function<int>("--m2", [&](const int& v) { overrides.push_back([v](RunConfig& c) { c.m2 = v; }); },
                                  "FEM nodes along the second period");
    sub->add_option_function<int>(
        "--points", [&](const int& v) { overrides.push_back([v](RunConfig& c) { c.quadrature.points_per_dim = v; }); },
        "quadrature points per chart dimension");
    sub->add_option_function<std::string>(
        "--rule",
        [&](const std::string& v) {
          overrides.push_back([v](RunConfig& c) { c.quadrature.rule = parse_quadrature_rule(v); });
        },
        "trapezoid | gauss");
    sub->add_option_function<double>(
        "--cutoff", [&](const double& v) { overrides.push_back([v](RunConfig& c) { c.cutoff = v; }); },
        "mode enumeration cutoff above zero");
    sub->add_option_function<double>(
        "--zero-tol", [&](const double& v) { overrides.push_back([v](RunConfig& c) { c.zero_tol = v; }); },
        "zero-eigenvalue tolerance");
    sub->add_option_function<std::string>(
        "--format", [&](const std::string& v) { overrides.push_back([v](RunConfig& c) { c.format = v; }); },
        "json | csv");
    sub->add_option_function<std::string>(
        "--output,-o", [&](const std::string& v) { overrides.push_back([v](RunConfig& c) { c.output = v; }); },
        "write the report to this file");
  };

  CLI::App* geometry = app.add_subcommand("geometry", "pointwise geometry and curvature invariants");
  CLI::App* spectrum = app.add_subcommand("spectrum", "stability spectrum (closed modes or FEM eigenvalues)");
  CLI::App* index = app.add_subcommand("index", "strong and weak Morse index");
  CLI::App* verify = app.add_subcommand("verify", "identity suite on one family or the built-in catalog");
  CLI::App* theorem = app.add_subcommand("theorem", "index lower-bound hypotheses and conclusion");
  CLI::App* sweep = app.add_subcommand("sweep", "index over a range of Clifford radii");
  for (CLI::App* sub : {geometry, spectrum, index, verify, theorem, sweep}) add_common(sub);

  geometry->add_option_function<std::vector<double>>(
      "--u", [&](const std::vector<double>& v) { overrides.push_back([v](RunConfig& c) { c.u = v; }); },
      "chart point")->delimiter(',');
  spectrum->add_option_function<int>(
      "--count", [&](const int& v) { overrides.push_back([v](RunConfig& c) { c.count = v; }); },
      "FEM eigenpairs");
  spectrum->add_option_function<std::string>(
      "--export-pencil",
      [&](const std::string& v) { overrides.push_back([v](RunConfig& c) { c.export_pencil = v; }); },
      "write K, M, V in symmetric coordinate format with this prefix");
  verify->add_option_function<int>(
      "--samples", [&](const int& v) { overrides.push_back([v](RunConfig& c) { c.samples = v; }); },
      "finite-difference sample points per basis vector");
  sweep->add_option_function<double>(
      "--r-min", [&](const double& v) { overrides.push_back([v](RunConfig& c) { c.r_min = v; }); }, "smallest radius");
  sweep->add_option_function<double>(
      "--r-max", [&](const double& v) { overrides.push_back([v](RunConfig& c) { c.r_max = v; }); }, "largest radius");
  sweep->add_option_function<int>(
      "--steps", [&](const int& v) { overrides.push_back([v](RunConfig& c) { c.steps = v; }); }, "number of radii");
  sweep->add_flag_function(
      "--plot", [&](std::int64_t) { overrides.push_back([](RunConfig& c) { c.plot = true; }); },
      "write an SVG of weak index and |H| against r");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "parameter", e.what(), kValidation);
    return kValidation;
  } catch (const Error& e) {
    print_error(err, e.kind(), e.what(), kValidation);
    return kValidation;
  }

  for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    if (!config_path.empty()) apply_config_file(config_path, cfg);
    for (const auto& apply : overrides) apply(cfg);
    validate(cfg);

    Outcome o;
    if (cfg.command == "geometry") o = cmd_geometry(cfg);
    else if (cfg.command == "spectrum") o = cmd_spectrum(cfg);
    else if (cfg.command == "index") o = cmd_index(cfg);
    else if (cfg.command == "verify") o = cmd_verify(cfg);
    else if (cfg.command == "theorem") o = cmd_theorem(cfg);
    else o = cmd_sweep(cfg);

    std::string text;
    if (cfg.format == "csv") {
      text = o.csv;
    } else {
      const json report = {{"config", config_json(cfg)},
                           {"result", o.result},
                           {"residuals", o.residuals},
                           {"versions", versions_json()}};
      text = report.dump(2) + "\n";
    }
    if (cfg.output.empty()) {
      out << text;
    } else {
      write_atomic(cfg.output, text);
    }
    if (!o.svg.empty()) {
      const std::string svg_path = cfg.output.empty()
                                       ? std::string("sweep.svg")
                                       : std::filesystem::path(cfg.output).replace_extension(".svg").string();
      write_atomic(svg_path, o.svg);
    }
    if (o.exit == kInvariantViolation) {
      print_error(err, "invariant_violation", cfg.command + " reported a violated invariant", o.exit);
    }
    return o.exit;
  } catch (const ConvergenceError& e) {
    print_error(err, e.kind(), e.what(), kNonConvergence, e.best_residual());
    return kNonConvergence;
  } catch (const InvariantViolation& e) {
    print_error(err, e.kind(), e.what(), kInvariantViolation);
    return kInvariantViolation;
  } catch (const Error& e) {
    print_error(err, e.kind(), e.what(), kValidation);
    return kValidation;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what(), kInvariantViolation);
    return kInvariantViolation;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace cmc::cli

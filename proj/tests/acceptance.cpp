// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmcindex/cli.hpp"
#include "cmcindex/index_engine.hpp"

using json = nlohmann::json;
using namespace cmc;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct CliRun {
  int code;
  json report;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  json report;
  if (!out.str().empty()) report = json::parse(out.str(), nullptr, false);
  return {code, report};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome equator_index() {
  Outcome o;
  int checked = 0;
  for (int n = 2; n <= 12; ++n) {
    const CliRun r = cli({"index", "--family", "sphere", "--n", std::to_string(n), "--r2", "1", "--engine", "closed"});
    const bool ok = r.code == 0 && r.report["result"]["strong"] == 1 && r.report["result"]["weak"] == 0;
    if (!ok) {
      o.pass = false;
      o.detail += "n=" + std::to_string(n) + " wrong; ";
    }
    ++checked;
  }
  o.detail += std::to_string(checked) + " equators, strong=1 weak=0";
  return o;
}

Outcome minimal_clifford_index() {
  Outcome o;
  int checked = 0;
  for (int n = 2; n <= 12; ++n) {
    for (int k = 1; k < n; ++k) {
      const IndexCount c = compute_index(AnalyticFamily::minimal_clifford(n, k), Engine::Closed);
      if (c.strong != n + 3 || c.weak != n + 2) {
        o.pass = false;
        o.detail += "n=" + std::to_string(n) + ",k=" + std::to_string(k) + " gives " + std::to_string(c.strong) +
                    "/" + std::to_string(c.weak) + "; ";
      }
      ++checked;
    }
  }
  o.detail += std::to_string(checked) + " tori, strong=n+3 weak=n+2";
  return o;
}

Outcome fem_closed_agreement() {
  Outcome o;
  struct Case {
    double r;
    RationalSquare r2;
  };
  const std::vector<Case> cases = {{0.45, {81, 400}}, {0.5, {1, 4}},     {0.6, {9, 25}},
                                   {1 / std::sqrt(2.0), {1, 2}}, {0.8, {16, 25}}, {0.87, {7569, 10000}}};
  IndexParams fem_params;
  fem_params.mesh_m1 = fem_params.mesh_m2 = 96;
  for (const Case& c : cases) {
    const IndexCount closed = compute_index(AnalyticFamily::clifford_torus(2, 1, c.r2), Engine::Closed);
    const IndexCount fem = compute_index(AnalyticFamily::clifford_torus(2, 1, c.r), Engine::Fem, fem_params);
    const bool ok = closed.strong == fem.strong && closed.weak == fem.weak;
    o.pass = o.pass && ok;
    o.detail += fmt("r=%.4g", c.r) + " " + std::to_string(fem.strong) + "/" + std::to_string(fem.weak) +
                (ok ? "" : " (closed " + std::to_string(closed.strong) + "/" + std::to_string(closed.weak) + ")") + "; ";
  }
  constexpr double two_pi = 2 * pi;
  const fem::StabilityPencil pencil =
      fem::assemble(AnalyticFamily::minimal_clifford(2, 1), fem::build_mesh(96, 96, {two_pi, two_pi}));
  const fem::PencilSpectrum s = fem::eigen_solve(pencil, 5);
  const double expected[] = {-4, -2, -2, -2, -2};
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(s.eigenvalues[i] - expected[i]) / std::abs(expected[i]));
  o.pass = o.pass && worst <= 0.02;
  o.detail += "lowest five at 1/sqrt2 within " + fmt("%.2e", worst) + " relative";
  return o;
}

Outcome conjecture_window() {
  Outcome o;
  const CliRun r = cli({"sweep", "--family", "clifford", "--n", "2", "--k", "1", "--r-min", "0.3", "--r-max", "0.95",
                        "--steps", "27"});
  if (r.code != 0) return {false, "sweep exited with " + std::to_string(r.code)};
  const double lo = 0.5, hi = std::sqrt(3.0) / 2;
  int inside = 0, outside = 0, boundary = 0;
  for (const json& row : r.report["result"]["rows"]) {
    const double rr = row["r"];
    const int weak = row["weak"];
    const int zero = row["zeroModes"];
    const bool on_boundary = std::abs(rr - lo) < 1e-9 || std::abs(rr - hi) < 1e-9;
    bool ok;
    if (on_boundary) {
      ok = weak == 4 && zero > 4;
      ++boundary;
    } else if (rr > lo && rr < hi) {
      ok = weak == 4;
      ++inside;
    } else {
      ok = weak > 4;
      ++outside;
    }
    if (!ok) {
      o.pass = false;
      o.detail += fmt("r=%.4g", rr) + " weak=" + std::to_string(weak) + " zero=" + std::to_string(zero) + "; ";
    }
  }
  o.pass = o.pass && boundary >= 1 && inside + outside + boundary == 27;
  o.detail += std::to_string(inside) + " inside (weak 4), " + std::to_string(outside) + " outside (weak > 4), " +
              std::to_string(boundary) + " boundary (zeroModes > 4)";
  return o;
}

Outcome identity_suite() {
  Outcome o;
  const CliRun r = cli({"verify"});
  const bool all = r.code == 0 && r.report["result"]["allPass"] == true;
  o.pass = all;
  o.detail = std::to_string(r.report["result"]["families"].size()) + " built-in families " +
             (all ? "pass" : "FAIL") + "; max Hessian " +
             fmt("%.1e", std::max(r.report["residuals"]["maxHessL"].get<double>(), r.report["residuals"]["maxHessF"].get<double>())) +
             ", max J psi " + fmt("%.1e", r.report["residuals"]["maxJPsi"].get<double>());

  const PropositionCheck prop = proposition_check(AnalyticFamily::minimal_clifford(2, 1));
  const bool prop_ok = std::abs(prop.lhs + 4 * pi * pi) <= 1e-6 * 4 * pi * pi && prop.rel_residual <= 1e-6;
  const IntegralIdentity id =
      integral_identity_check(AnalyticFamily::clifford_torus(2, 1, 0.6), AmbientVector::Unit(4, 0));
  const bool id_ok = std::abs(id.lhs + 0.2688 * pi * pi) <= 1e-8 * 0.2688 * pi * pi && id.residual <= 1e-8;
  o.pass = o.pass && prop_ok && id_ok;
  o.detail += "; minimal torus sum " + fmt("%.6f", prop.lhs) + ", r=0.6 identity " + fmt("%.4f", id.lhs) + " vs " +
              fmt("%.4f", id.rhs);
  return o;
}

Outcome theorem_tripwire() {
  Outcome o;
  std::vector<std::vector<std::string>> runs;
  for (int i = 0; i < 25; ++i) {
    runs.push_back({"theorem", "--family", "clifford", "--n", "2", "--k", "1", "--r", fmt("%.17g", 0.3 + 0.025 * i)});
  }
  runs.push_back({"theorem", "--family", "clifford", "--n", "2", "--k", "1", "--r",
                  fmt("%.17g", std::sqrt((2 - std::sqrt(2.0)) / 4))});
  for (const char* r2 : {"1", "16/25", "1/4"}) runs.push_back({"theorem", "--family", "sphere", "--n", "2", "--r2", r2});
  for (const char* r2 : {"1", "16/25"}) runs.push_back({"theorem", "--family", "sphere", "--n", "3", "--r2", r2});

  int consistent = 0, violations = 0, pattern_mismatch = 0;
  int na_on_torus = 0;
  for (const auto& args : runs) {
    const CliRun r = cli(args);
    const json& res = r.report["result"];
    const bool ok = r.code == 0 && res["consistent"] == true;
    ok ? ++consistent : ++violations;
    const bool umbilical_h = res["family"]["kind"] == "sphere" && res["absH"].get<double>() > 1e-9;
    const bool na = res["caseApplied"] == "NotApplicable";
    if (na != umbilical_h) {
      ++pattern_mismatch;
      if (res["family"]["kind"] == "clifford") ++na_on_torus;
    }
  }
  o.pass = violations == 0 && pattern_mismatch == 0;
  o.detail = std::to_string(consistent) + "/" + std::to_string(runs.size()) + " consistent with exit 0; " +
             "NotApplicable outside umbilical H!=0 spheres on " + std::to_string(pattern_mismatch) + " families (" +
             std::to_string(na_on_torus) +
             " Clifford tori whose per-basis margins 2pi^2ab(1-2a^2) and 2pi^2ab(1-2b^2) have opposite signs)";
  return o;
}

Outcome lemma_rank() {
  Outcome o;
  int checked = 0;
  for (const AnalyticFamily& f : builtin_families()) {
    const GramReport g = lemma_gram_check(f, suite_quadrature(f), 1e-8);
    const bool equator = f.is_sphere() && f.r() == 1.0;
    int expected = f.n() + 2;
    if (is_umbilical(f)) expected = equator ? f.n() + 1 : -1;
    const bool ok = expected < 0 ? g.rank < f.n() + 2 : g.rank == expected;
    if (!ok) {
      o.pass = false;
      o.detail += f.label() + " rank " + std::to_string(g.rank) + "; ";
    }
    ++checked;
  }
  const int eq_rank = lemma_gram_check(AnalyticFamily::round_sphere(2, 1.0)).rank;
  o.pass = o.pass && eq_rank == 3;
  o.detail += std::to_string(checked) + " built-ins; n=2 equator rank " + std::to_string(eq_rank);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "equator index", 1.0, equator_index},
      {2, "minimal Clifford index", 5.0, minimal_clifford_index},
      {3, "FEM and closed engines agree", 60.0, fem_closed_agreement},
      {4, "weak-index window probe", 1e9, conjecture_window},
      {5, "identity suite", 30.0, identity_suite},
      {6, "theorem consistency tripwire", 1e9, theorem_tripwire},
      {7, "Gram rank", 1e9, lemma_rank},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%g", c.budget_s) + " s budget";
    }
    failures += !o.pass;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

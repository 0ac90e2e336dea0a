#include "cmcindex/index_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "cmcindex/errors.hpp"
#include "cmcindex/geometry.hpp"

namespace cmc {

std::string to_string(Engine engine) { return engine == Engine::Closed ? "closed" : "fem"; }

Engine parse_engine(const std::string& text) {
  if (text == "closed") return Engine::Closed;
  if (text == "fem") return Engine::Fem;
  throw ParameterError("engine must be 'closed' or 'fem', got '" + text + "'");
}

std::string to_string(TheoremCase c) {
  switch (c) {
    case TheoremCase::Case1_Hpm1:
      return "Case1_Hpm1";
    case TheoremCase::Case2_intIneqGe_Hle1:
      return "Case2_intIneqGe_Hle1";
    case TheoremCase::Case3_intIneqLe_Hge1:
      return "Case3_intIneqLe_Hge1";
    case TheoremCase::NotApplicable:
      break;
  }
  return "NotApplicable";
}

double IndexParams::zero_tol_for(Engine engine) const {
  if (zero_tol) return *zero_tol;
  return engine == Engine::Closed ? kClosedZeroTol : fem::kFemZeroTol;
}

IndexCount compute_index(const AnalyticFamily& family, Engine engine, const IndexParams& params) {
  const double zero_tol = params.zero_tol_for(engine);
  if (engine == Engine::Closed) {
    return index_count(stability_modes(family, params.cutoff), zero_tol);
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const fem::ChartCoefficients coeff = fem::clifford_coefficients(family);
  const fem::ParamMesh mesh = fem::build_mesh(params.mesh_m1, params.mesh_m2, {two_pi, two_pi});
  const fem::StabilityPencil pencil = fem::assemble(coeff, mesh);
  const fem::PencilSpectrum spectrum = fem::eigen_solve_through(pencil, zero_tol, 8, params.solver);
  const fem::NegativeCount counts = fem::negative_count(spectrum, zero_tol);
  IndexCount result;
  result.strong = counts.strong;
  result.zero_modes = counts.zero;
  result.weak = fem::weak_negative_count(pencil, spectrum, zero_tol);
  result.zero_tol = zero_tol;
  return result;
}

bool is_umbilical(const AnalyticFamily& family) {
  return curvature_invariants(family).norm_phi2 <= kUmbilicTol;
}

PropositionCheck proposition_check(const SupportMoments& moments) {
  PropositionCheck check;
  check.lhs = moments.q.trace();
  check.rhs = -moments.phi2_integral;
  check.rel_residual = std::abs(check.lhs - check.rhs) / (1.0 + std::abs(check.rhs));
  return check;
}

PropositionCheck proposition_check(const AnalyticFamily& family, const QuadratureSpec& quadrature) {
  return proposition_check(support_moments(family, quadrature));
}

CorollaryCheck corollary_check(const AnalyticFamily& family, const SupportMoments& moments) {
  CorollaryCheck check;
  for (int i = 0; i < moments.ambient; ++i) check.q_values.push_back(moments.q(i, i));
  if (is_umbilical(family)) return check;
  const double lowest = *std::min_element(check.q_values.begin(), check.q_values.end());
  if (!(lowest < 0.0)) return check;
  for (int i = 0; i < moments.ambient; ++i) {
    if (check.q_values[i] <= lowest + 1e-9 * std::abs(lowest)) {
      check.witness = i;
      break;
    }
  }
  return check;
}

CorollaryCheck corollary_check(const AnalyticFamily& family, const QuadratureSpec& quadrature) {
  return corollary_check(family, support_moments(family, quadrature));
}

GramReport lemma_gram_check(const SupportMoments& moments, double rank_tol) {
  if (!(rank_tol > 0.0)) throw ParameterError("rankTol must be positive");
  GramReport report;
  report.gram = 0.5 * (moments.psi_gram + moments.psi_gram.transpose());
  report.rank_tol = rank_tol;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(report.gram, Eigen::EigenvaluesOnly);
  report.eigenvalues = eig.eigenvalues();
  const double largest = report.eigenvalues.maxCoeff();
  if (largest > 0.0) {
    const double threshold = rank_tol * largest;
    for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) {
      if (report.eigenvalues[i] > threshold) ++report.rank;
    }
  }
  return report;
}

GramReport lemma_gram_check(const AnalyticFamily& family, const QuadratureSpec& quadrature,
                            double rank_tol) {
  if (!(rank_tol > 0.0)) throw ParameterError("rankTol must be positive");
  return lemma_gram_check(support_moments(family, quadrature), rank_tol);
}

TheoremReport theorem_check(const AnalyticFamily& family, const TheoremOptions& options) {
  constexpr double kHTol = 1e-9;
  constexpr double kIntegralTol = 1e-8;
  constexpr double kGapTol = 1e-9;

  const int n = family.n();
  const CurvatureInvariants inv = curvature_invariants(family);
  const SupportMoments moments = support_moments(family, options.quadrature);

  TheoremReport report;
  report.hypothesis_gap = inv.hypothesis_gap;
  report.abs_h = std::abs(inv.mean_curvature);

  const Eigen::MatrixXd margin_form = moments.grad_ll - n * moments.ll;
  for (int i = 0; i < moments.ambient; ++i) report.per_basis_integral_sign.push_back(margin_form(i, i));

  // Basis vectors first, then random unit vectors; the quadratic integrals
  // are v^T M v for the moment matrices.
  std::vector<Eigen::VectorXd> probes;
  for (int i = 0; i < moments.ambient; ++i) probes.push_back(basis_vector(family, i));
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  for (int r = 0; r < options.random_vectors; ++r) {
    Eigen::VectorXd v(moments.ambient);
    for (int i = 0; i < moments.ambient; ++i) v[i] = gauss(rng);
    probes.push_back(v.normalized());
  }
  report.random_vectors = options.random_vectors;

  bool ge_holds = true;
  bool le_holds = true;
  report.worst_ge_margin = INFINITY;
  report.worst_le_margin = INFINITY;
  for (const Eigen::VectorXd& v : probes) {
    const double margin = v.dot(margin_form * v);
    const double tol = kIntegralTol * v.dot(moments.ll * v);
    ge_holds = ge_holds && margin >= -tol;
    le_holds = le_holds && margin <= tol;
    report.worst_ge_margin = std::min(report.worst_ge_margin, margin);
    report.worst_le_margin = std::min(report.worst_le_margin, -margin);
  }

  if (report.hypothesis_gap >= -kGapTol) {
    if (std::abs(report.abs_h - 1.0) <= kHTol) {
      report.case_applied = TheoremCase::Case1_Hpm1;
    } else if (ge_holds && report.abs_h <= 1.0 + kHTol) {
      report.case_applied = TheoremCase::Case2_intIneqGe_Hle1;
    } else if (le_holds && report.abs_h >= 1.0 - kHTol) {
      report.case_applied = TheoremCase::Case3_intIneqLe_Hge1;
    }
  }
  if (report.case_applied != TheoremCase::NotApplicable && !is_umbilical(family)) {
    report.predicted_lower_bound = n + 2;
  }

  report.computed = compute_index(family, options.engine, options.index);
  report.computed_weak_index = report.computed.weak;
  report.consistent =
      !report.predicted_lower_bound || report.computed_weak_index >= *report.predicted_lower_bound;

  if (report.case_applied == TheoremCase::Case1_Hpm1) {
    bool holds = true;
    for (int i = 0; i < moments.ambient; ++i) {
      const double q = moments.q(i, i);
      const double bound = -n * moments.ff(i, i);
      report.case1_q.push_back(q);
      report.case1_bound.push_back(bound);
      holds = holds && q <= bound + kIntegralTol * (1.0 + std::abs(bound));
    }
    report.case1_bound_holds = holds;
  }
  return report;
}

std::vector<AnalyticFamily> builtin_families() {
  const double unit_h_radius = std::sqrt((2.0 - std::sqrt(2.0)) / 4.0);
  return {
      AnalyticFamily::round_sphere(2, RationalSquare{1, 1}),
      AnalyticFamily::round_sphere(2, RationalSquare{16, 25}),
      AnalyticFamily::round_sphere(2, RationalSquare{1, 4}),
      AnalyticFamily::round_sphere(3, RationalSquare{1, 1}),
      AnalyticFamily::round_sphere(3, RationalSquare{16, 25}),
      AnalyticFamily::minimal_clifford(2, 1),
      AnalyticFamily::clifford_torus(2, 1, RationalSquare{9, 25}),
      AnalyticFamily::clifford_torus(2, 1, RationalSquare{9, 25}, -1),
      AnalyticFamily::clifford_torus(2, 1, RationalSquare{81, 400}),
      AnalyticFamily::clifford_torus(2, 1, RationalSquare{16, 25}),
      AnalyticFamily::clifford_torus(2, 1, RationalSquare{7569, 10000}),
      AnalyticFamily::clifford_torus(2, 1, unit_h_radius),
      AnalyticFamily::minimal_clifford(3, 1),
      AnalyticFamily::minimal_clifford(3, 2),
      AnalyticFamily::clifford_torus(3, 1, RationalSquare{9, 25}),
  };
}

QuadratureSpec suite_quadrature(const AnalyticFamily& family) {
  if (family.n() <= 2) return QuadratureSpec{};
  return QuadratureSpec{32, QuadratureRule::Trapezoid};
}

}  // namespace cmc

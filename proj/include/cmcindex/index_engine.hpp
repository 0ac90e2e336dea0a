#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmcindex/closed_spectrum.hpp"
#include "cmcindex/family.hpp"
#include "cmcindex/fem.hpp"
#include "cmcindex/quadrature.hpp"
#include "cmcindex/support.hpp"

namespace cmc {

enum class Engine { Closed, Fem };

std::string to_string(Engine engine);
Engine parse_engine(const std::string& text);

struct IndexParams {
  double cutoff = 1.0;
  /// Defaults per engine when unset: 1e-9 (closed) and 0.05 (fem).
  std::optional<double> zero_tol;
  int mesh_m1 = 64;
  int mesh_m2 = 64;
  fem::SolverOptions solver;

  double zero_tol_for(Engine engine) const;
};

IndexCount compute_index(const AnalyticFamily& family, Engine engine, const IndexParams& params = {});

/// Predicate for "up to totally umbilical spheres".
constexpr double kUmbilicTol = 1e-12;
bool is_umbilical(const AnalyticFamily& family);

struct PropositionCheck {
  double lhs = 0.0;  // sum_i Q(psi_{e_i})
  double rhs = 0.0;  // -int |phi|^2
  double rel_residual = 0.0;
};

PropositionCheck proposition_check(const AnalyticFamily& family, const QuadratureSpec& quadrature = {});
PropositionCheck proposition_check(const SupportMoments& moments);

struct CorollaryCheck {
  /// 0-based index of a basis vector with Q(psi_{e_i}) < 0.
  std::optional<int> witness;
  std::vector<double> q_values;
};

CorollaryCheck corollary_check(const AnalyticFamily& family, const QuadratureSpec& quadrature = {});
CorollaryCheck corollary_check(const AnalyticFamily& family, const SupportMoments& moments);

struct GramReport {
  Eigen::MatrixXd gram;
  int rank = 0;
  double rank_tol = 0.0;
  Eigen::VectorXd eigenvalues;
};

constexpr double kDefaultRankTol = 1e-8;

GramReport lemma_gram_check(const AnalyticFamily& family, const QuadratureSpec& quadrature = {},
                            double rank_tol = kDefaultRankTol);
GramReport lemma_gram_check(const SupportMoments& moments, double rank_tol = kDefaultRankTol);

enum class TheoremCase { Case1_Hpm1, Case2_intIneqGe_Hle1, Case3_intIneqLe_Hge1, NotApplicable };

std::string to_string(TheoremCase c);

struct TheoremReport {
  double hypothesis_gap = 0.0;
  double abs_h = 0.0;
  TheoremCase case_applied = TheoremCase::NotApplicable;
  /// int |grad l_v|^2 - n int l_v^2 for each canonical basis vector.
  std::vector<double> per_basis_integral_sign;
  /// Worst margin of the case inequality over basis and random unit vectors
  /// (>= 0 means the inequality of the applied or nearest case holds).
  double worst_ge_margin = 0.0;
  double worst_le_margin = 0.0;
  int random_vectors = 0;
  std::optional<int> predicted_lower_bound;
  int computed_weak_index = 0;
  IndexCount computed;
  bool consistent = true;
  /// Case 1 only: Q(psi_{e_i}) and -n int f_{e_i}^2 per basis vector.
  std::vector<double> case1_q;
  std::vector<double> case1_bound;
  std::optional<bool> case1_bound_holds;
};

struct TheoremOptions {
  Engine engine = Engine::Closed;
  IndexParams index;
  QuadratureSpec quadrature;
  int random_vectors = 50;
  std::uint64_t seed = 2008;
};

TheoremReport theorem_check(const AnalyticFamily& family, const TheoremOptions& options = {});

/// Families exercised by the identity suite and the theorem tripwire.
std::vector<AnalyticFamily> builtin_families();

/// Quadrature used for a family by the suites: the default rule on n = 2,
/// 32 points per dimension above.
QuadratureSpec suite_quadrature(const AnalyticFamily& family);

}  // namespace cmc

#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "cmcindex/geometry.hpp"
#include "cmcindex/quadrature.hpp"

namespace cmc {

/// Support functions of a fixed ambient vector v at one point.
struct SupportSample {
  double l = 0.0;    // <x, v>
  double f = 0.0;    // <N, v>
  double psi = 0.0;  // l - H f
  /// Contravariant chart components of grad l = v^T.
  Eigen::VectorXd grad_l;
  /// Contravariant chart components of grad f.
  Eigen::VectorXd grad_f;
  /// v^T = v - l x - f N
  AmbientVector tangential;
};

SupportSample sample(const AnalyticFamily& family, const ChartPoint& u, const AmbientVector& v);
SupportSample sample(const GeometryFrame& frame, const AmbientVector& v);

/// Pointwise maxima of the Hessian, Laplacian and Jacobi identity residuals.
/// Tensor residuals are measured in an orthonormal frame.
struct IdentityResidualReport {
  double max_hess_l = 0.0;
  double max_hess_f = 0.0;
  double max_lap_l = 0.0;
  double max_lap_f = 0.0;
  double max_j_psi = 0.0;
  int evaluated = 0;
  int skipped = 0;
};

struct ResidualOptions {
  double step = 1e-4;
  std::uint64_t seed = 20080601;
};

/// Finite-difference check of the support-function identities at
/// sample_count random chart points away from the polar singularities.
IdentityResidualReport identity_residuals(const AnalyticFamily& family, const AmbientVector& v,
                                          int sample_count, const ResidualOptions& options = {});

/// Value and covariant chart gradient of a custom test function.
struct ChartValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

/// Function selector for the quadratic form. Custom callables must be
/// thread-safe; quadrature may evaluate them concurrently.
struct TestFunction {
  enum class Kind { Psi, L, F, Custom };
  Kind kind = Kind::Psi;
  AmbientVector v;
  std::function<ChartValue(const ChartPoint&)> custom;

  static TestFunction psi(AmbientVector v) { return {Kind::Psi, std::move(v), {}}; }
  static TestFunction l(AmbientVector v) { return {Kind::L, std::move(v), {}}; }
  static TestFunction f(AmbientVector v) { return {Kind::F, std::move(v), {}}; }
  static TestFunction from_chart(std::function<ChartValue(const ChartPoint&)> fn) {
    return {Kind::Custom, AmbientVector(), std::move(fn)};
  }
};

/// Q(f) = int |grad f|^2 - (|A|^2 + n) f^2. For psi_v the two signed terms
/// of Q(psi_v) = -int |phi|^2 l^2 + int |phi|^2 H l f are integrated too
/// (zero for other selectors).
struct QFormResult {
  double value = 0.0;
  double dirichlet = 0.0;
  double potential = 0.0;
  double phi_l2_term = 0.0;
  double phi_hlf_term = 0.0;
};

QFormResult q_form(const AnalyticFamily& family, const TestFunction& fn,
                   const QuadratureSpec& quadrature = {});

/// |int psi_v| / Area
double mean_zero_check(const AnalyticFamily& family, const AmbientVector& v,
                       const QuadratureSpec& quadrature = {});

struct IntegralIdentity {
  double lhs = 0.0;  // n H int f l
  double rhs = 0.0;  // -int |grad l|^2 + n int l^2
  double residual = 0.0;
};

IntegralIdentity integral_identity_check(const AnalyticFamily& family, const AmbientVector& v,
                                         const QuadratureSpec& quadrature = {});

/// Quadratic-form moments of the support functions of the canonical basis.
/// Every integral that is quadratic in v is v^T M v for one of these.
struct SupportMoments {
  int ambient = 0;
  double area = 0.0;
  double phi2_integral = 0.0;
  Eigen::MatrixXd ll;         // int l_i l_j
  Eigen::MatrixXd ff;         // int f_i f_j
  Eigen::MatrixXd lf;         // int l_i f_j
  Eigen::MatrixXd grad_ll;    // int <grad l_i, grad l_j>
  Eigen::MatrixXd psi_gram;   // int psi_i psi_j
  Eigen::MatrixXd q;          // Q(psi_i, psi_j), polarized
  Eigen::MatrixXd phi_ll;     // int |phi|^2 l_i l_j
  Eigen::MatrixXd phi_h_lf;   // int |phi|^2 H l_i f_j (symmetrized)
  Eigen::VectorXd psi_mean;   // int psi_i
};

SupportMoments support_moments(const AnalyticFamily& family, const QuadratureSpec& quadrature = {});

/// Canonical basis vector e_i of R^{n+2} (0-based i).
AmbientVector basis_vector(const AnalyticFamily& family, int i);

}  // namespace cmc

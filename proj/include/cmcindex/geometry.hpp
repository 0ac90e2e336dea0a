#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cmcindex/family.hpp"

namespace cmc {

/// Euclidean coordinates in R^{n+2}.
using AmbientVector = Eigen::VectorXd;
/// Chart coordinates u in R^n.
using ChartPoint = Eigen::VectorXd;

/// Pointwise geometry of the immersion at one chart point.
///
/// Chart layout: product spherical angles. For each sphere factor S^m the
/// angles are (polar_1, ..., polar_{m-1}, azimuth); a Clifford torus lists
/// the S^k(a) angles first, then the S^{n-k}(b) angles.
struct GeometryFrame {
  AmbientVector position;
  AmbientVector normal;
  /// d position / du_i, one ambient vector per chart direction.
  std::vector<AmbientVector> tangents;
  /// d normal / du_i, differentiated from the closed-form normal.
  std::vector<AmbientVector> normal_derivatives;
  Eigen::MatrixXd metric;
  /// Shape operator A = g^{-1} II with II_ij = -<dN/du_i, dx/du_j>.
  Eigen::MatrixXd shape;
  double mean_curvature = 0.0;
  double norm_a2 = 0.0;
  double norm_phi2 = 0.0;
  /// sqrt(det g), the chart area element.
  double area_element = 0.0;
};

struct CurvatureInvariants {
  double mean_curvature;
  double norm_a2;
  double norm_phi2;
  /// |A|^2 - 2 n H^2
  double hypothesis_gap;
};

/// Chart coordinate kind, used by quadrature and samplers.
enum class AngleKind { Polar, Azimuth };
std::vector<AngleKind> chart_layout(const AnalyticFamily& family);

AmbientVector position(const AnalyticFamily& family, const ChartPoint& u);
AmbientVector normal(const AnalyticFamily& family, const ChartPoint& u);
GeometryFrame frame(const AnalyticFamily& family, const ChartPoint& u);

/// Same, with a caller-chosen determinant floor. Quadrature nodes close to a
/// polar locus use a floor of 0, since the rule never lands on the locus itself.
GeometryFrame frame(const AnalyticFamily& family, const ChartPoint& u, double min_det);

/// Constants of the homogeneous family, from its principal curvatures.
CurvatureInvariants curvature_invariants(const AnalyticFamily& family);

/// Principal curvatures, one per chart direction, with the stored orientation.
std::vector<double> principal_curvatures(const AnalyticFamily& family);

/// Closed-form Christoffel symbols Gamma^k_{ij}, stored as gamma[k](i, j).
std::vector<Eigen::MatrixXd> christoffel(const AnalyticFamily& family, const ChartPoint& u);

}  // namespace cmc

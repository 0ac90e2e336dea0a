#include "cmcindex/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmcindex/errors.hpp"

namespace cmc {

std::string to_string(QuadratureRule rule) {
  return rule == QuadratureRule::Trapezoid ? "trapezoid" : "gauss";
}

QuadratureRule parse_quadrature_rule(const std::string& text) {
  if (text == "trapezoid") return QuadratureRule::Trapezoid;
  if (text == "gauss") return QuadratureRule::Gauss;
  throw ParameterError("quadrature rule must be 'trapezoid' or 'gauss', got '" + text + "'");
}

Rule1D gauss_legendre(int order, double lo, double hi) {
  if (order < 1) throw ParameterError("Gauss-Legendre order must be positive");
  Rule1D rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    // Newton on P_order starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[order - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[order - 1 - i] = half * w;
  }
  return rule;
}

Rule1D periodic_trapezoid(int points, double period) {
  if (points < 1) throw ParameterError("trapezoid rule needs at least one point");
  Rule1D rule;
  rule.nodes.resize(points);
  rule.weights.assign(points, period / points);
  for (int i = 0; i < points; ++i) rule.nodes[i] = period * i / points;
  return rule;
}

ChartQuadrature::ChartQuadrature(const AnalyticFamily& family, const QuadratureSpec& spec) {
  if (spec.points_per_dim < 2) throw ParameterError("quadrature needs at least 2 points per dimension");
  constexpr double pi = std::numbers::pi;
  for (AngleKind kind : chart_layout(family)) {
    if (kind == AngleKind::Polar) {
      const int order = spec.rule == QuadratureRule::Gauss ? spec.points_per_dim
                                                           : std::min(spec.points_per_dim, 64);
      rules_.push_back(gauss_legendre(order, 0.0, pi));
    } else if (spec.rule == QuadratureRule::Gauss) {
      rules_.push_back(gauss_legendre(spec.points_per_dim, 0.0, 2.0 * pi));
    } else {
      rules_.push_back(periodic_trapezoid(spec.points_per_dim, 2.0 * pi));
    }
  }
  for (const Rule1D& rule : rules_) size_ *= rule.nodes.size();
}

double ChartQuadrature::point(std::size_t index, ChartPoint& u) const {
  double weight = 1.0;
  for (int d = dimension() - 1; d >= 0; --d) {
    const Rule1D& rule = rules_[d];
    const std::size_t i = index % rule.nodes.size();
    index /= rule.nodes.size();
    u[d] = rule.nodes[i];
    weight *= rule.weights[i];
  }
  return weight;
}

double surface_area(const AnalyticFamily& family, const QuadratureSpec& spec) {
  return integrate(family, spec, 1, [](const ChartPoint&, const GeometryFrame&, std::span<double> out) {
    out[0] = 1.0;
  })[0];
}

}  // namespace cmc

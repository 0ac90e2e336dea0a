#pragma once

#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

#include "cmcindex/family.hpp"
#include "cmcindex/geometry.hpp"

namespace test {

template <class... T>
Eigen::VectorXd chart(T... values) {
  Eigen::VectorXd u(sizeof...(T));
  int i = 0;
  ((u[i++] = static_cast<double>(values)), ...);
  return u;
}

inline Eigen::VectorXd ambient(std::initializer_list<double> values) {
  Eigen::VectorXd v(values.size());
  int i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline bool near(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

/// Uniform chart point, polar angles kept 0.2 away from the poles.
inline Eigen::VectorXd random_chart(const cmc::AnalyticFamily& family, std::mt19937_64& rng) {
  const auto kinds = cmc::chart_layout(family);
  std::uniform_real_distribution<double> polar(0.2, std::numbers::pi - 0.2);
  std::uniform_real_distribution<double> azimuth(0.0, 2 * std::numbers::pi);
  Eigen::VectorXd u(family.n());
  for (int i = 0; i < family.n(); ++i) u[i] = kinds[i] == cmc::AngleKind::Polar ? polar(rng) : azimuth(rng);
  return u;
}

inline Eigen::VectorXd random_unit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = g(rng);
  return v.normalized();
}

inline std::vector<cmc::AnalyticFamily> sample_families() {
  using cmc::AnalyticFamily;
  return {AnalyticFamily::round_sphere(2, 1.0),
          AnalyticFamily::round_sphere(2, 0.8),
          AnalyticFamily::round_sphere(3, 0.6, -1),
          AnalyticFamily::clifford_torus(2, 1, 0.6),
          AnalyticFamily::clifford_torus(2, 1, 0.45, -1),
          AnalyticFamily::minimal_clifford(2, 1),
          AnalyticFamily::clifford_torus(3, 1, 0.6),
          AnalyticFamily::clifford_torus(3, 2, 0.7),
          AnalyticFamily::clifford_torus(4, 2, 0.5)};
}

}  // namespace test

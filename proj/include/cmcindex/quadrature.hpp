#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cmcindex/geometry.hpp"
#include "cmcindex/parallel.hpp"

namespace cmc {

enum class QuadratureRule { Trapezoid, Gauss };

std::string to_string(QuadratureRule rule);
QuadratureRule parse_quadrature_rule(const std::string& text);

/// Tensor-product rule on the product spherical chart.
///
/// Trapezoid: azimuths use the composite trapezoid rule with points_per_dim
/// nodes, polar angles use Gauss-Legendre of order min(points_per_dim, 64).
/// Gauss: every chart direction uses Gauss-Legendre of order points_per_dim.
struct QuadratureSpec {
  int points_per_dim = 256;
  QuadratureRule rule = QuadratureRule::Trapezoid;
};

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Rule1D gauss_legendre(int order, double lo, double hi);
Rule1D periodic_trapezoid(int points, double period);

/// Nodes and chart weights (without the area element) for a family.
class ChartQuadrature {
 public:
  ChartQuadrature(const AnalyticFamily& family, const QuadratureSpec& spec);

  std::size_t size() const { return size_; }
  int dimension() const { return static_cast<int>(rules_.size()); }
  /// Writes the chart point for a flat index and returns its chart weight.
  double point(std::size_t index, ChartPoint& u) const;

 private:
  std::vector<Rule1D> rules_;
  std::size_t size_ = 1;
};

/// Integrates `count` scalar fields over the surface in one pass.
///
/// integrand(u, frame, out) receives the chart point and geometry at each node and writes the
/// integrand values into out (length count); the area element is applied
/// here. Partial sums use a fixed chunking and are combined in chunk order.
template <class Integrand>
std::vector<double> integrate(const AnalyticFamily& family, const QuadratureSpec& spec,
                              std::size_t count, Integrand&& integrand) {
  const ChartQuadrature quad(family, spec);
  constexpr std::size_t kChunks = 64;
  const std::size_t total = quad.size();
  std::vector<std::vector<double>> partial(kChunks, std::vector<double>(count, 0.0));
  parallel::for_each_index(kChunks, [&](std::size_t chunk) {
    const std::size_t begin = total * chunk / kChunks;
    const std::size_t end = total * (chunk + 1) / kChunks;
    ChartPoint u(quad.dimension());
    std::vector<double> values(count);
    std::vector<double>& acc = partial[chunk];
    for (std::size_t i = begin; i < end; ++i) {
      const double w = quad.point(i, u);
      const GeometryFrame fr = frame(family, u, 0.0);
      std::fill(values.begin(), values.end(), 0.0);
      integrand(static_cast<const ChartPoint&>(u), fr, std::span<double>(values));
      const double dA = w * fr.area_element;
      for (std::size_t c = 0; c < count; ++c) acc[c] += dA * values[c];
    }
  });
  std::vector<double> sums(count, 0.0);
  for (const auto& acc : partial) {
    for (std::size_t c = 0; c < count; ++c) sums[c] += acc[c];
  }
  return sums;
}

/// Surface area by quadrature.
double surface_area(const AnalyticFamily& family, const QuadratureSpec& spec);

}  // namespace cmc

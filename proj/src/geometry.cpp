#include "cmcindex/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "cmcindex/errors.hpp"

namespace cmc {

namespace {

constexpr double kDegenerateDet = 1e-12;

// One round sphere factor S^m(radius) inside the product chart.
struct Factor {
  int dim;
  double radius;
  int chart_offset;
  int ambient_offset;
  // N restricted to this factor is normal_scale * w.
  double normal_scale;
  double curvature;
};

struct Layout {
  std::vector<Factor> factors;
  // RoundSphere only: constant last ambient coordinates of x and N.
  double height = 0.0;
  double normal_height = 0.0;
};

Layout layout_of(const AnalyticFamily& family) {
  const double s = family.orientation();
  const double a = family.a();
  const double b = family.b();
  Layout layout;
  if (family.is_sphere()) {
    // N = s * (c w, -r), x = (r w, c)
    layout.factors.push_back({family.n(), a, 0, 0, s * b, -s * b / a});
    layout.height = b;
    layout.normal_height = -s * a;
  } else {
    // N = s * (-(b/a) x1, (a/b) x2)
    const int k = family.k();
    layout.factors.push_back({k, a, 0, 0, -s * b, s * b / a});
    layout.factors.push_back({family.n() - k, b, k, k + 1, s * a, -s * a / b});
  }
  return layout;
}

void check_dimension(const AnalyticFamily& family, const ChartPoint& u) {
  if (u.size() != family.n()) {
    throw ParameterError("chart point has " + std::to_string(u.size()) +
                         " coordinates, family needs " + std::to_string(family.n()));
  }
}

// Component c of the unit sphere point w(theta) in R^{m+1}, or its partial
// derivative along theta_d when d >= 0.
double sphere_component(const double* theta, int m, int c, int d) {
  double value = 1.0;
  const int sines = c < m ? c : m;
  for (int j = 0; j < sines; ++j) value *= (j == d) ? std::cos(theta[j]) : std::sin(theta[j]);
  if (c < m) value *= (c == d) ? -std::sin(theta[c]) : std::cos(theta[c]);
  if (d > sines || (d == sines && c == m)) return 0.0;
  return value;
}

void write_factor(const Factor& factor, const ChartPoint& u, int d, double scale,
                  AmbientVector& out) {
  const double* theta = u.data() + factor.chart_offset;
  for (int c = 0; c <= factor.dim; ++c) {
    out[factor.ambient_offset + c] = scale * sphere_component(theta, factor.dim, c, d);
  }
}

}  // namespace

std::vector<AngleKind> chart_layout(const AnalyticFamily& family) {
  std::vector<AngleKind> kinds;
  for (const Factor& factor : layout_of(family).factors) {
    for (int i = 0; i < factor.dim; ++i) {
      kinds.push_back(i + 1 < factor.dim ? AngleKind::Polar : AngleKind::Azimuth);
    }
  }
  return kinds;
}

AmbientVector position(const AnalyticFamily& family, const ChartPoint& u) {
  check_dimension(family, u);
  const Layout layout = layout_of(family);
  AmbientVector x = AmbientVector::Zero(family.ambient_dim());
  for (const Factor& factor : layout.factors) write_factor(factor, u, -1, factor.radius, x);
  if (family.is_sphere()) x[family.n() + 1] = layout.height;
  return x;
}

AmbientVector normal(const AnalyticFamily& family, const ChartPoint& u) {
  check_dimension(family, u);
  const Layout layout = layout_of(family);
  AmbientVector N = AmbientVector::Zero(family.ambient_dim());
  for (const Factor& factor : layout.factors) write_factor(factor, u, -1, factor.normal_scale, N);
  if (family.is_sphere()) N[family.n() + 1] = layout.normal_height;
  return N;
}

GeometryFrame frame(const AnalyticFamily& family, const ChartPoint& u) {
  return frame(family, u, kDegenerateDet);
}

GeometryFrame frame(const AnalyticFamily& family, const ChartPoint& u, double min_det) {
  check_dimension(family, u);
  const Layout layout = layout_of(family);
  const int n = family.n();
  const int dim = family.ambient_dim();

  GeometryFrame fr;
  fr.position = position(family, u);
  fr.normal = normal(family, u);
  fr.tangents.assign(n, AmbientVector::Zero(dim));
  fr.normal_derivatives.assign(n, AmbientVector::Zero(dim));
  for (const Factor& factor : layout.factors) {
    for (int i = 0; i < factor.dim; ++i) {
      const int d = factor.chart_offset + i;
      write_factor(factor, u, i, factor.radius, fr.tangents[d]);
      write_factor(factor, u, i, factor.normal_scale, fr.normal_derivatives[d]);
    }
  }

  fr.metric.resize(n, n);
  Eigen::MatrixXd second(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      fr.metric(i, j) = fr.tangents[i].dot(fr.tangents[j]);
      second(i, j) = -fr.normal_derivatives[i].dot(fr.tangents[j]);
    }
  }
  const double det = fr.metric.determinant();
  if (!(det >= min_det) || !(det > 0.0)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "metric determinant %.3e below %.0e at chart point", det, min_det);
    throw DegenerateChartError(buf);
  }
  fr.area_element = std::sqrt(det);
  fr.shape = fr.metric.ldlt().solve(second);
  fr.mean_curvature = fr.shape.trace() / n;
  fr.norm_a2 = (fr.shape * fr.shape).trace();
  fr.norm_phi2 = std::max(0.0, fr.norm_a2 - n * fr.mean_curvature * fr.mean_curvature);
  return fr;
}

std::vector<double> principal_curvatures(const AnalyticFamily& family) {
  std::vector<double> kappa;
  for (const Factor& factor : layout_of(family).factors) {
    kappa.insert(kappa.end(), factor.dim, factor.curvature);
  }
  return kappa;
}

CurvatureInvariants curvature_invariants(const AnalyticFamily& family) {
  const std::vector<double> kappa = principal_curvatures(family);
  const int n = family.n();
  double trace = 0.0;
  double squares = 0.0;
  for (double kv : kappa) {
    trace += kv;
    squares += kv * kv;
  }
  const double H = trace / n;
  double phi2 = 0.0;
  for (double kv : kappa) phi2 += (kv - H) * (kv - H);
  return {H, squares, phi2, squares - 2.0 * n * H * H};
}

std::vector<Eigen::MatrixXd> christoffel(const AnalyticFamily& family, const ChartPoint& u) {
  check_dimension(family, u);
  const int n = family.n();
  // Product spherical charts are orthogonal: g = diag(g_ii) with
  // g_ii = R^2 prod_{l<i} sin^2(theta_l) inside each factor.
  Eigen::VectorXd g(n);
  Eigen::MatrixXd dg = Eigen::MatrixXd::Zero(n, n);  // dg(i, j) = d g_ii / d u_j
  for (const Factor& factor : layout_of(family).factors) {
    const double* theta = u.data() + factor.chart_offset;
    for (int i = 0; i < factor.dim; ++i) {
      double gii = factor.radius * factor.radius;
      for (int l = 0; l < i; ++l) gii *= std::sin(theta[l]) * std::sin(theta[l]);
      g[factor.chart_offset + i] = gii;
      for (int j = 0; j < i; ++j) {
        double d = factor.radius * factor.radius * 2.0 * std::sin(theta[j]) * std::cos(theta[j]);
        for (int l = 0; l < i; ++l) {
          if (l != j) d *= std::sin(theta[l]) * std::sin(theta[l]);
        }
        dg(factor.chart_offset + i, factor.chart_offset + j) = d;
      }
    }
  }
  std::vector<Eigen::MatrixXd> gamma(n, Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        // 1/2 g^{kk} (d_i g_kj + d_j g_ki - d_k g_ij), diagonal metric
        double sum = 0.0;
        if (k == j) sum += dg(k, i);
        if (k == i) sum += dg(k, j);
        if (i == j) sum -= dg(i, k);
        gamma[k](i, j) = 0.5 * sum / g[k];
      }
    }
  }
  return gamma;
}

}  // namespace cmc

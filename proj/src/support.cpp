#include "cmcindex/support.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cmcindex/errors.hpp"

namespace cmc {

namespace {

void check_ambient(const AnalyticFamily& family, const AmbientVector& v) {
  if (v.size() != family.ambient_dim()) {
    throw ParameterError("ambient vector has " + std::to_string(v.size()) +
                         " coordinates, family needs " + std::to_string(family.ambient_dim()));
  }
}

// Covariant chart partials of l_v and f_v.
Eigen::VectorXd partials(const std::vector<AmbientVector>& vectors, const AmbientVector& v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) d[i] = vectors[i].dot(v);
  return d;
}

// Largest entry of a covariant 2-tensor expressed in an orthonormal frame.
double orthonormal_max(const Eigen::MatrixXd& metric, const Eigen::MatrixXd& tensor) {
  const Eigen::MatrixXd L = metric.llt().matrixL();
  const Eigen::MatrixXd left = L.triangularView<Eigen::Lower>().solve(tensor);
  const Eigen::MatrixXd both =
      L.triangularView<Eigen::Lower>().solve(left.transpose()).transpose();
  return both.cwiseAbs().maxCoeff();
}

ChartPoint random_chart_point(const AnalyticFamily& family, std::mt19937_64& rng) {
  constexpr double pi = std::numbers::pi;
  constexpr double margin = 0.2;
  std::uniform_real_distribution<double> polar(margin, pi - margin);
  std::uniform_real_distribution<double> azimuth(0.0, 2.0 * pi);
  const std::vector<AngleKind> kinds = chart_layout(family);
  ChartPoint u(family.n());
  for (int i = 0; i < family.n(); ++i) {
    u[i] = kinds[i] == AngleKind::Polar ? polar(rng) : azimuth(rng);
  }
  return u;
}

// Second-order central chart Hessian of a scalar chart function.
template <class Fn>
Eigen::MatrixXd chart_hessian(Fn&& fn, const ChartPoint& u, double h) {
  const int n = static_cast<int>(u.size());
  Eigen::MatrixXd hess(n, n);
  const double center = fn(u);
  for (int i = 0; i < n; ++i) {
    ChartPoint p = u;
    p[i] = u[i] + h;
    const double plus = fn(p);
    p[i] = u[i] - h;
    const double minus = fn(p);
    hess(i, i) = (plus - 2.0 * center + minus) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      ChartPoint q = u;
      double corners = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          q[i] = u[i] + si * h;
          q[j] = u[j] + sj * h;
          corners += si * sj * fn(q);
        }
      }
      hess(i, j) = hess(j, i) = corners / (4.0 * h * h);
    }
  }
  return hess;
}

Eigen::MatrixXd intrinsic_hessian(const Eigen::MatrixXd& chart, const Eigen::VectorXd& partial,
                                  const std::vector<Eigen::MatrixXd>& gamma) {
  Eigen::MatrixXd hess = chart;
  for (std::size_t k = 0; k < gamma.size(); ++k) hess -= gamma[k] * partial[k];
  return hess;
}

}  // namespace

AmbientVector basis_vector(const AnalyticFamily& family, int i) {
  if (i < 0 || i >= family.ambient_dim()) throw ParameterError("basis index out of range");
  return AmbientVector::Unit(family.ambient_dim(), i);
}

SupportSample sample(const GeometryFrame& fr, const AmbientVector& v) {
  if (v.size() != fr.position.size()) throw ParameterError("ambient vector dimension mismatch");
  SupportSample s;
  s.l = fr.position.dot(v);
  s.f = fr.normal.dot(v);
  s.psi = s.l - fr.mean_curvature * s.f;
  const auto ldlt = fr.metric.ldlt();
  s.grad_l = ldlt.solve(partials(fr.tangents, v));
  s.grad_f = ldlt.solve(partials(fr.normal_derivatives, v));
  s.tangential = v - s.l * fr.position - s.f * fr.normal;
  return s;
}

SupportSample sample(const AnalyticFamily& family, const ChartPoint& u, const AmbientVector& v) {
  check_ambient(family, v);
  return sample(frame(family, u), v);
}

IdentityResidualReport identity_residuals(const AnalyticFamily& family, const AmbientVector& v,
                                          int sample_count, const ResidualOptions& options) {
  if (sample_count < 1) throw ParameterError("sampleCount must be at least 1");
  check_ambient(family, v);
  const int n = family.n();
  const double h = options.step;
  std::mt19937_64 rng(options.seed);
  IdentityResidualReport report;

  auto l_at = [&](const ChartPoint& p) { return position(family, p).dot(v); };
  auto f_at = [&](const ChartPoint& p) { return normal(family, p).dot(v); };

  for (int s = 0; s < sample_count; ++s) {
    const ChartPoint u = random_chart_point(family, rng);
    try {
      const GeometryFrame fr = frame(family, u);
      const SupportSample smp = sample(fr, v);
      const auto gamma = christoffel(family, u);
      const double H = fr.mean_curvature;
      const Eigen::MatrixXd& g = fr.metric;
      const Eigen::MatrixXd& A = fr.shape;
      const Eigen::MatrixXd second = g * A;

      const Eigen::MatrixXd hess_l =
          intrinsic_hessian(chart_hessian(l_at, u, h), partials(fr.tangents, v), gamma);
      const Eigen::MatrixXd hess_f =
          intrinsic_hessian(chart_hessian(f_at, u, h), partials(fr.normal_derivatives, v), gamma);

      // Hess l = -l g + f II
      const Eigen::MatrixXd res_l = hess_l - (-smp.l * g + smp.f * second);

      // (nabla_j A)^i_k = d_j A^i_k + Gamma^i_{jp} A^p_k - A^i_p Gamma^p_{jk}
      // Hess f(e_j, e_m) = -g_mi (nabla_j A)^i_k grad_l^k + l II_jm - f (A^T g A)_jm
      Eigen::MatrixXd nabla_term(n, n);
      for (int j = 0; j < n; ++j) {
        ChartPoint up = u;
        ChartPoint down = u;
        up[j] += h;
        down[j] -= h;
        Eigen::MatrixXd cov = (frame(family, up).shape - frame(family, down).shape) / (2.0 * h);
        for (int i = 0; i < n; ++i) {
          for (int k = 0; k < n; ++k) {
            double sum = 0.0;
            for (int p = 0; p < n; ++p) {
              sum += gamma[i](j, p) * A(p, k) - A(i, p) * gamma[p](j, k);
            }
            cov(i, k) += sum;
          }
        }
        const Eigen::VectorXd applied = g * (cov * smp.grad_l);
        for (int m = 0; m < n; ++m) nabla_term(j, m) = applied[m];
      }
      const Eigen::MatrixXd res_f =
          hess_f - (-nabla_term + smp.l * second - smp.f * (A.transpose() * g * A));

      const Eigen::MatrixXd g_inv = g.inverse();
      const double lap_l = (g_inv * hess_l).trace();
      const double lap_f = (g_inv * hess_f).trace();
      const double j_psi = (lap_l - H * lap_f) + (fr.norm_a2 + n) * smp.psi;

      report.max_hess_l = std::max(report.max_hess_l, orthonormal_max(g, res_l));
      report.max_hess_f = std::max(report.max_hess_f, orthonormal_max(g, res_f));
      report.max_lap_l = std::max(report.max_lap_l, std::abs(lap_l + n * smp.l - n * H * smp.f));
      report.max_lap_f =
          std::max(report.max_lap_f, std::abs(lap_f - n * H * smp.l + fr.norm_a2 * smp.f));
      report.max_j_psi = std::max(report.max_j_psi, std::abs(j_psi - fr.norm_phi2 * smp.l));
      ++report.evaluated;
    } catch (const DegenerateChartError&) {
      ++report.skipped;
    }
  }
  return report;
}

QFormResult q_form(const AnalyticFamily& family, const TestFunction& fn,
                   const QuadratureSpec& quadrature) {
  if (fn.kind == TestFunction::Kind::Custom) {
    if (!fn.custom) throw ParameterError("custom test function is empty");
  } else {
    check_ambient(family, fn.v);
  }
  const int n = family.n();
  const std::vector<double> sums = integrate(
      family, quadrature, 4,
      [&](const ChartPoint& u, const GeometryFrame& fr, std::span<double> out) {
        double value = 0.0;
        Eigen::VectorXd d;
        double l = 0.0;
        double f = 0.0;
        if (fn.kind == TestFunction::Kind::Custom) {
          ChartValue cv = fn.custom(u);
          if (cv.gradient.size() != n || !std::isfinite(cv.value) || !cv.gradient.allFinite()) {
            throw ParameterError("custom test function is not integrable on the chart");
          }
          value = cv.value;
          d = std::move(cv.gradient);
        } else {
          l = fr.position.dot(fn.v);
          f = fr.normal.dot(fn.v);
          const Eigen::VectorXd dl = partials(fr.tangents, fn.v);
          const Eigen::VectorXd df = partials(fr.normal_derivatives, fn.v);
          if (fn.kind == TestFunction::Kind::Psi) {
            value = l - fr.mean_curvature * f;
            d = dl - fr.mean_curvature * df;
          } else if (fn.kind == TestFunction::Kind::L) {
            value = l;
            d = dl;
          } else {
            value = f;
            d = df;
          }
        }
        out[0] = d.dot(fr.metric.ldlt().solve(d));
        out[1] = (fr.norm_a2 + n) * value * value;
        if (fn.kind == TestFunction::Kind::Psi) {
          out[2] = -fr.norm_phi2 * l * l;
          out[3] = fr.norm_phi2 * fr.mean_curvature * l * f;
        }
      });
  QFormResult result;
  result.dirichlet = sums[0];
  result.potential = sums[1];
  result.value = sums[0] - sums[1];
  result.phi_l2_term = sums[2];
  result.phi_hlf_term = sums[3];
  return result;
}

double mean_zero_check(const AnalyticFamily& family, const AmbientVector& v,
                       const QuadratureSpec& quadrature) {
  check_ambient(family, v);
  const std::vector<double> sums = integrate(
      family, quadrature, 2, [&](const ChartPoint&, const GeometryFrame& fr, std::span<double> out) {
        out[0] = fr.position.dot(v) - fr.mean_curvature * fr.normal.dot(v);
        out[1] = 1.0;
      });
  return std::abs(sums[0]) / sums[1];
}

IntegralIdentity integral_identity_check(const AnalyticFamily& family, const AmbientVector& v,
                                         const QuadratureSpec& quadrature) {
  check_ambient(family, v);
  const int n = family.n();
  const std::vector<double> sums = integrate(
      family, quadrature, 3, [&](const ChartPoint&, const GeometryFrame& fr, std::span<double> out) {
        const double l = fr.position.dot(v);
        const Eigen::VectorXd dl = partials(fr.tangents, v);
        out[0] = n * fr.mean_curvature * fr.normal.dot(v) * l;
        out[1] = dl.dot(fr.metric.ldlt().solve(dl));
        out[2] = l * l;
      });
  IntegralIdentity result;
  result.lhs = sums[0];
  result.rhs = -sums[1] + n * sums[2];
  result.residual = std::abs(result.lhs - result.rhs) / (1.0 + std::abs(result.lhs));
  return result;
}

SupportMoments support_moments(const AnalyticFamily& family, const QuadratureSpec& quadrature) {
  const int n = family.n();
  const int D = family.ambient_dim();
  const std::size_t block = static_cast<std::size_t>(D) * D;
  constexpr int kMatrices = 8;
  const std::size_t count = kMatrices * block + D + 2;

  const std::vector<double> sums = integrate(
      family, quadrature, count,
      [&](const ChartPoint&, const GeometryFrame& fr, std::span<double> out) {
        const double H = fr.mean_curvature;
        Eigen::MatrixXd dl(n, D);
        Eigen::MatrixXd df(n, D);
        for (int i = 0; i < n; ++i) {
          dl.row(i) = fr.tangents[i].transpose();
          df.row(i) = fr.normal_derivatives[i].transpose();
        }
        const Eigen::VectorXd psi = fr.position - H * fr.normal;
        const Eigen::MatrixXd dpsi = dl - H * df;
        const auto ldlt = fr.metric.ldlt();
        const Eigen::MatrixXd lf = fr.position * fr.normal.transpose();

        std::array<Eigen::MatrixXd, kMatrices> m;
        m[0] = fr.position * fr.position.transpose();
        m[1] = fr.normal * fr.normal.transpose();
        m[2] = lf;
        m[3] = dl.transpose() * ldlt.solve(dl);
        m[4] = psi * psi.transpose();
        m[5] = dpsi.transpose() * ldlt.solve(dpsi) - (fr.norm_a2 + n) * m[4];
        m[6] = fr.norm_phi2 * m[0];
        m[7] = 0.5 * fr.norm_phi2 * H * (lf + lf.transpose());
        std::size_t at = 0;
        for (const auto& mat : m) {
          for (int j = 0; j < D; ++j) {
            for (int i = 0; i < D; ++i) out[at++] = mat(i, j);
          }
        }
        for (int i = 0; i < D; ++i) out[at++] = psi[i];
        out[at++] = 1.0;
        out[at++] = fr.norm_phi2;
      });

  auto unpack = [&](int which) {
    return Eigen::Map<const Eigen::MatrixXd>(sums.data() + which * block, D, D).eval();
  };
  SupportMoments moments;
  moments.ambient = D;
  moments.ll = unpack(0);
  moments.ff = unpack(1);
  moments.lf = unpack(2);
  moments.grad_ll = unpack(3);
  moments.psi_gram = unpack(4);
  moments.q = unpack(5);
  moments.phi_ll = unpack(6);
  moments.phi_h_lf = unpack(7);
  moments.psi_mean = Eigen::Map<const Eigen::VectorXd>(sums.data() + kMatrices * block, D);
  moments.area = sums[kMatrices * block + D];
  moments.phi2_integral = sums[kMatrices * block + D + 1];
  return moments;
}

}  // namespace cmc

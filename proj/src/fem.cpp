#include "cmcindex/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "cmcindex/errors.hpp"
#include "cmcindex/geometry.hpp"
#include "cmcindex/parallel.hpp"

namespace cmc::fem {

namespace {

// Corner offsets (di, dj) of the two triangles of a cell.
constexpr std::array<std::array<std::array<int, 2>, 3>, 2> kCellTriangles{{
    {{{0, 0}, {1, 0}, {1, 1}}},
    {{{0, 0}, {1, 1}, {0, 1}}},
}};

struct ElementMatrices {
  std::array<int, 3> nodes;
  double stiffness[3][3];
  double mass[3][3];
  double potential[3][3];
  double max_potential;
};

ElementMatrices element_matrices(const ChartCoefficients& coeff, const ParamMesh& mesh, int t) {
  const int cell = t / 2;
  const int which = t % 2;
  const int ci = cell / mesh.m2;
  const int cj = cell % mesh.m2;
  const double h1 = mesh.periods[0] / mesh.m1;
  const double h2 = mesh.periods[1] / mesh.m2;

  ElementMatrices e{};
  e.nodes = mesh.triangles[t];
  Eigen::Vector2d p[3];
  for (int a = 0; a < 3; ++a) {
    p[a] = {(ci + kCellTriangles[which][a][0]) * h1, (cj + kCellTriangles[which][a][1]) * h2};
  }
  Eigen::Matrix2d jac;
  jac.col(0) = p[1] - p[0];
  jac.col(1) = p[2] - p[0];
  const double area = 0.5 * std::abs(jac.determinant());
  // Gradients of the barycentric basis in chart coordinates.
  const Eigen::Matrix2d jinv_t = jac.inverse().transpose();
  Eigen::Vector2d grad[3];
  grad[1] = jinv_t.col(0);
  grad[2] = jinv_t.col(1);
  grad[0] = -grad[1] - grad[2];

  e.max_potential = -std::numeric_limits<double>::infinity();
  // Mid-edge rule: point q sits on edge (q, q+1) where phi_q = phi_{q+1} = 1/2.
  for (int q = 0; q < 3; ++q) {
    const int a0 = q;
    const int a1 = (q + 1) % 3;
    const Eigen::Vector2d x = 0.5 * (p[a0] + p[a1]);
    const Eigen::Matrix2d g = coeff.metric(x[0], x[1]);
    const double sqrt_g = std::sqrt(g.determinant());
    const Eigen::Matrix2d g_inv = g.inverse();
    const double V = coeff.potential(x[0], x[1]);
    e.max_potential = std::max(e.max_potential, V);
    const double w = area / 3.0 * sqrt_g;
    double phi[3] = {0.0, 0.0, 0.0};
    phi[a0] = 0.5;
    phi[a1] = 0.5;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        e.stiffness[a][b] += w * grad[a].dot(g_inv * grad[b]);
        e.mass[a][b] += w * phi[a] * phi[b];
        e.potential[a][b] += w * V * phi[a] * phi[b];
      }
    }
  }
  return e;
}

double max_column_residual(const SparseMatrix& A, const SparseMatrix& M, const Eigen::MatrixXd& X,
                           const Eigen::VectorXd& mu, int count) {
  double worst = 0.0;
  for (int c = 0; c < count; ++c) {
    const Eigen::VectorXd x = X.col(c);
    const Eigen::VectorXd Mx = M * x;
    const double m_norm = std::sqrt(x.dot(Mx));
    worst = std::max(worst, (A * x - mu[c] * Mx).norm() / m_norm);
  }
  return worst;
}

PencilSpectrum dense_solve(const SparseMatrix& A, const SparseMatrix& M, int count) {
  const Eigen::MatrixXd Ad = Eigen::MatrixXd(A);
  const Eigen::MatrixXd Md = Eigen::MatrixXd(M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Ad, Md);
  if (ges.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", INFINITY);
  PencilSpectrum spectrum;
  spectrum.eigenvalues = ges.eigenvalues().head(count);
  spectrum.eigenvectors = ges.eigenvectors().leftCols(count);
  spectrum.count_computed = count;
  spectrum.max_residual =
      max_column_residual(A, M, spectrum.eigenvectors, spectrum.eigenvalues, count);
  return spectrum;
}

}  // namespace

int ParamMesh::node_index(int i, int j) const {
  i = ((i % m1) + m1) % m1;
  j = ((j % m2) + m2) % m2;
  return i * m2 + j;
}

std::array<double, 2> ParamMesh::node_coords(int i, int j) const {
  return {periods[0] * i / m1, periods[1] * j / m2};
}

ParamMesh build_mesh(int m1, int m2, std::array<double, 2> periods) {
  if (m1 < 4 || m2 < 4) throw ParameterError("mesh needs at least 4 nodes per period");
  if (!(periods[0] > 0.0 && periods[1] > 0.0)) throw ParameterError("mesh periods must be positive");
  ParamMesh mesh;
  mesh.m1 = m1;
  mesh.m2 = m2;
  mesh.periods = periods;
  mesh.triangles.reserve(2 * static_cast<std::size_t>(m1) * m2);
  for (int i = 0; i < m1; ++i) {
    for (int j = 0; j < m2; ++j) {
      for (const auto& tri : kCellTriangles) {
        mesh.triangles.push_back({mesh.node_index(i + tri[0][0], j + tri[0][1]),
                                  mesh.node_index(i + tri[1][0], j + tri[1][1]),
                                  mesh.node_index(i + tri[2][0], j + tri[2][1])});
      }
    }
  }
  return mesh;
}

ChartCoefficients clifford_coefficients(const AnalyticFamily& family) {
  if (!family.is_torus() || family.n() != 2) {
    throw UnsupportedFamilyError("finite elements need a global periodic chart (Clifford torus, n = 2); got " +
                                 family.label());
  }
  ChartCoefficients coeff;
  coeff.metric = [family](double u1, double u2) {
    const GeometryFrame fr = frame(family, Eigen::Vector2d(u1, u2));
    return Eigen::Matrix2d(fr.metric);
  };
  coeff.potential = [family](double u1, double u2) {
    return frame(family, Eigen::Vector2d(u1, u2)).norm_a2 + 2.0;
  };
  return coeff;
}

StabilityPencil assemble(const ChartCoefficients& coefficients, const ParamMesh& mesh) {
  if (!coefficients.metric || !coefficients.potential) {
    throw ParameterError("chart coefficients are incomplete");
  }
  const std::size_t elements = mesh.triangles.size();
  std::vector<ElementMatrices> local(elements);
  parallel::for_each_index(elements, [&](std::size_t t) {
    local[t] = element_matrices(coefficients, mesh, static_cast<int>(t));
  });

  std::vector<Eigen::Triplet<double>> k_trip;
  std::vector<Eigen::Triplet<double>> m_trip;
  std::vector<Eigen::Triplet<double>> v_trip;
  k_trip.reserve(9 * elements);
  m_trip.reserve(9 * elements);
  v_trip.reserve(9 * elements);
  StabilityPencil pencil;
  pencil.max_potential = -std::numeric_limits<double>::infinity();
  for (const ElementMatrices& e : local) {
    pencil.max_potential = std::max(pencil.max_potential, e.max_potential);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        k_trip.emplace_back(e.nodes[a], e.nodes[b], e.stiffness[a][b]);
        m_trip.emplace_back(e.nodes[a], e.nodes[b], e.mass[a][b]);
        v_trip.emplace_back(e.nodes[a], e.nodes[b], e.potential[a][b]);
      }
    }
  }
  const int N = mesh.node_count();
  pencil.stiffness.resize(N, N);
  pencil.mass.resize(N, N);
  pencil.potential.resize(N, N);
  pencil.stiffness.setFromTriplets(k_trip.begin(), k_trip.end());
  pencil.mass.setFromTriplets(m_trip.begin(), m_trip.end());
  pencil.potential.setFromTriplets(v_trip.begin(), v_trip.end());
  pencil.mesh = mesh;
  return pencil;
}

StabilityPencil assemble(const AnalyticFamily& family, const ParamMesh& mesh) {
  return assemble(clifford_coefficients(family), mesh);
}

PencilSpectrum eigen_solve(const StabilityPencil& pencil, int count, const SolverOptions& options) {
  const SparseMatrix A = pencil.form();
  const SparseMatrix& M = pencil.mass;
  const int N = static_cast<int>(A.rows());
  if (count < 1 || count > N) throw ParameterError("eigenpair count must lie in [1, dimension]");
  if (N <= options.dense_limit) return dense_solve(A, M, count);

  // Shift below the whole spectrum: K - V - sigma M >= K + M is positive definite.
  const double sigma = -std::max(pencil.max_potential, 0.0) - 1.0;
  const SparseMatrix shifted = A - sigma * M;
  Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
  if (factor.info() != Eigen::Success) {
    throw ConvergenceError("factorization of the shifted pencil failed", INFINITY);
  }

  const int block = std::min(N, std::max(2 * count, count + 8));
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd X(N, block);
  for (int c = 0; c < block; ++c) {
    for (int i = 0; i < N; ++i) X(i, c) = gauss(rng);
  }

  PencilSpectrum spectrum;
  double best = INFINITY;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const Eigen::MatrixXd Y = factor.solve(M * X);
    Eigen::MatrixXd reduced_a = Y.transpose() * (A * Y);
    Eigen::MatrixXd reduced_m = Y.transpose() * (M * Y);
    reduced_a = 0.5 * (reduced_a + reduced_a.transpose()).eval();
    reduced_m = 0.5 * (reduced_m + reduced_m.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(reduced_a, reduced_m);
    if (ritz.info() != Eigen::Success) {
      throw ConvergenceError("Rayleigh-Ritz step failed", best);
    }
    X = Y * ritz.eigenvectors();
    const Eigen::VectorXd mu = ritz.eigenvalues();
    const double residual = max_column_residual(A, M, X, mu, count);
    best = std::min(best, residual);
    if (residual <= options.tolerance) {
      spectrum.eigenvalues = mu.head(count);
      spectrum.eigenvectors = X.leftCols(count);
      spectrum.count_computed = count;
      spectrum.max_residual = residual;
      spectrum.iterations = iter;
      return spectrum;
    }
  }
  throw ConvergenceError("subspace iteration did not converge within the iteration budget", best);
}

PencilSpectrum eigen_solve_through(const StabilityPencil& pencil, double zero_tol,
                                   int initial_count, const SolverOptions& options) {
  const int N = static_cast<int>(pencil.mass.rows());
  int count = std::clamp(initial_count, 1, N);
  for (;;) {
    PencilSpectrum spectrum = eigen_solve(pencil, count, options);
    if (spectrum.eigenvalues[count - 1] > zero_tol || count == N) return spectrum;
    count = std::min(N, 2 * count);
  }
}

NegativeCount negative_count(const PencilSpectrum& spectrum, double zero_tol) {
  const Eigen::Index returned = spectrum.eigenvalues.size();
  const bool complete = spectrum.eigenvectors.rows() > 0 &&
                        spectrum.eigenvectors.rows() == spectrum.eigenvectors.cols();
  if (returned == 0 || (!(spectrum.eigenvalues[returned - 1] > zero_tol) && !complete)) {
    throw InsufficientEnumerationError(
        "largest returned eigenvalue does not exceed zeroTol; request more eigenpairs");
  }
  NegativeCount count;
  for (Eigen::Index i = 0; i < returned; ++i) {
    const double mu = spectrum.eigenvalues[i];
    if (mu < -zero_tol) {
      ++count.strong;
    } else if (mu <= zero_tol) {
      ++count.zero;
    }
  }
  return count;
}

int weak_negative_count(const StabilityPencil& pencil, const PencilSpectrum& spectrum,
                        double zero_tol) {
  negative_count(spectrum, zero_tol);
  if (spectrum.eigenvectors.cols() != spectrum.eigenvalues.size()) {
    throw ParameterError("weak count needs the eigenvectors of the spectrum");
  }
  int kept = 0;
  while (kept < spectrum.eigenvalues.size() && spectrum.eigenvalues[kept] <= zero_tol) ++kept;
  if (kept == 0) return 0;

  const SparseMatrix& M = pencil.mass;
  const SparseMatrix A = pencil.form();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(M.rows());
  const Eigen::VectorXd m_ones = M * ones;
  const double total = ones.dot(m_ones);
  // P = I - 1 (M 1)^T / (1^T M 1) maps onto the M-orthogonal complement of constants.
  const Eigen::MatrixXd X = spectrum.eigenvectors.leftCols(kept);
  const Eigen::MatrixXd Y = X - ones * ((m_ones.transpose() * X) / total);

  Eigen::MatrixXd gram_a = Y.transpose() * (A * Y);
  Eigen::MatrixXd gram_m = Y.transpose() * (M * Y);
  gram_a = 0.5 * (gram_a + gram_a.transpose()).eval();
  gram_m = 0.5 * (gram_m + gram_m.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> mass_eig(gram_m);
  const Eigen::VectorXd lambda = mass_eig.eigenvalues();
  const double floor = 1e-10 * lambda.cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > floor) keep.push_back(i);
  }
  if (keep.empty()) return 0;
  Eigen::MatrixXd basis(kept, static_cast<int>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    basis.col(c) = mass_eig.eigenvectors().col(keep[c]) / std::sqrt(lambda[keep[c]]);
  }
  const Eigen::MatrixXd restricted = basis.transpose() * gram_a * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> form_eig(restricted, Eigen::EigenvaluesOnly);
  int negatives = 0;
  for (int i = 0; i < form_eig.eigenvalues().size(); ++i) {
    if (form_eig.eigenvalues()[i] < -zero_tol) ++negatives;
  }
  return negatives;
}

void write_symmetric_coordinate(const SparseMatrix& matrix, const std::string& path) {
  std::vector<Eigen::Triplet<double>> entries;
  for (int col = 0; col < matrix.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(matrix, col); it; ++it) {
      if (it.row() >= it.col()) entries.emplace_back(it.row(), it.col(), it.value());
    }
  }
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open '" + path + "' for writing");
  out << matrix.rows() << ' ' << matrix.cols() << ' ' << entries.size() << '\n';
  char line[96];
  for (const auto& e : entries) {
    std::snprintf(line, sizeof line, "%d %d %.17g\n", e.row() + 1, e.col() + 1, e.value());
    out << line;
  }
  if (!out) throw ParameterError("failed writing '" + path + "'");
}

SparseMatrix read_symmetric_coordinate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  long rows = 0;
  long cols = 0;
  long nnz = 0;
  if (!(in >> rows >> cols >> nnz) || rows <= 0 || cols <= 0 || nnz < 0) {
    throw ParameterError("malformed header in '" + path + "'");
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * nnz);
  for (long e = 0; e < nnz; ++e) {
    long i = 0;
    long j = 0;
    double value = 0.0;
    if (!(in >> i >> j >> value) || i < 1 || j < 1 || i > rows || j > cols) {
      throw ParameterError("malformed entry in '" + path + "'");
    }
    entries.emplace_back(i - 1, j - 1, value);
    if (i != j) entries.emplace_back(j - 1, i - 1, value);
  }
  SparseMatrix matrix(rows, cols);
  matrix.setFromTriplets(entries.begin(), entries.end());
  return matrix;
}

std::vector<std::string> export_pencil(const StabilityPencil& pencil, const std::string& prefix) {
  std::vector<std::string> paths = {prefix + "_K.txt", prefix + "_M.txt", prefix + "_V.txt"};
  write_symmetric_coordinate(pencil.stiffness, paths[0]);
  write_symmetric_coordinate(pencil.mass, paths[1]);
  write_symmetric_coordinate(pencil.potential, paths[2]);
  return paths;
}

}  // namespace cmc::fem

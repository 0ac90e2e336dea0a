#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cmcindex/family.hpp"

namespace cmc::fem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Structured periodic triangulation of [0, L1) x [0, L2) with torus gluing.
/// Node (i, j) has index i * m2 + j; each cell is split along the diagonal
/// from its lower-left to its upper-right corner.
struct ParamMesh {
  int m1 = 0;
  int m2 = 0;
  std::array<double, 2> periods{};
  std::vector<std::array<int, 3>> triangles;

  int node_count() const { return m1 * m2; }
  int node_index(int i, int j) const;
  std::array<double, 2> node_coords(int i, int j) const;
};

ParamMesh build_mesh(int m1, int m2, std::array<double, 2> periods);

/// Chart coefficients of a quadratic form int g^{ab} d_a f d_b f - V f^2
/// on a periodic 2-chart. Callables may be invoked concurrently.
struct ChartCoefficients {
  std::function<Eigen::Matrix2d(double, double)> metric;
  std::function<double(double, double)> potential;
};

/// Coefficients of a Clifford torus in S^3 from the closed-form geometry:
/// metric from the frame, potential |A|^2 + 2.
ChartCoefficients clifford_coefficients(const AnalyticFamily& family);

struct StabilityPencil {
  SparseMatrix stiffness;
  SparseMatrix mass;
  SparseMatrix potential;
  ParamMesh mesh;
  double max_potential = 0.0;

  /// K - V
  SparseMatrix form() const { return stiffness - potential; }
};

StabilityPencil assemble(const ChartCoefficients& coefficients, const ParamMesh& mesh);
/// Requires a Clifford torus with n = 2.
StabilityPencil assemble(const AnalyticFamily& family, const ParamMesh& mesh);

struct PencilSpectrum {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // M-orthonormal columns
  int count_computed = 0;
  double max_residual = 0.0;
  int iterations = 0;
};

struct SolverOptions {
  int max_iterations = 2000;
  double tolerance = 1e-8;
  /// Dense generalized eigensolver below this dimension.
  int dense_limit = 600;
  std::uint64_t seed = 1968;
};

/// The `count` algebraically smallest eigenpairs of (K - V) x = mu M x.
PencilSpectrum eigen_solve(const StabilityPencil& pencil, int count,
                           const SolverOptions& options = {});

/// Repeats eigen_solve, doubling the count, until the largest returned
/// eigenvalue exceeds zero_tol.
PencilSpectrum eigen_solve_through(const StabilityPencil& pencil, double zero_tol,
                                   int initial_count = 8, const SolverOptions& options = {});

constexpr double kFemZeroTol = 0.05;

struct NegativeCount {
  int strong = 0;
  int zero = 0;
};

NegativeCount negative_count(const PencilSpectrum& spectrum, double zero_tol = kFemZeroTol);

/// Negative directions of x^T (K - V) x on the M-orthogonal complement of
/// the constants, restricted to the span of the non-positive eigenvectors.
int weak_negative_count(const StabilityPencil& pencil, const PencilSpectrum& spectrum,
                        double zero_tol = kFemZeroTol);

/// Writes "rows cols nnz" then one "i j value" line per lower-triangle entry
/// (1-based indices, 17 significant digits).
void write_symmetric_coordinate(const SparseMatrix& matrix, const std::string& path);
SparseMatrix read_symmetric_coordinate(const std::string& path);

/// Writes <prefix>_K.txt, <prefix>_M.txt and <prefix>_V.txt.
std::vector<std::string> export_pencil(const StabilityPencil& pencil, const std::string& prefix);

}  // namespace cmc::fem

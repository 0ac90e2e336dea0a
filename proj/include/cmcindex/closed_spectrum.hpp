#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmcindex/family.hpp"

namespace cmc {

/// Separated eigenmode: degree j on a round sphere, or the degree pair
/// (p, q) on the two factors of a Clifford torus.
struct ModeLabel {
  int p = 0;
  std::optional<int> q;

  std::string str() const;
  bool is_constant() const { return p == 0 && q.value_or(0) == 0; }
};

struct Mode {
  ModeLabel label;
  /// Eigenvalue of the stability operator -J = -Delta - (|A|^2 + n).
  double eigenvalue = 0.0;
  std::int64_t multiplicity = 1;
  /// Sign decided in integer arithmetic, set when r^2 is rational.
  std::optional<int> exact_sign;
};

struct ModeSpectrum {
  std::vector<Mode> modes;  // ascending eigenvalue
  double potential = 0.0;   // |A|^2 + n
  double cutoff = 0.0;
};

struct IndexCount {
  int strong = 0;
  int weak = 0;
  int zero_modes = 0;
  double zero_tol = 0.0;
};

struct SphereEigen {
  double lambda;
  std::int64_t multiplicity;
};

/// Laplace eigenvalue j(j+m-1)/radius^2 of S^m(radius) and its multiplicity.
SphereEigen sphere_eigen(int m, double radius, int j);

/// Exact multiplicity C(m+j, j) - C(m+j-2, j-2) of degree-j harmonics on S^m.
std::int64_t harmonic_multiplicity(int m, int j);

/// All modes with stability eigenvalue <= cutoff.
ModeSpectrum stability_modes(const AnalyticFamily& family, double cutoff);

constexpr double kClosedZeroTol = 1e-9;

IndexCount index_count(const ModeSpectrum& spectrum, double zero_tol = kClosedZeroTol);

std::vector<std::pair<double, IndexCount>> weak_index_sweep(int n, int k,
                                                            const std::vector<double>& r_grid,
                                                            double cutoff = 1.0,
                                                            double zero_tol = kClosedZeroTol);

}  // namespace cmc

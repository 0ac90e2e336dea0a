#include "cmcindex/closed_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmcindex/errors.hpp"
#include "cmcindex/geometry.hpp"

namespace cmc {

namespace {

using Wide = __int128;

Wide binomial(int top, int bottom) {
  if (bottom < 0 || bottom > top) return 0;
  bottom = std::min(bottom, top - bottom);
  Wide value = 1;
  for (int i = 1; i <= bottom; ++i) {
    value = value * (top - bottom + i) / i;
    if (value > std::numeric_limits<std::int64_t>::max()) {
      throw ParameterError("harmonic multiplicity overflows 64-bit integers");
    }
  }
  return value;
}

int sign_of(Wide value) { return value > 0 ? 1 : (value < 0 ? -1 : 0); }

// Sign of the Clifford mode eigenvalue times a^2 b^2 q^2 for a^2 = p/q:
// P(q-p)q + Q p q - k (q-p)^2 - (n-k) p^2 - n p (q-p)
int clifford_exact_sign(const AnalyticFamily& family, RationalSquare r2, std::int64_t P,
                        std::int64_t Q) {
  const Wide p = r2.num;
  const Wide q = r2.den;
  const Wide n = family.n();
  const Wide k = family.k();
  const Wide value = Wide(P) * (q - p) * q + Wide(Q) * p * q - k * (q - p) * (q - p) -
                     (n - k) * p * p - n * p * (q - p);
  return sign_of(value);
}

}  // namespace

std::string ModeLabel::str() const {
  if (q) return "(" + std::to_string(p) + "," + std::to_string(*q) + ")";
  return "(" + std::to_string(p) + ")";
}

std::int64_t harmonic_multiplicity(int m, int j) {
  if (m < 1 || j < 0) throw ParameterError("harmonic multiplicity needs m >= 1 and j >= 0");
  if (j == 0) return 1;
  if (j == 1) return m + 1;
  return static_cast<std::int64_t>(binomial(m + j, j) - binomial(m + j - 2, j - 2));
}

SphereEigen sphere_eigen(int m, double radius, int j) {
  if (m < 1 || !(radius > 0.0) || j < 0) {
    throw ParameterError("sphere_eigen needs m >= 1, radius > 0, j >= 0");
  }
  return {static_cast<double>(j) * (j + m - 1) / (radius * radius), harmonic_multiplicity(m, j)};
}

ModeSpectrum stability_modes(const AnalyticFamily& family, double cutoff) {
  if (!(cutoff > 0.0)) throw ParameterError("cutoff must be positive");
  const int n = family.n();
  const CurvatureInvariants inv = curvature_invariants(family);
  ModeSpectrum spectrum;
  spectrum.potential = inv.norm_a2 + n;
  spectrum.cutoff = cutoff;
  const double ceiling = cutoff + spectrum.potential;

  if (family.is_sphere()) {
    for (int j = 0;; ++j) {
      const SphereEigen e = sphere_eigen(n, family.r(), j);
      if (e.lambda > ceiling) break;
      Mode mode{{j, std::nullopt}, e.lambda - spectrum.potential, e.multiplicity, std::nullopt};
      if (family.r2()) {
        // lambda - potential = (j(j+n-1) - n) / r^2 for the umbilical sphere
        mode.exact_sign = sign_of(Wide(j) * (j + n - 1) - n);
      }
      spectrum.modes.push_back(mode);
    }
  } else {
    const int k = family.k();
    for (int p = 0;; ++p) {
      const SphereEigen first = sphere_eigen(k, family.a(), p);
      if (first.lambda > ceiling) break;
      for (int q = 0;; ++q) {
        const SphereEigen second = sphere_eigen(n - k, family.b(), q);
        const double lambda = first.lambda + second.lambda;
        if (lambda > ceiling) break;
        Mode mode{{p, q}, lambda - spectrum.potential,
                  first.multiplicity * second.multiplicity, std::nullopt};
        if (family.r2()) {
          mode.exact_sign = clifford_exact_sign(family, *family.r2(),
                                                static_cast<std::int64_t>(p) * (p + k - 1),
                                                static_cast<std::int64_t>(q) * (q + n - k - 1));
        }
        spectrum.modes.push_back(mode);
      }
    }
  }
  for (Mode& mode : spectrum.modes) {
    if (mode.exact_sign && *mode.exact_sign == 0) mode.eigenvalue = 0.0;
  }
  std::stable_sort(spectrum.modes.begin(), spectrum.modes.end(),
                   [](const Mode& x, const Mode& y) { return x.eigenvalue < y.eigenvalue; });
  return spectrum;
}

IndexCount index_count(const ModeSpectrum& spectrum, double zero_tol) {
  if (!(zero_tol >= 0.0)) throw ParameterError("zeroTol must be non-negative");
  if (!(spectrum.cutoff > zero_tol)) {
    throw InsufficientEnumerationError("spectrum cutoff must exceed zeroTol to decide the index");
  }
  IndexCount count;
  count.zero_tol = zero_tol;
  bool constant_negative = false;
  for (const Mode& mode : spectrum.modes) {
    int sign = 0;
    if (mode.exact_sign) {
      sign = *mode.exact_sign;
    } else if (mode.eigenvalue < -zero_tol) {
      sign = -1;
    } else if (mode.eigenvalue > zero_tol) {
      sign = 1;
    }
    if (sign < 0) {
      count.strong += static_cast<int>(mode.multiplicity);
      if (mode.label.is_constant()) constant_negative = true;
    } else if (sign == 0) {
      count.zero_modes += static_cast<int>(mode.multiplicity);
    }
  }
  // Constants are exact eigenfunctions; the mean-zero functions are their
  // spectral complement, so the weak index drops exactly the constant mode.
  count.weak = count.strong - (constant_negative ? 1 : 0);
  return count;
}

std::vector<std::pair<double, IndexCount>> weak_index_sweep(int n, int k,
                                                            const std::vector<double>& r_grid,
                                                            double cutoff, double zero_tol) {
  std::vector<std::pair<double, IndexCount>> rows;
  rows.reserve(r_grid.size());
  for (double r : r_grid) {
    if (!(r > 0.0 && r < 1.0)) throw ParameterError("sweep radii must lie in (0, 1)");
    const AnalyticFamily family = AnalyticFamily::clifford_torus(n, k, r);
    rows.emplace_back(r, index_count(stability_modes(family, cutoff), zero_tol));
  }
  return rows;
}

}  // namespace cmc

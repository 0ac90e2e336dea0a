#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include "cmcindex/closed_spectrum.hpp"
#include "cmcindex/errors.hpp"
#include "cmcindex/geometry.hpp"

using namespace cmc;

namespace {

// Harmonic polynomials of degree j in m+1 variables, counted directly.
long long monomials(int vars, int degree) {
  static std::map<std::pair<int, int>, long long> memo;
  if (degree < 0) return 0;
  if (vars == 1) return 1;
  const auto key = std::make_pair(vars, degree);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  long long total = 0;
  for (int d = 0; d <= degree; ++d) total += monomials(vars - 1, degree - d);
  return memo[key] = total;
}

struct BruteCount {
  int strong = 0;
  int nonconstant_negative = 0;
  int zero = 0;
};

// Mode sums on S^k(a) x S^{n-k}(b) in floating point, far from any zero.
BruteCount brute_clifford(int n, int k, double a, double tol) {
  const double b = std::sqrt(1 - a * a);
  const double potential = k * (b / a) * (b / a) + (n - k) * (a / b) * (a / b) + n;
  BruteCount c;
  for (int p = 0; p < 60; ++p) {
    for (int q = 0; q < 60; ++q) {
      const double mu = p * (p + k - 1) / (a * a) + q * (q + n - k - 1) / (b * b) - potential;
      const long long mult = (monomials(k + 1, p) - monomials(k + 1, p - 2)) *
                             (monomials(n - k + 1, q) - monomials(n - k + 1, q - 2));
      if (mu < -tol) {
        c.strong += static_cast<int>(mult);
        if (p + q > 0) c.nonconstant_negative += static_cast<int>(mult);
      } else if (mu <= tol) {
        c.zero += static_cast<int>(mult);
      }
    }
  }
  return c;
}

}  // namespace

TEST_CASE("sphere eigenvalues and multiplicities") {
  const auto s = sphere_eigen(2, 1.0, 1);
  CHECK(s.lambda == 2.0);
  CHECK(s.multiplicity == 3);
  const double a = 0.6;
  for (int p = 1; p < 6; ++p) {
    const auto c = sphere_eigen(1, a, p);
    CHECK(c.lambda == doctest::Approx(p * p / (a * a)));
    CHECK(c.multiplicity == 2);
  }
  CHECK(sphere_eigen(2, 1.0, 0).lambda == 0.0);
  CHECK(sphere_eigen(2, 1.0, 0).multiplicity == 1);
  for (int m = 1; m <= 8; ++m) {
    for (int j = 0; j <= 8; ++j) {
      CHECK(harmonic_multiplicity(m, j) == monomials(m + 1, j) - monomials(m + 1, j - 2));
    }
  }
}

TEST_CASE("mode table of the minimal Clifford torus in S^3") {
  const ModeSpectrum sp = stability_modes(AnalyticFamily::minimal_clifford(2, 1), 1.0);
  CHECK(sp.potential == doctest::Approx(4.0));
  int seen_zero = 0;
  for (const Mode& m : sp.modes) {
    const int p = m.label.p, q = *m.label.q;
    if (p == 0 && q == 0) {
      CHECK(m.eigenvalue == doctest::Approx(-4.0));
      CHECK(m.multiplicity == 1);
    } else if (p + q == 1) {
      CHECK(m.eigenvalue == doctest::Approx(-2.0));
      CHECK(m.multiplicity == 2);
    } else if (p == 1 && q == 1) {
      CHECK(m.eigenvalue == 0.0);
      CHECK(m.multiplicity == 4);
      CHECK(m.exact_sign == 0);
      ++seen_zero;
    }
    CHECK(m.eigenvalue <= 1.0);
  }
  CHECK(seen_zero == 1);
  for (std::size_t i = 1; i < sp.modes.size(); ++i) CHECK(sp.modes[i - 1].eigenvalue <= sp.modes[i].eigenvalue);
}

TEST_CASE("equator modes") {
  const ModeSpectrum sp = stability_modes(AnalyticFamily::round_sphere(2, 1.0), 1.0);
  REQUIRE(sp.modes.size() == 2);
  CHECK(sp.modes[0].eigenvalue == doctest::Approx(-2.0));
  CHECK(sp.modes[0].multiplicity == 1);
  CHECK(sp.modes[1].eigenvalue == 0.0);
  CHECK(sp.modes[1].multiplicity == 3);
}

TEST_CASE("the (1,1) mode is an exact zero for every rational radius") {
  for (const char* r2 : {"9/25", "0.36", "1/3", "81/400", "7569/10000"}) {
    const ModeSpectrum sp = stability_modes(AnalyticFamily::clifford_torus(2, 1, parse_rational(r2)), 1.0);
    bool found = false;
    for (const Mode& m : sp.modes) {
      if (m.label.p == 1 && m.label.q == 1) {
        found = true;
        CHECK(m.eigenvalue == 0.0);
        CHECK(m.exact_sign == 0);
      }
    }
    CHECK(found);
  }
}

TEST_CASE("index examples") {
  auto idx = index_count(stability_modes(AnalyticFamily::minimal_clifford(2, 1), 1.0));
  CHECK(idx.strong == 5);
  CHECK(idx.weak == 4);
  CHECK(idx.zero_modes == 4);
  idx = index_count(stability_modes(AnalyticFamily::round_sphere(2, 1.0), 1.0));
  CHECK(idx.strong == 1);
  CHECK(idx.weak == 0);
  idx = index_count(stability_modes(AnalyticFamily::minimal_clifford(4, 2), 1.0));
  CHECK(idx.strong == 7);
  CHECK(idx.weak == 6);
}

TEST_CASE("equators and minimal Clifford tori up to n = 12") {
  const auto start = std::chrono::steady_clock::now();
  for (int n = 2; n <= 12; ++n) {
    const auto eq = index_count(stability_modes(AnalyticFamily::round_sphere(n, 1.0), 1.0));
    CHECK(eq.strong == 1);
    CHECK(eq.weak == 0);
    CHECK(eq.zero_modes == n + 1);
    for (int k = 1; k < n; ++k) {
      const auto idx = index_count(stability_modes(AnalyticFamily::minimal_clifford(n, k), 1.0));
      CHECK(idx.strong == n + 3);
      CHECK(idx.weak == n + 2);
    }
  }
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 5.0);
}

TEST_CASE("round spheres: strong 1, weak 0") {
  for (int n = 2; n <= 6; ++n) {
    for (double r : {0.3, 0.8, 0.95}) {
      const auto idx = index_count(stability_modes(AnalyticFamily::round_sphere(n, r), 1.0));
      CHECK(idx.strong == 1);
      CHECK(idx.weak == 0);
    }
  }
}

TEST_CASE("weak index sweep values") {
  const auto sweep = weak_index_sweep(2, 1, {0.6, 0.45, 0.5});
  CHECK(sweep[0].second.weak == 4);
  CHECK(sweep[1].second.weak == 6);
  CHECK(sweep[2].second.weak == 4);
  CHECK(sweep[2].second.zero_modes == 6);
  const auto exact = index_count(stability_modes(AnalyticFamily::clifford_torus(2, 1, RationalSquare{1, 4}), 1.0));
  CHECK(exact.weak == 4);
  CHECK(exact.zero_modes == 6);
}

TEST_CASE("property: index agrees with brute-force mode counting") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> radius(0.15, 0.95);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> dim(2, 6);
    const int n = dim(rng);
    std::uniform_int_distribution<int> kd(1, n - 1);
    const int k = kd(rng);
    const double a = radius(rng);
    const BruteCount wide = brute_clifford(n, k, a, 1e-6);
    const BruteCount tight = brute_clifford(n, k, a, 1e-9);
    // skip radii within 1e-6 of a mode crossing other than the (1,1) zero
    if (wide.strong != tight.strong || wide.zero != tight.zero) continue;
    const auto idx = index_count(stability_modes(AnalyticFamily::clifford_torus(n, k, a), 1.0));
    CHECK(idx.strong == wide.strong);
    CHECK(idx.weak == wide.nonconstant_negative);
    CHECK(idx.zero_modes == wide.zero);
    ++compared;
  }
  CHECK(compared > 150);
}

TEST_CASE("property: the index does not depend on the cutoff") {
  for (double r : {0.3, 0.45, 0.6, 0.8}) {
    const auto family = AnalyticFamily::clifford_torus(3, 1, r);
    const auto base = index_count(stability_modes(family, 1.0));
    for (double cutoff : {0.5, 5.0, 50.0}) {
      const auto idx = index_count(stability_modes(family, cutoff));
      CHECK(idx.strong == base.strong);
      CHECK(idx.weak == base.weak);
      CHECK(idx.zero_modes == base.zero_modes);
    }
    CHECK(stability_modes(family, 5.0).modes.size() >= stability_modes(family, 1.0).modes.size());
  }
}

TEST_CASE("orientation does not change the spectrum") {
  const auto plus = index_count(stability_modes(AnalyticFamily::clifford_torus(2, 1, 0.45, 1), 1.0));
  const auto minus = index_count(stability_modes(AnalyticFamily::clifford_torus(2, 1, 0.45, -1), 1.0));
  CHECK(plus.strong == minus.strong);
  CHECK(plus.weak == minus.weak);
}

TEST_CASE("errors") {
  const auto t = AnalyticFamily::minimal_clifford(2, 1);
  CHECK_THROWS_AS(stability_modes(t, 0.0), ParameterError);
  CHECK_THROWS_AS(stability_modes(t, -1.0), ParameterError);
  CHECK_THROWS_AS(index_count(stability_modes(t, 1e-10), 1e-9), InsufficientEnumerationError);
}

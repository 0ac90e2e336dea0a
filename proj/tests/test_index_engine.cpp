#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "cmcindex/errors.hpp"
#include "cmcindex/index_engine.hpp"

using namespace cmc;
using std::numbers::pi;

namespace {

const QuadratureSpec kQuad{64, QuadratureRule::Trapezoid};

AnalyticFamily minimal() { return AnalyticFamily::minimal_clifford(2, 1); }

}  // namespace

TEST_CASE("engines") {
  CHECK(parse_engine("closed") == Engine::Closed);
  CHECK(parse_engine("fem") == Engine::Fem);
  CHECK_THROWS_AS(parse_engine("lanczos"), ParameterError);

  const IndexCount m = compute_index(minimal(), Engine::Closed);
  CHECK(m.strong == 5);
  CHECK(m.weak == 4);
  const IndexCount s3 = compute_index(AnalyticFamily::round_sphere(3, 1.0), Engine::Closed);
  CHECK(s3.strong == 1);
  CHECK(s3.weak == 0);
  const IndexCount f = compute_index(AnalyticFamily::clifford_torus(2, 1, 0.6), Engine::Fem);
  CHECK(f.weak == 4);
  CHECK(f.zero_tol == fem::kFemZeroTol);
  CHECK_THROWS_AS(compute_index(AnalyticFamily::round_sphere(2, 1.0), Engine::Fem), UnsupportedFamilyError);
}

TEST_CASE("umbilical predicate") {
  CHECK(is_umbilical(AnalyticFamily::round_sphere(2, 0.8)));
  CHECK(is_umbilical(AnalyticFamily::round_sphere(4, 1.0)));
  CHECK_FALSE(is_umbilical(minimal()));
  CHECK_FALSE(is_umbilical(AnalyticFamily::clifford_torus(3, 1, 0.3)));
}

TEST_CASE("sum of the psi quadratic forms") {
  const PropositionCheck m = proposition_check(minimal(), kQuad);
  CHECK(m.lhs == doctest::Approx(-4 * pi * pi).epsilon(1e-12));
  CHECK(m.rhs == doctest::Approx(-39.4784176).epsilon(1e-9));
  CHECK(m.rel_residual <= 1e-6);

  const PropositionCheck s = proposition_check(AnalyticFamily::round_sphere(2, 0.8), kQuad);
  CHECK(std::abs(s.lhs) <= 1e-10);
  CHECK(std::abs(s.rhs) <= 1e-12);

  const PropositionCheck c = proposition_check(AnalyticFamily::clifford_torus(2, 1, 0.6), kQuad);
  const double expected = -2.1701388888888889 * 4 * pi * pi * 0.48;
  CHECK(c.rhs == doctest::Approx(expected).epsilon(1e-12));
  CHECK(c.lhs == doctest::Approx(expected).epsilon(1e-10));
  CHECK(c.lhs == doctest::Approx(-41.122).epsilon(1e-4));

  // n = 3: -|phi|^2 * Area with Area = 2 pi a * 4 pi b^2
  const auto t3 = AnalyticFamily::clifford_torus(3, 1, 0.6);
  const PropositionCheck c3 = proposition_check(t3, {32, QuadratureRule::Trapezoid});
  CHECK(c3.rhs == doctest::Approx(-curvature_invariants(t3).norm_phi2 * 2 * pi * 0.6 * 4 * pi * 0.64).epsilon(1e-10));
  CHECK(c3.rel_residual <= 1e-6);
}

TEST_CASE("witness basis vector") {
  const CorollaryCheck m = corollary_check(minimal(), kQuad);
  REQUIRE(m.witness.has_value());
  CHECK(m.q_values[*m.witness] == doctest::Approx(-pi * pi).epsilon(1e-12));
  const CorollaryCheck s = corollary_check(AnalyticFamily::round_sphere(2, 0.8), kQuad);
  CHECK_FALSE(s.witness.has_value());
  for (double q : s.q_values) CHECK(std::abs(q) <= 1e-10);
  CHECK(corollary_check(AnalyticFamily::clifford_torus(2, 1, 0.45), kQuad).witness.has_value());
}

TEST_CASE("Gram rank of the psi functions") {
  const GramReport m = lemma_gram_check(minimal(), kQuad);
  CHECK(m.rank == 4);
  for (int i = 0; i < 4; ++i) CHECK(m.gram(i, i) == doctest::Approx(pi * pi / 2).epsilon(1e-12));
  CHECK(std::abs(m.gram(0, 1)) <= 1e-12);
  CHECK(lemma_gram_check(AnalyticFamily::round_sphere(2, 1.0), kQuad).rank == 3);
  CHECK(lemma_gram_check(minimal(), kQuad, std::numeric_limits<double>::infinity()).rank == 0);
  CHECK_THROWS_AS(lemma_gram_check(minimal(), kQuad, 0.0), ParameterError);
  for (const auto& f : builtin_families()) {
    const GramReport g = lemma_gram_check(f, suite_quadrature(f));
    CHECK(g.rank == (is_umbilical(f) ? f.n() + 1 : f.n() + 2));
  }
}

TEST_CASE("theorem examples") {
  TheoremOptions o;
  o.quadrature = kQuad;
  const TheoremReport m = theorem_check(minimal(), o);
  CHECK(m.hypothesis_gap == doctest::Approx(2.0));
  CHECK(m.case_applied == TheoremCase::Case2_intIneqGe_Hle1);
  CHECK(m.predicted_lower_bound == 4);
  CHECK(m.computed_weak_index == 4);
  CHECK(m.consistent);
  // int |grad l|^2 - 2 int l^2 = 2 pi^2 ab (1 - 2a^2) for e_1, zero here
  for (double margin : m.per_basis_integral_sign) CHECK(std::abs(margin) <= 1e-10);

  const TheoremReport s = theorem_check(AnalyticFamily::round_sphere(2, 0.8), o);
  CHECK(s.hypothesis_gap == doctest::Approx(-2 * 0.5625));
  CHECK(s.case_applied == TheoremCase::NotApplicable);
  CHECK_FALSE(s.predicted_lower_bound.has_value());
  CHECK(s.computed_weak_index == 0);
  CHECK(s.consistent);

  const double r = std::sqrt((2 - std::sqrt(2.0)) / 4);
  const TheoremReport h1 = theorem_check(AnalyticFamily::clifford_torus(2, 1, r), o);
  CHECK(h1.abs_h == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h1.case_applied == TheoremCase::Case1_Hpm1);
  CHECK(h1.predicted_lower_bound == 4);
  CHECK(h1.computed_weak_index == 6);
  CHECK(h1.consistent);
  REQUIRE(h1.case1_bound_holds.has_value());
  CHECK(*h1.case1_bound_holds);

  const TheoremReport eq = theorem_check(AnalyticFamily::round_sphere(2, 1.0), o);
  CHECK(eq.case_applied != TheoremCase::NotApplicable);
  CHECK_FALSE(eq.predicted_lower_bound.has_value());
  CHECK(eq.consistent);
}

TEST_CASE("theorem margins against the closed form") {
  TheoremOptions o;
  o.quadrature = kQuad;
  for (double a : {0.3, 0.45, 0.6, 0.8}) {
    const double b = std::sqrt(1 - a * a);
    const TheoremReport t = theorem_check(AnalyticFamily::clifford_torus(2, 1, a), o);
    CHECK(t.per_basis_integral_sign[0] == doctest::Approx(2 * pi * pi * a * b * (1 - 2 * a * a)).epsilon(1e-10));
    CHECK(t.per_basis_integral_sign[2] == doctest::Approx(2 * pi * pi * a * b * (1 - 2 * b * b)).epsilon(1e-10));
    // e_1 and e_3 margins have opposite signs off the minimal radius
    CHECK(t.case_applied == TheoremCase::NotApplicable);
    CHECK_FALSE(t.predicted_lower_bound.has_value());
    CHECK(t.worst_ge_margin < 0.0);
    CHECK(t.worst_le_margin < 0.0);
    CHECK(t.consistent);
  }
}

TEST_CASE("theorem check with the finite element engine") {
  TheoremOptions o;
  o.quadrature = kQuad;
  o.engine = Engine::Fem;
  const TheoremReport t = theorem_check(AnalyticFamily::clifford_torus(2, 1, 0.6), o);
  CHECK(t.computed_weak_index == 4);
  CHECK(t.consistent);
}

TEST_CASE("built-in catalog") {
  const auto families = builtin_families();
  int spheres = 0;
  for (const auto& f : families) spheres += f.is_sphere();
  CHECK(spheres >= 3);
  CHECK(families.size() >= 10);
  CHECK(suite_quadrature(families.front()).points_per_dim == 256);
}

TEST_CASE("closed and finite element engines agree on a 20-point grid") {
  // grid avoids mode crossings except r = 0.5, where both report the (0,2) zero
  for (int i = 0; i < 20; ++i) {
    const double r = 0.32 + 0.03 * i;
    const auto family = AnalyticFamily::clifford_torus(2, 1, r);
    const IndexCount closed = compute_index(family, Engine::Closed);
    const IndexCount fem = compute_index(family, Engine::Fem);
    CAPTURE(r);
    CHECK(closed.strong == fem.strong);
    CHECK(closed.weak == fem.weak);
  }
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace cmc {

enum class FamilyKind { RoundSphere, CliffordTorus };

/// Exact value p/q of a squared radius, kept next to the floating radius so
/// zero modes of the stability operator can be classified without rounding.
struct RationalSquare {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Parses "p/q", an integer, or a terminating decimal such as "0.36".
RationalSquare parse_rational(const std::string& text);

/// A closed-form CMC hypersurface of the unit sphere S^{n+1}.
///
/// RoundSphere(n, r): x = (r*w, sqrt(1 - r^2)) with w on the unit S^n.
/// CliffordTorus(n, k, r): S^k(a) x S^{n-k}(b) with a = r and b = sqrt(1 - r^2).
class AnalyticFamily {
 public:
  static AnalyticFamily round_sphere(int n, double r, int orientation = 1);
  static AnalyticFamily round_sphere(int n, RationalSquare r2, int orientation = 1);
  static AnalyticFamily clifford_torus(int n, int k, double r, int orientation = 1);
  static AnalyticFamily clifford_torus(int n, int k, RationalSquare r2, int orientation = 1);
  /// The minimal Clifford torus, a^2 = k/n, with exact r^2.
  static AnalyticFamily minimal_clifford(int n, int k, int orientation = 1);

  FamilyKind kind() const { return kind_; }
  bool is_sphere() const { return kind_ == FamilyKind::RoundSphere; }
  bool is_torus() const { return kind_ == FamilyKind::CliffordTorus; }
  int n() const { return n_; }
  int k() const { return k_; }
  int ambient_dim() const { return n_ + 2; }
  double r() const { return a_; }
  /// First factor radius (sphere: the radius r).
  double a() const { return a_; }
  /// Second factor radius sqrt(1 - r^2) (sphere: height of the slice).
  double b() const { return b_; }
  int orientation() const { return orientation_; }
  const std::optional<RationalSquare>& r2() const { return r2_; }

  std::string label() const;

 private:
  AnalyticFamily(FamilyKind kind, int n, int k, double a, double b, int orientation,
                 std::optional<RationalSquare> r2);

  FamilyKind kind_;
  int n_;
  int k_;
  double a_;
  double b_;
  int orientation_;
  std::optional<RationalSquare> r2_;
};

}  // namespace cmc

#include "cmcindex/family.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "cmcindex/errors.hpp"

namespace cmc {

namespace {

std::int64_t parse_int(const std::string& text) {
  if (text.empty()) throw ParameterError("empty integer in rational '" + text + "'");
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ParameterError("not an integer: '" + text + "'");
  }
  if (used != text.size()) throw ParameterError("not an integer: '" + text + "'");
  return value;
}

RationalSquare reduced(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ParameterError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  return {num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

void check_orientation(int orientation) {
  if (orientation != 1 && orientation != -1) {
    throw ParameterError("orientation must be +1 or -1");
  }
}

}  // namespace

RationalSquare parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    return reduced(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return reduced(parse_int(text), 1);

  const std::string whole = text.substr(0, dot);
  const std::string frac = text.substr(dot + 1);
  if (frac.empty() || frac.size() > 15) {
    throw ParameterError("decimal '" + text + "' needs 1 to 15 fractional digits");
  }
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
  const std::int64_t f = parse_int(frac);
  if (f < 0) throw ParameterError("malformed decimal '" + text + "'");
  const bool negative = !whole.empty() && whole[0] == '-';
  return reduced(w * den + (negative ? -f : f), den);
}

AnalyticFamily::AnalyticFamily(FamilyKind kind, int n, int k, double a, double b,
                               int orientation, std::optional<RationalSquare> r2)
    : kind_(kind), n_(n), k_(k), a_(a), b_(b), orientation_(orientation), r2_(r2) {}

AnalyticFamily AnalyticFamily::round_sphere(int n, double r, int orientation) {
  if (n < 2) throw ParameterError("hypersurface dimension n must be at least 2");
  if (!(r > 0.0 && r <= 1.0)) throw ParameterError("sphere radius r must lie in (0, 1]");
  check_orientation(orientation);
  return AnalyticFamily(FamilyKind::RoundSphere, n, 0, r, std::sqrt(1.0 - r * r), orientation,
                        std::nullopt);
}

AnalyticFamily AnalyticFamily::round_sphere(int n, RationalSquare r2, int orientation) {
  r2 = reduced(r2.num, r2.den);
  if (!(r2.num > 0 && r2.num <= r2.den)) throw ParameterError("sphere r^2 must lie in (0, 1]");
  AnalyticFamily family = round_sphere(n, std::sqrt(r2.value()), orientation);
  family.b_ = std::sqrt(static_cast<double>(r2.den - r2.num) / static_cast<double>(r2.den));
  family.r2_ = r2;
  return family;
}

AnalyticFamily AnalyticFamily::clifford_torus(int n, int k, double r, int orientation) {
  if (n < 2) throw ParameterError("hypersurface dimension n must be at least 2");
  if (k < 1 || k > n - 1) throw ParameterError("Clifford factor dimension k must lie in [1, n-1]");
  if (!(r > 0.0 && r < 1.0)) throw ParameterError("Clifford radius r must lie in (0, 1)");
  check_orientation(orientation);
  return AnalyticFamily(FamilyKind::CliffordTorus, n, k, r, std::sqrt(1.0 - r * r), orientation,
                        std::nullopt);
}

AnalyticFamily AnalyticFamily::clifford_torus(int n, int k, RationalSquare r2, int orientation) {
  r2 = reduced(r2.num, r2.den);
  if (!(r2.num > 0 && r2.num < r2.den)) throw ParameterError("Clifford r^2 must lie in (0, 1)");
  AnalyticFamily family = clifford_torus(n, k, std::sqrt(r2.value()), orientation);
  family.b_ = std::sqrt(static_cast<double>(r2.den - r2.num) / static_cast<double>(r2.den));
  family.r2_ = r2;
  return family;
}

AnalyticFamily AnalyticFamily::minimal_clifford(int n, int k, int orientation) {
  return clifford_torus(n, k, RationalSquare{k, n}, orientation);
}

std::string AnalyticFamily::label() const {
  char buf[160];
  const char* sign = orientation_ > 0 ? "+" : "-";
  std::string radius;
  if (r2_) {
    radius = "r2=" + std::to_string(r2_->num) + "/" + std::to_string(r2_->den);
  } else {
    char rbuf[40];
    std::snprintf(rbuf, sizeof rbuf, "r=%.10g", a_);
    radius = rbuf;
  }
  if (is_sphere()) {
    std::snprintf(buf, sizeof buf, "sphere(n=%d,%s,N%s)", n_, radius.c_str(), sign);
  } else {
    std::snprintf(buf, sizeof buf, "clifford(n=%d,k=%d,%s,N%s)", n_, k_, radius.c_str(), sign);
  }
  return buf;
}

}  // namespace cmc

#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rzstats {

/// Radius below which Cin uses its power series; beyond it the alternating
/// terms grow past 5e4 and double precision would lose ~12 digits.
inline constexpr double kCinSeriesRadius = 16.0;

namespace detail {

// Sum_{k>=1} (-1)^{k+1} x^{2k} / (2k (2k)!), accumulated in long double.
inline double cin_series(double x) {
  const long double x2 = static_cast<long double>(x) * x;
  long double power = 1.0L;  // x^{2k} / (2k)!
  long double sum = 0.0L;
  for (int k = 1; k < 200; ++k) {
    power *= x2 / ((2.0L * k - 1.0L) * (2.0L * k));
    const long double term = power / (2.0L * k);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-22L * (sum < 0 ? -sum : sum) || term == 0.0L) break;
  }
  return static_cast<double>(sum);
}

// Integral of cos(t)/t over [a, b], a > 0, by adaptive Gauss-Kronrod on
// panels of one half-period so each panel sees at most one sign change.
inline double cos_over_t(double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [](double t) { return std::cos(t) / t; };
  constexpr double panel = std::numbers::pi;
  double sum = 0.0;
  double carry = 0.0;
  for (double lo = a; lo < b; lo += panel) {
    const double hi = std::min(b, lo + panel);
    const double piece = gauss_kronrod<double, 21>::integrate(integrand, lo, hi, 8, 1e-15);
    const double y = piece - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace detail

/// Entire cosine integral Cin(x) = integral_0^x (1 - cos t)/t dt. Even in x.
inline double cin(double x) {
  const double ax = std::fabs(x);
  if (ax <= kCinSeriesRadius) return detail::cin_series(ax);
  static const double at_radius = detail::cin_series(kCinSeriesRadius);
  return at_radius + std::log(ax / kCinSeriesRadius) -
         detail::cos_over_t(kCinSeriesRadius, ax);
}

}  // namespace rzstats

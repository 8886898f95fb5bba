#pragma once
// Log-gamma, digamma and trigamma on the positive real axis.
//
// All three shift the argument upward with the standard recurrences until it
// is at least kAsymptoticFrom, then evaluate the Stirling-type asymptotic
// series truncated after eight Bernoulli terms. At x >= 10 the first omitted
// term is below 1e-17, so the error is dominated by rounding.
//
// Negative and complex arguments are not supported.

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "vdir/error.hpp"

namespace vdir::specfn {

inline constexpr double kAsymptoticFrom = 10.0;

namespace detail {

inline void require_positive(double x, const char* fn) {
  if (!std::isfinite(x) || !(x > 0.0)) {
    throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " +
                      std::to_string(x));
  }
}

// B_2k / (2k (2k-1)), k = 1..8
inline constexpr double kLgammaCoef[] = {
    1.0 / 12.0,     -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0,
    1.0 / 1188.0,   -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0};
// B_2k / (2k)
inline constexpr double kDigammaCoef[] = {
    1.0 / 12.0,  -1.0 / 120.0,      1.0 / 252.0, -1.0 / 240.0,
    1.0 / 132.0, -691.0 / 32760.0,  1.0 / 12.0,  -3617.0 / 8160.0};
// B_2k
inline constexpr double kTrigammaCoef[] = {
    1.0 / 6.0,  -1.0 / 30.0,       1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0,   7.0 / 6.0,  -3617.0 / 510.0};

// Horner evaluation of sum_k c[k] * t^k for k = 0..7.
inline double poly(const double (&c)[8], double t) {
  double acc = 0.0;
  for (int k = 7; k >= 0; --k) acc = acc * t + c[k];
  return acc;
}

}  // namespace detail

/// ln Gamma(x) for x > 0.
inline double lgamma(double x) {
  detail::require_positive(x, "lgamma");
  if (x == 1.0 || x == 2.0) return 0.0;
  double shift_product = 1.0;
  while (x < kAsymptoticFrom) {
    shift_product *= x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double series = inv * detail::poly(detail::kLgammaCoef, inv * inv);
  const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const double stirling = (x - 0.5) * std::log(x) - x + half_log_two_pi + series;
  return shift_product == 1.0 ? stirling : stirling - std::log(shift_product);
}

/// psi(x) = d/dx ln Gamma(x) for x > 0.
inline double digamma(double x) {
  detail::require_positive(x, "digamma");
  // psi(x) = psi(x + n) - sum 1/(x + i); accumulate the shift separately so
  // the large 1/x terms near zero are added last.
  double shift = 0.0;
  double small_terms[16];
  int n = 0;
  while (x < kAsymptoticFrom) {
    small_terms[n++] = 1.0 / x;
    x += 1.0;
  }
  for (int i = n - 1; i >= 0; --i) shift += small_terms[i];
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double asym = std::log(x) - 0.5 * inv - inv2 * detail::poly(detail::kDigammaCoef, inv2);
  return asym - shift;
}

/// psi'(x) for x > 0.
inline double trigamma(double x) {
  detail::require_positive(x, "trigamma");
  double small_terms[16];
  int n = 0;
  while (x < kAsymptoticFrom) {
    small_terms[n++] = 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double acc = inv + 0.5 * inv2 + inv * inv2 * detail::poly(detail::kTrigammaCoef, inv2);
  for (int i = n - 1; i >= 0; --i) acc += small_terms[i];
  return acc;
}

/// ln B(alpha) = sum ln Gamma(alpha_i) - ln Gamma(sum alpha_i).
inline double log_beta(std::span<const double> alpha) {
  if (alpha.empty()) throw DomainError("log_beta: empty concentration vector");
  double total = 0.0;
  double sum_lgamma = 0.0;
  for (double a : alpha) {
    sum_lgamma += lgamma(a);
    total += a;
  }
  return sum_lgamma - lgamma(total);
}

}  // namespace vdir::specfn

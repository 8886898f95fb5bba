#pragma once
// 50-digit reference values for the special functions and the closed-form
// lower bound. Test-only; shares no code with the double implementation.

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <vector>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

inline constexpr int kShiftTo = 40;
inline constexpr int kTerms = 25;

inline const std::vector<Big>& bernoulli_even() {
  static const std::vector<Big> b = [] {
    std::vector<Big> out;
    for (int k = 1; k <= kTerms; ++k) out.push_back(boost::math::bernoulli_b2n<Big>(k));
    return out;
  }();
  return b;
}

inline Big digamma(Big x) {
  Big acc = 0;
  while (x < kShiftTo) {
    acc -= 1 / x;
    x += 1;
  }
  const auto& b = bernoulli_even();
  Big inv2 = 1 / (x * x);
  Big pow = inv2;
  Big series = 0;
  for (int k = 1; k <= kTerms; ++k) {
    series += b[k - 1] / (2 * k) * pow;
    pow *= inv2;
  }
  return acc + log(x) - 1 / (2 * x) - series;
}

inline Big trigamma(Big x) {
  Big acc = 0;
  while (x < kShiftTo) {
    acc += 1 / (x * x);
    x += 1;
  }
  const auto& b = bernoulli_even();
  Big inv = 1 / x;
  Big inv2 = inv * inv;
  Big pow = inv * inv2;
  Big series = 0;
  for (int k = 1; k <= kTerms; ++k) {
    series += b[k - 1] * pow;
    pow *= inv2;
  }
  return acc + inv + inv2 / 2 + series;
}

inline Big lgamma(Big x) {
  Big shift = 0;
  while (x < kShiftTo) {
    shift += log(x);
    x += 1;
  }
  const auto& b = bernoulli_even();
  Big inv = 1 / x;
  Big inv2 = inv * inv;
  Big pow = inv;
  Big series = 0;
  for (int k = 1; k <= kTerms; ++k) {
    series += b[k - 1] / (2 * k * (2 * k - 1)) * pow;
    pow *= inv2;
  }
  const Big pi = boost::math::constants::pi<Big>();
  return (x - Big(0.5)) * log(x) - x + log(2 * pi) / 2 + series - shift;
}

inline Big log_beta(const std::vector<double>& a) {
  Big s = 0, sum = 0;
  for (double v : a) {
    s += lgamma(Big(v));
    sum += Big(v);
  }
  return s - lgamma(sum);
}

/// Differential entropy of Dir(a).
inline Big entropy(const std::vector<double>& a) {
  Big a0 = 0;
  for (double v : a) a0 += Big(v);
  Big h = log_beta(a) + (a0 - Big(a.size())) * digamma(a0);
  for (double v : a) h -= (Big(v) - 1) * digamma(Big(v));
  return h;
}

/// KL(Dir(a) || Dir(b)).
inline Big kl_divergence(const std::vector<double>& a, const std::vector<double>& b) {
  Big a0 = 0;
  for (double v : a) a0 += Big(v);
  const Big psi0 = digamma(a0);
  Big kl = log_beta(b) - log_beta(a);
  for (std::size_t i = 0; i < a.size(); ++i) kl += (Big(a[i]) - Big(b[i])) * (digamma(Big(a[i])) - psi0);
  return kl;
}

/// Central difference of a 50-digit function of double arguments. The
/// divisor is the exact distance between the two evaluation points, so the
/// only error left is the O(h^2) truncation term.
template <typename F>
std::vector<double> central_difference_hp(F&& f, std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    const double up_x = orig + h, down_x = orig - h;
    x[i] = up_x;
    const Big up = f(x);
    x[i] = down_x;
    const Big down = f(x);
    x[i] = orig;
    g[i] = static_cast<double>((up - down) / (Big(up_x) - Big(down_x)));
  }
  return g;
}

/// psi(a_y) - psi(a0) - eta * KL(Dir(a) || Dir(a_hat)), all in 50 digits.
inline Big elbo(const std::vector<double>& a, std::size_t y, const std::vector<double>& a_hat, double eta) {
  Big a0 = 0;
  for (double v : a) a0 += Big(v);
  const Big psi0 = digamma(a0);
  Big kl = log_beta(a_hat) - log_beta(a);
  for (std::size_t i = 0; i < a.size(); ++i) kl += (Big(a[i]) - Big(a_hat[i])) * (digamma(Big(a[i])) - psi0);
  return digamma(Big(a[y])) - psi0 - eta * kl;
}

}  // namespace oracle

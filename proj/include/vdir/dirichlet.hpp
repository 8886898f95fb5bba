#pragma once
// Dirichlet distribution analytics with analytic gradients in alpha.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "vdir/error.hpp"
#include "vdir/rng.hpp"
#include "vdir/specfn.hpp"

namespace vdir {

/// Smallest concentration kept after construction. Anything positive but
/// below this is raised to it and counted in `clamped()`.
inline constexpr double kMinConcentration = 1e-8;

class ConcentrationVector {
 public:
  ConcentrationVector() = default;

  explicit ConcentrationVector(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.size() < 2) {
      throw DimensionError("concentration vector needs K >= 2 entries, got " +
                           std::to_string(alpha_.size()));
    }
    alpha0_ = 0.0;
    for (double& a : alpha_) {
      if (!std::isfinite(a) || !(a > 0.0)) {
        throw DomainError("concentration entries must be finite and > 0, got " +
                          std::to_string(a));
      }
      if (a < kMinConcentration) {
        a = kMinConcentration;
        ++clamped_;
      }
      alpha0_ += a;
    }
  }

  ConcentrationVector(std::initializer_list<double> alpha)
      : ConcentrationVector(std::vector<double>(alpha)) {}

  std::size_t size() const noexcept { return alpha_.size(); }
  double operator[](std::size_t i) const { return alpha_[i]; }
  std::span<const double> values() const noexcept { return alpha_; }
  const std::vector<double>& vector() const noexcept { return alpha_; }
  double alpha0() const noexcept { return alpha0_; }
  /// Number of entries raised to kMinConcentration at construction.
  std::size_t clamped() const noexcept { return clamped_; }

  std::size_t argmax() const {
    return static_cast<std::size_t>(std::max_element(alpha_.begin(), alpha_.end()) - alpha_.begin());
  }

 private:
  std::vector<double> alpha_;
  double alpha0_ = 0.0;
  std::size_t clamped_ = 0;
};

/// A point of the probability simplex (a categorical distribution).
class SimplexPoint {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit SimplexPoint(std::vector<double> z) : z_(std::move(z)) {
    double sum = 0.0;
    for (double v : z_) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError("simplex entries must lie in [0, 1], got " + std::to_string(v));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw DomainError("simplex entries must sum to 1, got " + std::to_string(sum));
    }
  }

  std::size_t size() const noexcept { return z_.size(); }
  double operator[](std::size_t i) const { return z_[i]; }
  std::span<const double> values() const noexcept { return z_; }

 private:
  std::vector<double> z_;
};

struct ValueAndGradient {
  double value = 0.0;
  std::vector<double> grad;
};

namespace dirichlet {

inline void require_same_size(std::size_t a, std::size_t b, const char* fn) {
  if (a != b) {
    throw DimensionError(std::string(fn) + ": dimension mismatch " + std::to_string(a) +
                         " vs " + std::to_string(b));
  }
}

/// log Dir(z | alpha). A zero coordinate is only allowed where alpha_i == 1.
inline double log_pdf(const ConcentrationVector& alpha, const SimplexPoint& z) {
  require_same_size(alpha.size(), z.size(), "log_pdf");
  double acc = -specfn::log_beta(alpha.values());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 1.0) continue;
    if (z[i] <= 0.0) {
      throw DomainError("log_pdf: z on the simplex boundary where alpha_i != 1");
    }
    acc += (alpha[i] - 1.0) * std::log(z[i]);
  }
  return acc;
}

/// Differential entropy H(Dir(alpha)) and dH/dalpha.
inline ValueAndGradient entropy(const ConcentrationVector& alpha) {
  const std::size_t k = alpha.size();
  const double a0 = alpha.alpha0();
  const double excess = a0 - static_cast<double>(k);
  const double psi0 = specfn::digamma(a0);
  const double tri0 = specfn::trigamma(a0);

  ValueAndGradient out;
  out.grad.resize(k);
  double acc = specfn::log_beta(alpha.values()) + excess * psi0;
  for (std::size_t i = 0; i < k; ++i) {
    const double a = alpha[i];
    acc -= (a - 1.0) * specfn::digamma(a);
    out.grad[i] = excess * tri0 - (a - 1.0) * specfn::trigamma(a);
  }
  out.value = acc;
  return out;
}

/// KL(Dir(alpha) || Dir(alpha_hat)) and its gradient in alpha (alpha_hat held
/// constant).
inline ValueAndGradient kl_divergence(const ConcentrationVector& alpha,
                                      const ConcentrationVector& alpha_hat) {
  require_same_size(alpha.size(), alpha_hat.size(), "kl_divergence");
  const std::size_t k = alpha.size();
  const double psi0 = specfn::digamma(alpha.alpha0());
  const double tri0 = specfn::trigamma(alpha.alpha0());

  double diff_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) diff_sum += alpha[i] - alpha_hat[i];

  ValueAndGradient out;
  out.grad.resize(k);
  double acc = specfn::log_beta(alpha_hat.values()) - specfn::log_beta(alpha.values());
  for (std::size_t i = 0; i < k; ++i) {
    const double d = alpha[i] - alpha_hat[i];
    acc += d * (specfn::digamma(alpha[i]) - psi0);
    out.grad[i] = d * specfn::trigamma(alpha[i]) - diff_sum * tri0;
  }
  out.value = acc;
  return out;
}

/// Expected categorical, alpha / alpha0.
inline SimplexPoint mean(const ConcentrationVector& alpha) {
  std::vector<double> z(alpha.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = alpha[i] / alpha.alpha0();
  return SimplexPoint(std::move(z));
}

/// One draw from Dir(alpha) by normalising Gamma variates. Works in log
/// space so that very small shapes do not all underflow to zero.
inline SimplexPoint sample(const ConcentrationVector& alpha, SeededRng& rng) {
  const std::size_t k = alpha.size();
  std::vector<double> log_g(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double a = alpha[i];
    log_g[i] = a < 1.0 ? std::log(rng.gamma(a + 1.0)) + std::log(rng.uniform_open()) / a
                       : std::log(rng.gamma(a));
  }
  const double top = *std::max_element(log_g.begin(), log_g.end());
  double sum = 0.0;
  for (double& v : log_g) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : log_g) v /= sum;
  return SimplexPoint(std::move(log_g));
}

}  // namespace dirichlet
}  // namespace vdir

#pragma once
// Variational lower bound with a selectable prior, the adversarial
// discriminative term, and their weighted combination.
//
// Sign convention: the learning objective is maximised, so the scalar handed
// to the optimiser is
//     total = -mean(elbo) - lambda * mean(discriminative)
// and every gradient below is of that minimised quantity unless stated.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "vdir/config.hpp"
#include "vdir/dirichlet.hpp"
#include "vdir/error.hpp"
#include "vdir/net.hpp"
#include "vdir/specfn.hpp"

namespace vdir {

struct PriorSpec {
  PriorKind kind = PriorKind::GroundtruthPreserving;
  static constexpr double kBase = 1.0;
};

namespace objective {

/// Prior concentration for `alpha`. The copied entry is a plain value: no
/// gradient flows back into alpha through it.
inline ConcentrationVector make_prior(PriorSpec spec, const ConcentrationVector& alpha,
                                      std::optional<std::size_t> y = std::nullopt) {
  std::vector<double> hat(alpha.size(), PriorSpec::kBase);
  switch (spec.kind) {
    case PriorKind::Uniform:
      break;
    case PriorKind::GroundtruthPreserving:
      if (!y) throw ConfigError("make_prior: groundtruth-preserving prior needs a label");
      if (*y >= alpha.size()) throw DimensionError("make_prior: label out of range");
      hat[*y] = alpha[*y];
      break;
    case PriorKind::PredictionPreserving: {
      const std::size_t top = alpha.argmax();
      hat[top] = alpha[top];
      break;
    }
  }
  return ConcentrationVector(std::move(hat));
}

struct ElboTerms {
  double value = 0.0;  // psi(alpha_y) - psi(alpha0) - eta * kl
  double kl = 0.0;     // unweighted KL(Dir(alpha) || Dir(alpha_hat))
  std::vector<double> grad;  // d value / d alpha, alpha_hat held fixed
};

/// Lower bound against an explicit prior concentration.
inline ElboTerms elbo_with_prior(const ConcentrationVector& alpha, std::size_t y,
                                 const ConcentrationVector& alpha_hat, double eta) {
  if (y >= alpha.size()) throw DimensionError("elbo: label out of range");
  const double tri0 = specfn::trigamma(alpha.alpha0());
  const ValueAndGradient kl = dirichlet::kl_divergence(alpha, alpha_hat);

  ElboTerms out;
  out.kl = kl.value;
  out.value = specfn::digamma(alpha[y]) - specfn::digamma(alpha.alpha0()) - eta * kl.value;
  out.grad.resize(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    double g = -tri0 - eta * kl.grad[i];
    if (i == y) g += specfn::trigamma(alpha[y]);
    out.grad[i] = g;
  }
  return out;
}

inline ElboTerms elbo(const ConcentrationVector& alpha, std::size_t y, PriorSpec spec, double eta) {
  if (y >= alpha.size()) throw DimensionError("elbo: label out of range");
  return elbo_with_prior(alpha, y, make_prior(spec, alpha, y), eta);
}

/// dJ/dalpha for the adversarial loss J = -(psi(alpha_y) - psi(alpha0)).
inline std::vector<double> adversarial_loss_grad(const ConcentrationVector& alpha, std::size_t y) {
  const double tri0 = specfn::trigamma(alpha.alpha0());
  std::vector<double> g(alpha.size(), tri0);
  g[y] -= specfn::trigamma(alpha[y]);
  return g;
}

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// One fast-gradient-sign step on J = -(psi(alpha_y) - psi(alpha0)).
inline std::vector<double> fgsm(const ModelParams& params, std::span<const double> x, std::size_t y,
                                double epsilon, FgsmDirection direction = FgsmDirection::Ascend) {
  if (!(epsilon >= 0.0)) throw ConfigError("fgsm: epsilon must be >= 0");
  if (x.size() != params.input_dim()) throw DimensionError("fgsm: input dimension mismatch");
  if (y >= params.output_dim()) throw DimensionError("fgsm: label out of range");
  std::vector<double> out(x.begin(), x.end());
  if (epsilon == 0.0) return out;
  const ForwardResult fr = net::forward(params, x);
  const auto grad_alpha = adversarial_loss_grad(fr.alpha, y);
  const auto g = net::backward(params, fr.trace, grad_alpha);
  const double step = direction == FgsmDirection::Ascend ? epsilon : -epsilon;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += step * sign(g.input[i]);
  return out;
}

struct DiscriminativeTerms {
  double value = 0.0;               // C(clean) - C(adv)
  std::vector<double> grad_clean;   // d value / d alpha_clean
  std::vector<double> grad_adv;     // d value / d alpha_adv
};

/// Confidence gap between a clean and an adversarial prediction, with
/// confidence C = -entropy.
inline DiscriminativeTerms discriminative(const ConcentrationVector& alpha_clean,
                                          const ConcentrationVector& alpha_adv) {
  dirichlet::require_same_size(alpha_clean.size(), alpha_adv.size(), "discriminative");
  const ValueAndGradient hc = dirichlet::entropy(alpha_clean);
  const ValueAndGradient ha = dirichlet::entropy(alpha_adv);
  DiscriminativeTerms out;
  out.value = (-hc.value) - (-ha.value);
  out.grad_clean.resize(hc.grad.size());
  out.grad_adv.resize(ha.grad.size());
  for (std::size_t i = 0; i < hc.grad.size(); ++i) {
    out.grad_clean[i] = -hc.grad[i];
    out.grad_adv[i] = ha.grad[i];
  }
  return out;
}

/// Mini-batch of labelled examples; inputs view storage owned elsewhere.
struct Batch {
  std::vector<std::span<const double>> inputs;
  std::vector<std::size_t> labels;
  std::size_t size() const { return inputs.size(); }
};

struct LossBreakdown {
  double elbo_term = 0.0;            // batch mean of the lower bound (eta-weighted KL inside)
  double kl_term = 0.0;              // batch mean of the unweighted KL
  double discriminative_term = 0.0;  // batch mean of C(clean) - C(adv)
  double total = 0.0;                // -elbo_term - lambda * discriminative_term
  std::vector<std::vector<double>> grad_alpha_clean;  // d total / d alpha, per example
  std::vector<std::vector<double>> grad_alpha_adv;    // empty when lambda == 0
};

/// Per-example quantities that are treated as constants by the gradient:
/// the adversarial inputs and the prior concentrations. Supplying them pins
/// the loss to a fixed, differentiable function of the parameters.
struct FrozenTerms {
  std::vector<std::vector<double>> adversarial_inputs;
  std::vector<ConcentrationVector> priors;
};

struct BatchLoss {
  LossBreakdown breakdown;
  ModelParams grad;              // d total / d theta
  FrozenTerms frozen;            // what was used for this evaluation
  std::size_t correct = 0;       // argmax alpha == label on clean inputs
  std::size_t clamp_events = 0;  // saturated clean logits
  std::size_t logits = 0;        // clean logits inspected
};

namespace detail {

struct ExampleResult {
  double elbo = 0.0, kl = 0.0, disc = 0.0;
  std::vector<double> grad_clean, grad_adv;
  std::vector<double> adv_input;
  std::optional<ConcentrationVector> prior;
  ModelParams grad;
  bool correct = false;
  std::size_t clamp_events = 0;
};

inline ExampleResult example_loss(const ModelParams& params, std::span<const double> x, std::size_t y,
                                  const TrainConfig& cfg, double inv_batch, const FrozenTerms* frozen,
                                  std::size_t index) {
  ExampleResult r;
  const ForwardResult clean = net::forward(params, x);
  r.correct = clean.alpha.argmax() == y;
  r.clamp_events = clean.trace.clamp_events;

  ConcentrationVector prior = frozen ? frozen->priors.at(index)
                                     : make_prior(PriorSpec{cfg.prior}, clean.alpha, y);
  const ElboTerms e = elbo_with_prior(clean.alpha, y, prior, cfg.eta);
  r.prior = std::move(prior);
  r.elbo = e.value;
  r.kl = e.kl;
  r.grad_clean.resize(e.grad.size());
  for (std::size_t i = 0; i < e.grad.size(); ++i) r.grad_clean[i] = -inv_batch * e.grad[i];

  if (cfg.lambda > 0.0) {
    r.adv_input = frozen ? frozen->adversarial_inputs.at(index)
                         : fgsm(params, x, y, cfg.epsilon_fgsm, cfg.fgsm_direction);
    const ForwardResult adv = net::forward(params, r.adv_input);
    const DiscriminativeTerms d = discriminative(clean.alpha, adv.alpha);
    r.disc = d.value;
    r.grad_adv.resize(d.grad_adv.size());
    for (std::size_t i = 0; i < d.grad_clean.size(); ++i) {
      r.grad_clean[i] -= inv_batch * cfg.lambda * d.grad_clean[i];
      r.grad_adv[i] = -inv_batch * cfg.lambda * d.grad_adv[i];
    }
    r.grad = net::backward(params, clean.trace, r.grad_clean).params;
    r.grad.add_scaled(net::backward(params, adv.trace, r.grad_adv).params, 1.0);
  } else {
    r.grad = net::backward(params, clean.trace, r.grad_clean).params;
  }
  return r;
}

}  // namespace detail

/// Batch objective and its parameter gradient. Adversarial examples are
/// regenerated from the current parameters unless `frozen` is given.
/// Per-example work may run on `threads` threads; the reduction is always
/// in example order, so the result does not depend on the thread count.
inline BatchLoss total_loss(const Batch& batch, const ModelParams& params, const TrainConfig& cfg,
                            const FrozenTerms* frozen = nullptr, int threads = 1) {
  const std::size_t n = batch.size();
  if (n == 0) throw ConfigError("total_loss: empty batch");
  if (batch.labels.size() != n) throw DimensionError("total_loss: labels and inputs differ in length");
  const double inv_batch = 1.0 / static_cast<double>(n);

  std::vector<detail::ExampleResult> results(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      results[i] = detail::example_loss(params, batch.inputs[i], batch.labels[i], cfg, inv_batch, frozen, i);
  };
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (t <= 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + t - 1) / t;
    for (std::size_t s = 0; s < n; s += chunk) pool.emplace_back(work, s, std::min(n, s + chunk));
  }

  BatchLoss out;
  out.grad = params.zeros_like();
  LossBreakdown& b = out.breakdown;
  double elbo_sum = 0.0, kl_sum = 0.0, disc_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = results[i];
    elbo_sum += r.elbo;
    kl_sum += r.kl;
    disc_sum += r.disc;
    out.grad.add_scaled(r.grad, 1.0);
    out.correct += r.correct ? 1 : 0;
    out.clamp_events += r.clamp_events;
    out.logits += params.output_dim();
    b.grad_alpha_clean.push_back(std::move(r.grad_clean));
    if (cfg.lambda > 0.0) {
      b.grad_alpha_adv.push_back(std::move(r.grad_adv));
      out.frozen.adversarial_inputs.push_back(std::move(r.adv_input));
    }
    out.frozen.priors.push_back(std::move(*r.prior));
  }
  b.elbo_term = elbo_sum * inv_batch;
  b.kl_term = kl_sum * inv_batch;
  b.discriminative_term = disc_sum * inv_batch;
  b.total = -b.elbo_term - cfg.lambda * b.discriminative_term;
  return out;
}

}  // namespace objective
}  // namespace vdir

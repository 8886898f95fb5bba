#pragma once
// Mini-batch training: SGD with Nesterov momentum, weight decay, global
// gradient-norm clipping and a step learning-rate schedule.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vdir/config.hpp"
#include "vdir/data.hpp"
#include "vdir/error.hpp"
#include "vdir/net.hpp"
#include "vdir/objective.hpp"
#include "vdir/rng.hpp"

namespace vdir {

struct OptimizerState {
  ModelParams velocity;
  std::int64_t step = 0;
  int epoch = 0;
  double lr = 0.1;

  static OptimizerState for_params(const ModelParams& p, double lr) {
    return OptimizerState{p.zeros_like(), 0, 0, lr};
  }
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;           // example-weighted mean of the batch totals
  double elbo = 0.0;
  double kl = 0.0;
  double discriminative = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;   // NaN without a validation split
  double clamp_rate = 0.0;     // saturated logits / logits seen
};

struct TrainResult {
  ModelParams params;        // best validation accuracy (final when no split)
  ModelParams final_params;
  int best_epoch = 0;
  std::vector<EpochRecord> log;
};

namespace trainer {

/// base_lr / factor^(number of milestones <= epoch).
inline double lr_schedule(int epoch, double base_lr, std::span<const int> milestones, double factor) {
  double lr = base_lr;
  for (int m : milestones)
    if (epoch >= m) lr /= factor;
  return lr;
}

inline double global_norm(const ModelParams& grads) {
  double sq = 0.0;
  for (auto t : grads.tensors())
    for (double v : t) sq += v * v;
  return std::sqrt(sq);
}

/// Rescales `grads` in place to global L2 norm `max_norm` if it exceeds it.
/// Returns the norm before clipping.
inline double clip_grad_norm(ModelParams& grads, double max_norm) {
  if (!(max_norm > 0.0)) throw ConfigError("clip_grad_norm: max_norm must be > 0");
  const double norm = global_norm(grads);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto t : grads.tensors())
      for (double& v : t) v *= scale;
  }
  return norm;
}

/// g = grad + wd * p;  v = mu * v + g;  p -= lr * (g + mu * v)
inline void sgd_nesterov_step(ModelParams& params, const ModelParams& grads, OptimizerState& state,
                              double weight_decay = 5e-4, double momentum = 0.9) {
  auto p = params.tensors();
  auto g = grads.tensors();
  auto v = state.velocity.tensors();
  if (p.size() != g.size() || p.size() != v.size()) throw DimensionError("sgd step: tensor count mismatch");
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (p[t].size() != g[t].size() || p[t].size() != v[t].size())
      throw DimensionError("sgd step: tensor shape mismatch");
    for (std::size_t i = 0; i < p[t].size(); ++i) {
      const double gi = g[t][i] + weight_decay * p[t][i];
      v[t][i] = momentum * v[t][i] + gi;
      p[t][i] -= state.lr * (gi + momentum * v[t][i]);
    }
  }
  ++state.step;
}

inline double accuracy(const ModelParams& params, const Dataset& ds) {
  if (ds.rows() == 0) return std::nan("");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.rows(); ++i)
    if (net::forward(params, ds.row(i)).alpha.argmax() == ds.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(ds.rows());
}

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Trains a fresh network on `train_set`. A fixed validation split
/// (cfg.val_fraction of the rows) is held out; the parameters with the best
/// validation accuracy are returned, later epochs winning ties.
inline TrainResult train(const Dataset& train_set, const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  cfg.validate();
  train_set.validate();
  if (!train_set.labeled) throw ConfigError("train: dataset has no labels");
  if (train_set.k < 2) throw ConfigError("train: need at least two classes");

  const auto n_val = static_cast<std::size_t>(std::llround(cfg.val_fraction * static_cast<double>(train_set.rows())));
  auto [val_set, fit_set] = data::split(train_set, n_val, derive_seed(cfg.seed, 1));
  if (fit_set.rows() == 0) throw ConfigError("train: no rows left after the validation split");

  std::vector<std::size_t> sizes{fit_set.dim};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(fit_set.k);

  TrainResult result;
  ModelParams params = init(sizes, derive_seed(cfg.seed, 0));
  OptimizerState state = OptimizerState::for_params(params, cfg.base_lr);
  SeededRng shuffle_rng(derive_seed(cfg.seed, 2));

  std::vector<std::size_t> order(fit_set.rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  double best_val = -1.0;
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    state.epoch = epoch;
    state.lr = lr_schedule(epoch, cfg.base_lr, cfg.milestones, cfg.lr_factor);
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = state.lr;
    std::size_t seen = 0, correct = 0, clamps = 0, logits = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      objective::Batch b;
      const std::size_t end = std::min(order.size(), start + batch);
      for (std::size_t i = start; i < end; ++i) {
        b.inputs.push_back(fit_set.row(order[i]));
        b.labels.push_back(fit_set.labels[order[i]]);
      }
      auto loss = objective::total_loss(b, params, cfg, nullptr, cfg.threads);
      const double w = static_cast<double>(b.size());
      rec.loss += w * loss.breakdown.total;
      rec.elbo += w * loss.breakdown.elbo_term;
      rec.kl += w * loss.breakdown.kl_term;
      rec.discriminative += w * loss.breakdown.discriminative_term;
      seen += b.size();
      correct += loss.correct;
      clamps += loss.clamp_events;
      logits += loss.logits;

      clip_grad_norm(loss.grad, cfg.clip_norm);
      sgd_nesterov_step(params, loss.grad, state, cfg.weight_decay, cfg.momentum);
    }
    const double inv = 1.0 / static_cast<double>(seen);
    rec.loss *= inv;
    rec.elbo *= inv;
    rec.kl *= inv;
    rec.discriminative *= inv;
    rec.train_accuracy = static_cast<double>(correct) * inv;
    rec.clamp_rate = logits ? static_cast<double>(clamps) / static_cast<double>(logits) : 0.0;
    rec.val_accuracy = val_set.rows() ? accuracy(params, val_set) : std::nan("");

    if (val_set.rows() && rec.val_accuracy >= best_val) {
      best_val = rec.val_accuracy;
      result.params = params;
      result.best_epoch = epoch;
    }
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  result.final_params = params;
  if (!val_set.rows()) {
    result.params = params;
    result.best_epoch = cfg.epochs - 1;
  }
  return result;
}

}  // namespace trainer
}  // namespace vdir

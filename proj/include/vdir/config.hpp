#pragma once
// Training configuration and the enumerations shared across modules.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vdir/error.hpp"

namespace vdir {

/// How the prior concentration is built from the posterior one.
enum class PriorKind {
  Uniform,                // all ones
  GroundtruthPreserving,  // ones, except the label dimension copies alpha_y
  PredictionPreserving,   // ones, except argmax alpha copies itself
};

/// Sign convention for the adversarial step. Ascend moves along +grad J
/// (increases the loss); Descend moves along -grad J.
enum class FgsmDirection { Ascend, Descend };

/// Entry-wise compression applied to alpha before scoring.
enum class Smoothing { None, Log1p, Sqrt, Cbrt, Identity, Square, Sigmoid, Softsign };

inline std::string to_string(PriorKind k) {
  switch (k) {
    case PriorKind::Uniform: return "uniform";
    case PriorKind::GroundtruthPreserving: return "gt-preserve";
    case PriorKind::PredictionPreserving: return "pred-preserve";
  }
  return "?";
}

inline PriorKind parse_prior(std::string_view s) {
  if (s == "uniform") return PriorKind::Uniform;
  if (s == "gt-preserve") return PriorKind::GroundtruthPreserving;
  if (s == "pred-preserve") return PriorKind::PredictionPreserving;
  throw ConfigError("unknown prior '" + std::string(s) + "' (uniform|gt-preserve|pred-preserve)");
}

inline std::string to_string(FgsmDirection d) {
  return d == FgsmDirection::Ascend ? "ascend" : "descend";
}

inline FgsmDirection parse_fgsm_direction(std::string_view s) {
  if (s == "ascend") return FgsmDirection::Ascend;
  if (s == "descend") return FgsmDirection::Descend;
  throw ConfigError("unknown fgsm direction '" + std::string(s) + "' (ascend|descend)");
}

inline std::string to_string(Smoothing s) {
  switch (s) {
    case Smoothing::None: return "none";
    case Smoothing::Log1p: return "log1p";
    case Smoothing::Sqrt: return "sqrt";
    case Smoothing::Cbrt: return "cbrt";
    case Smoothing::Identity: return "identity";
    case Smoothing::Square: return "square";
    case Smoothing::Sigmoid: return "sigmoid";
    case Smoothing::Softsign: return "softsign";
  }
  return "?";
}

inline Smoothing parse_smoothing(std::string_view s) {
  for (Smoothing k : {Smoothing::None, Smoothing::Log1p, Smoothing::Sqrt, Smoothing::Cbrt,
                      Smoothing::Identity, Smoothing::Square, Smoothing::Sigmoid, Smoothing::Softsign}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown smoothing '" + std::string(s) +
                    "' (none|log1p|sqrt|cbrt|identity|square|sigmoid|softsign)");
}

struct TrainConfig {
  // objective
  double lambda = 0.1;
  double eta = 1.0;
  double epsilon_fgsm = 0.2;
  FgsmDirection fgsm_direction = FgsmDirection::Ascend;
  PriorKind prior = PriorKind::GroundtruthPreserving;

  // optimisation
  int epochs = 200;
  int batch_size = 128;
  std::uint64_t seed = 0;
  double base_lr = 0.1;
  std::vector<int> milestones{60, 120, 180};
  double lr_factor = 5.0;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double clip_norm = 1.0;

  // model and data handling
  std::vector<std::size_t> hidden{32, 32};
  double val_fraction = 0.1;
  int threads = 1;

  // scoring-time calibration
  Smoothing smoothing = Smoothing::None;
  double perturb_eps = 0.0;

  /// Full-scale recipe: 200 epochs, batch 128, drops at 60/120/180.
  static TrainConfig reference() { return TrainConfig{}; }

  /// Scaled-down recipe for the synthetic experiments. The adversarial step
  /// is in feature units; the synthetic features span roughly 20 units
  /// where image inputs span 1.
  static TrainConfig desk() {
    TrainConfig c;
    c.epochs = 60;
    c.batch_size = 64;
    c.milestones = {30, 45};
    c.epsilon_fgsm = 4.0;
    return c;
  }

  void validate() const {
    auto nonneg = [](double v, const char* name) {
      if (!std::isfinite(v) || v < 0.0) throw ConfigError(std::string(name) + " must be finite and >= 0");
    };
    nonneg(lambda, "lambda");
    nonneg(eta, "eta");
    nonneg(epsilon_fgsm, "fgsm_eps");
    nonneg(perturb_eps, "perturb_eps");
    nonneg(weight_decay, "weight_decay");
    nonneg(momentum, "momentum");
    if (!(base_lr > 0.0) || !std::isfinite(base_lr)) throw ConfigError("lr must be > 0");
    if (!(lr_factor > 0.0) || !std::isfinite(lr_factor)) throw ConfigError("lr_factor must be > 0");
    if (!(clip_norm > 0.0) || !std::isfinite(clip_norm)) throw ConfigError("clip_norm must be > 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction must be in [0, 1)");
    for (std::size_t i = 1; i < milestones.size(); ++i) {
      if (milestones[i] <= milestones[i - 1]) throw ConfigError("milestones must be strictly ascending");
    }
    for (std::size_t h : hidden)
      if (h == 0) throw ConfigError("hidden layer widths must be positive");
  }
};

}  // namespace vdir

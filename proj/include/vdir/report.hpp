#pragma once
// JSON forms of configs, training logs and detection reports.

#include <cmath>
#include <string>

#include <json.hpp>

#include "vdir/config.hpp"
#include "vdir/detect.hpp"
#include "vdir/error.hpp"
#include "vdir/trainer.hpp"

namespace vdir::report {

using nlohmann::json;

inline json to_json(const DetectionReport& r) {
  return json{{"fpr_at_95_tpr", r.fpr_at_95_tpr}, {"detection_error", r.detection_error},
              {"auroc", r.auroc},                 {"aupr_in", r.aupr_in},
              {"aupr_out", r.aupr_out},           {"n_in", r.n_in},
              {"n_out", r.n_out}};
}

inline DetectionReport detection_report_from_json(const json& j) {
  DetectionReport r;
  r.fpr_at_95_tpr = j.at("fpr_at_95_tpr").get<double>();
  r.detection_error = j.at("detection_error").get<double>();
  r.auroc = j.at("auroc").get<double>();
  r.aupr_in = j.at("aupr_in").get<double>();
  r.aupr_out = j.at("aupr_out").get<double>();
  r.n_in = j.at("n_in").get<std::size_t>();
  r.n_out = j.at("n_out").get<std::size_t>();
  return r;
}

inline json to_json(const EpochRecord& e) {
  json j{{"epoch", e.epoch},
         {"lr", e.lr},
         {"loss", e.loss},
         {"elbo", e.elbo},
         {"kl", e.kl},
         {"discriminative", e.discriminative},
         {"train_accuracy", e.train_accuracy},
         {"clamp_rate", e.clamp_rate}};
  j["val_accuracy"] = std::isnan(e.val_accuracy) ? json(nullptr) : json(e.val_accuracy);
  return j;
}

inline json to_json(const TrainConfig& c) {
  return json{{"lambda", c.lambda},
              {"eta", c.eta},
              {"fgsm_eps", c.epsilon_fgsm},
              {"fgsm_direction", to_string(c.fgsm_direction)},
              {"prior", to_string(c.prior)},
              {"epochs", c.epochs},
              {"batch", c.batch_size},
              {"seed", c.seed},
              {"lr", c.base_lr},
              {"milestones", c.milestones},
              {"lr_factor", c.lr_factor},
              {"momentum", c.momentum},
              {"weight_decay", c.weight_decay},
              {"clip_norm", c.clip_norm},
              {"hidden", c.hidden},
              {"val_fraction", c.val_fraction},
              {"threads", c.threads},
              {"smooth", to_string(c.smoothing)},
              {"perturb_eps", c.perturb_eps}};
}

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
inline TrainConfig apply_json(TrainConfig base, const json& j) {
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "lambda") base.lambda = v.get<double>();
      else if (key == "eta") base.eta = v.get<double>();
      else if (key == "fgsm_eps") base.epsilon_fgsm = v.get<double>();
      else if (key == "fgsm_direction") base.fgsm_direction = parse_fgsm_direction(v.get<std::string>());
      else if (key == "prior") base.prior = parse_prior(v.get<std::string>());
      else if (key == "epochs") base.epochs = v.get<int>();
      else if (key == "batch") base.batch_size = v.get<int>();
      else if (key == "seed") base.seed = v.get<std::uint64_t>();
      else if (key == "lr") base.base_lr = v.get<double>();
      else if (key == "milestones") base.milestones = v.get<std::vector<int>>();
      else if (key == "lr_factor") base.lr_factor = v.get<double>();
      else if (key == "momentum") base.momentum = v.get<double>();
      else if (key == "weight_decay") base.weight_decay = v.get<double>();
      else if (key == "clip_norm") base.clip_norm = v.get<double>();
      else if (key == "hidden") base.hidden = v.get<std::vector<std::size_t>>();
      else if (key == "val_fraction") base.val_fraction = v.get<double>();
      else if (key == "threads") base.threads = v.get<int>();
      else if (key == "smooth") base.smoothing = parse_smoothing(v.get<std::string>());
      else if (key == "perturb_eps") base.perturb_eps = v.get<double>();
      else throw ConfigError("unknown train config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  return base;
}

}  // namespace vdir::report

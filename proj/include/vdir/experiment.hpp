#pragma once
// Train-then-detect pipeline used by the CLI and the acceptance suite.

#include <cstddef>
#include <vector>

#include "vdir/config.hpp"
#include "vdir/data.hpp"
#include "vdir/detect.hpp"
#include "vdir/net.hpp"
#include "vdir/trainer.hpp"

namespace vdir::experiment {

/// Confidence of every row of `in_set` (origin In) followed by every row of
/// `out_set` (origin Out).
inline std::vector<ScoreRecord> score_sets(const ModelParams& params, const Dataset& in_set, const Dataset& out_set,
                                           const detect::ScoringOptions& opt = {}) {
  std::vector<ScoreRecord> recs;
  recs.reserve(in_set.rows() + out_set.rows());
  for (std::size_t i = 0; i < in_set.rows(); ++i) recs.push_back({detect::score(params, in_set.row(i), opt), Origin::In});
  for (std::size_t i = 0; i < out_set.rows(); ++i) recs.push_back({detect::score(params, out_set.row(i), opt), Origin::Out});
  return recs;
}

struct Outcome {
  TrainResult training;
  double test_accuracy = 0.0;
  DetectionReport report;
};

inline Outcome run(const Dataset& train_set, const Dataset& test_set, const Dataset& ood_set, const TrainConfig& cfg,
                   const trainer::EpochCallback& on_epoch = {}) {
  Outcome o;
  o.training = trainer::train(train_set, cfg, on_epoch);
  o.test_accuracy = trainer::accuracy(o.training.params, test_set);
  const auto recs = score_sets(o.training.params, test_set, ood_set, {cfg.smoothing, cfg.perturb_eps});
  o.report = detect::evaluate(recs);
  return o;
}

/// The synthetic benchmark: a 3-class mixture split 300/300 into train and
/// test, and 500 uniform-box OOD points, all in `dim` dimensions.
struct SyntheticSpec {
  double separation = 6.0;
  double sigma = 0.7;
  std::size_t dim = 16;
  std::size_t n_train = 300;
  std::size_t n_test = 300;
  std::size_t n_ood = 500;
  data::OodParams ood{};
};

struct SyntheticData {
  Dataset train, test, ood;
};

inline SyntheticData make_synthetic(const SyntheticSpec& s, std::uint64_t seed) {
  const std::size_t per_class = (s.n_train + s.n_test + 2) / 3;
  Dataset all = data::gen_gaussian_mixture(3, per_class, s.dim, s.separation, s.sigma, derive_seed(seed, 10));
  auto [train, rest] = data::split(all, s.n_train, derive_seed(seed, 11));
  auto [test, unused] = data::split(rest, s.n_test, derive_seed(seed, 12));
  Dataset ood = data::gen_ood(data::OodKind::UniformBox, s.n_ood, s.dim, s.ood, derive_seed(seed, 13));
  return {std::move(train), std::move(test), std::move(ood)};
}

}  // namespace vdir::experiment

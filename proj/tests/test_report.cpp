#include <gtest/gtest.h>

#include "vdir/report.hpp"

using vdir::TrainConfig;
namespace report = vdir::report;

TEST(ConfigJson, RoundTripsEveryField) {
  TrainConfig c = TrainConfig::desk();
  c.lambda = 0.5;
  c.prior = vdir::PriorKind::Uniform;
  c.fgsm_direction = vdir::FgsmDirection::Descend;
  c.hidden = {8, 4};
  c.smoothing = vdir::Smoothing::Cbrt;
  auto back = report::apply_json(TrainConfig::reference(), report::to_json(c));
  EXPECT_EQ(report::to_json(back).dump(), report::to_json(c).dump());
}

TEST(ConfigJson, RejectsUnknownKeys) {
  EXPECT_THROW(report::apply_json(TrainConfig::desk(), {{"lamda", 0.1}}), vdir::ConfigError);
  EXPECT_THROW(report::apply_json(TrainConfig::desk(), {{"epochs", "ten"}}), vdir::ConfigError);
  EXPECT_THROW(report::apply_json(TrainConfig::desk(), nlohmann::json::array()), vdir::ConfigError);
}

TEST(ConfigJson, PartialOverlay) {
  auto c = report::apply_json(TrainConfig::desk(), {{"lambda", 5.0}, {"prior", "pred-preserve"}});
  EXPECT_EQ(c.lambda, 5.0);
  EXPECT_EQ(c.prior, vdir::PriorKind::PredictionPreserving);
  EXPECT_EQ(c.epochs, TrainConfig::desk().epochs);
}

TEST(ReportJson, KeysAndRoundTrip) {
  vdir::DetectionReport r{0.125, 0.0625, 0.75, 0.8, 0.7, 10, 20};
  auto j = report::to_json(r);
  for (auto key : {"fpr_at_95_tpr", "detection_error", "auroc", "aupr_in", "aupr_out", "n_in", "n_out"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(report::to_json(report::detection_report_from_json(j)).dump(), j.dump());
}

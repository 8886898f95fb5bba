#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "vdir/data.hpp"

namespace fs = std::filesystem;
namespace data = vdir::data;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "vdir_data_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Mixture, CountsAndLabels) {
  auto ds = data::gen_gaussian_mixture(3, 100, 2, 6.0, 0.7, 1);
  ASSERT_EQ(ds.rows(), 300u);
  std::array<int, 3> counts{};
  for (auto y : ds.labels) ++counts.at(y);
  EXPECT_EQ(counts, (std::array<int, 3>{100, 100, 100}));
}

TEST(Mixture, DeterministicPerSeed) {
  EXPECT_EQ(data::gen_gaussian_mixture(4, 20, 5, 6.0, 0.7, 42), data::gen_gaussian_mixture(4, 20, 5, 6.0, 0.7, 42));
  EXPECT_NE(data::gen_gaussian_mixture(4, 20, 5, 6.0, 0.7, 42).features,
            data::gen_gaussian_mixture(4, 20, 5, 6.0, 0.7, 43).features);
}

TEST(Mixture, NearestMeanSeparatesWellSpacedClusters) {
  const std::size_t k = 3, d = 4;
  auto ds = data::gen_gaussian_mixture(k, 200, d, 10.0, 0.2, 9);
  std::vector<std::vector<double>> means(k, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < ds.rows(); ++i)
    for (std::size_t j = 0; j < d; ++j) means[ds.labels[i]][j] += ds.row(i)[j] / 200.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      double dist = 0.0;
      for (std::size_t j = 0; j < d; ++j) dist += std::pow(ds.row(i)[j] - means[c][j], 2);
      if (dist < best_d) best_d = dist, best = c;
    }
    hit += best == ds.labels[i];
  }
  EXPECT_GE(static_cast<double>(hit) / static_cast<double>(ds.rows()), 0.99);
}

TEST(Mixture, RejectsBadSizes) {
  EXPECT_THROW(data::gen_gaussian_mixture(1, 10, 2, 6.0, 0.7, 1), vdir::ConfigError);
  EXPECT_THROW(data::gen_gaussian_mixture(3, 10, 1, 6.0, 0.7, 1), vdir::ConfigError);
  EXPECT_THROW(data::gen_gaussian_mixture(3, 0, 2, 6.0, 0.7, 1), vdir::ConfigError);
}

TEST(Ood, UniformBoxStaysInside) {
  data::OodParams p;
  p.box_lo = -3.0;
  p.box_hi = 5.0;
  auto ds = data::gen_ood(data::OodKind::UniformBox, 500, 2, p, 3);
  ASSERT_EQ(ds.rows(), 500u);
  EXPECT_EQ(ds.dim, 2u);
  EXPECT_FALSE(ds.labeled);
  for (double v : ds.features) {
    EXPECT_GE(v, -3.0);
    EXPECT_LE(v, 5.0);
  }
}

TEST(Ood, RingNormsWithinBand) {
  data::OodParams p;
  p.radius = 20.0;
  p.width = 1.0;
  for (std::size_t d : {2u, 7u}) {
    auto ds = data::gen_ood(data::OodKind::Ring, 400, d, p, 4);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      double sq = 0.0;
      for (double v : ds.row(i)) sq += v * v;
      EXPECT_GE(std::sqrt(sq), 19.0 - 1e-12);
      EXPECT_LE(std::sqrt(sq), 21.0 + 1e-12);
    }
  }
}

TEST(Ood, ShiftedMixtureMovesFirstCoordinate) {
  data::OodParams p;
  auto ds = data::gen_ood(data::OodKind::ShiftedMixture, 90, 3, p, 5);
  double mean0 = 0.0;
  for (std::size_t i = 0; i < ds.rows(); ++i) mean0 += ds.row(i)[0] / 90.0;
  EXPECT_NEAR(mean0, p.shift, 1.0);
}

TEST(Ood, DeterministicAndKindsParse) {
  data::OodParams p;
  for (auto kind : {"uniform_box", "ring", "shifted_mixture"}) {
    auto k = data::parse_ood_kind(kind);
    EXPECT_EQ(data::gen_ood(k, 50, 3, p, 8), data::gen_ood(k, 50, 3, p, 8));
  }
  EXPECT_THROW(data::parse_ood_kind("spiral"), vdir::ConfigError);
}

TEST(Split, PartitionsEveryRowOnce) {
  auto ds = data::gen_gaussian_mixture(3, 10, 2, 6.0, 0.7, 1);
  auto [a, b] = data::split(ds, 7, 99);
  EXPECT_EQ(a.rows(), 7u);
  EXPECT_EQ(b.rows(), 23u);
  std::multiset<double> seen, orig;
  for (std::size_t i = 0; i < ds.rows(); ++i) orig.insert(ds.row(i)[0]);
  for (std::size_t i = 0; i < a.rows(); ++i) seen.insert(a.row(i)[0]);
  for (std::size_t i = 0; i < b.rows(); ++i) seen.insert(b.row(i)[0]);
  EXPECT_EQ(seen, orig);
  EXPECT_EQ(data::split(ds, 7, 99), data::split(ds, 7, 99));
  EXPECT_THROW(data::split(ds, 31, 1), vdir::ConfigError);
}

TEST(Csv, RoundTripIsExact) {
  auto ds = data::gen_gaussian_mixture(3, 30, 4, 6.0, 0.7, 11);
  ds.features[0] = 0.1;
  ds.features[1] = -1e-300;
  ds.features[2] = 123456789.123456789;
  const auto path = scratch("roundtrip.csv");
  data::save_csv(ds, path.string());
  auto back = data::load_csv(path.string());
  back.name = ds.name;
  EXPECT_EQ(back, ds);
}

TEST(Csv, HeaderNamesColumns) {
  auto ds = data::gen_gaussian_mixture(2, 1, 3, 6.0, 0.7, 1);
  const auto path = scratch("header.csv");
  data::save_csv(ds, path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "f0,f1,f2,label");
}

TEST(Csv, MissingLabelColumnMeansUnlabelled) {
  const auto path = scratch("unlabelled.csv");
  write_file(path, "f0,f1\n1.5,2\n-3,4e-2\n");
  auto ds = data::load_csv(path.string());
  EXPECT_FALSE(ds.labeled);
  EXPECT_EQ(ds.rows(), 2u);
  EXPECT_EQ(ds.features, (std::vector{1.5, 2.0, -3.0, 0.04}));
}

TEST(Csv, RaggedRowNamesTheLine) {
  const auto path = scratch("ragged.csv");
  write_file(path, "f0,f1,f2,label\n1,2,3,0\n4,5,1\n");
  try {
    data::load_csv(path.string());
    FAIL() << "expected ParseError";
  } catch (const vdir::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
}

TEST(Csv, MalformedFieldAndBadLabel) {
  const auto p1 = scratch("malformed.csv");
  write_file(p1, "f0,label\n1.0,0\nabc,1\n");
  EXPECT_THROW(data::load_csv(p1.string()), vdir::ParseError);
  const auto p2 = scratch("badlabel.csv");
  write_file(p2, "f0,label\n1.0,0\n2.0,5\n");
  EXPECT_THROW(data::load_csv(p2.string(), 3), vdir::ParseError);
  EXPECT_THROW(data::load_csv(scratch("absent.csv").string()), vdir::IoError);
}

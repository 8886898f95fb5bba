#pragma once
// Synthetic datasets and CSV persistence.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vdir/error.hpp"
#include "vdir/rng.hpp"

namespace vdir {

struct Dataset {
  std::string name;
  std::size_t dim = 0;           // features per row
  std::size_t k = 0;             // class count (0 when unlabelled and unknown)
  bool labeled = false;
  std::vector<double> features;  // rows() x dim, row-major
  std::vector<std::size_t> labels;

  std::size_t rows() const { return dim == 0 ? 0 : features.size() / dim; }
  std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }

  void validate() const {
    if (dim < 1) throw DimensionError("dataset needs at least one feature");
    if (features.size() % dim != 0) throw DimensionError("feature storage is not a whole number of rows");
    if (labeled) {
      if (labels.size() != rows()) throw DimensionError("label count does not match row count");
      for (std::size_t y : labels)
        if (y >= k) throw DimensionError("label " + std::to_string(y) + " out of range for k=" + std::to_string(k));
    } else if (!labels.empty()) {
      throw DimensionError("unlabelled dataset carries labels");
    }
  }

  bool operator==(const Dataset&) const = default;
};

namespace data {

/// Isotropic Gaussian clusters. Class c is centred at
/// separation * (cos(2 pi c / k), sin(2 pi c / k), 0, ..., 0).
/// Rows are grouped by class, n_per_class each.
inline Dataset gen_gaussian_mixture(std::size_t k, std::size_t n_per_class, std::size_t d, double separation,
                                    double noise_sigma, std::uint64_t seed) {
  if (k < 2) throw ConfigError("gen_gaussian_mixture: k must be >= 2");
  if (d < 2) throw ConfigError("gen_gaussian_mixture: d must be >= 2");
  if (n_per_class < 1) throw ConfigError("gen_gaussian_mixture: n must be >= 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(separation)) throw ConfigError("gen_gaussian_mixture: bad scale");
  SeededRng rng(seed);
  Dataset ds;
  ds.name = "mixture";
  ds.dim = d;
  ds.k = k;
  ds.labeled = true;
  ds.features.reserve(k * n_per_class * d);
  for (std::size_t c = 0; c < k; ++c) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(k);
    for (std::size_t n = 0; n < n_per_class; ++n) {
      for (std::size_t j = 0; j < d; ++j) {
        double centre = 0.0;
        if (j == 0) centre = separation * std::cos(angle);
        if (j == 1) centre = separation * std::sin(angle);
        ds.features.push_back(centre + noise_sigma * rng.normal());
      }
      ds.labels.push_back(c);
    }
  }
  return ds;
}

enum class OodKind { UniformBox, Ring, ShiftedMixture };

inline OodKind parse_ood_kind(std::string_view s) {
  if (s == "uniform_box") return OodKind::UniformBox;
  if (s == "ring") return OodKind::Ring;
  if (s == "shifted_mixture") return OodKind::ShiftedMixture;
  throw ConfigError("unknown OOD kind '" + std::string(s) + "' (uniform_box|ring|shifted_mixture)");
}

struct OodParams {
  // uniform_box: every coordinate uniform on [box_lo, box_hi]
  double box_lo = -10.0;
  double box_hi = 10.0;
  // ring: norm uniform on [radius - width, radius + width], direction uniform
  double radius = 20.0;
  double width = 1.0;
  // shifted_mixture: k Gaussian clusters as in gen_gaussian_mixture, moved by
  // `shift` along the first axis
  std::size_t k = 3;
  double separation = 6.0;
  double sigma = 0.7;
  double shift = 15.0;
};

/// Unlabelled out-of-distribution features.
inline Dataset gen_ood(OodKind kind, std::size_t n, std::size_t d, const OodParams& p, std::uint64_t seed) {
  if (n < 1) throw ConfigError("gen_ood: n must be >= 1");
  if (d < 1) throw ConfigError("gen_ood: d must be >= 1");
  SeededRng rng(seed);
  Dataset ds;
  ds.dim = d;
  ds.features.reserve(n * d);
  switch (kind) {
    case OodKind::UniformBox:
      if (!(p.box_hi > p.box_lo)) throw ConfigError("gen_ood: box_hi must exceed box_lo");
      ds.name = "uniform_box";
      for (std::size_t i = 0; i < n * d; ++i) ds.features.push_back(rng.uniform(p.box_lo, p.box_hi));
      break;
    case OodKind::Ring: {
      if (!(p.width >= 0.0) || !(p.radius - p.width >= 0.0)) throw ConfigError("gen_ood: need 0 <= width <= radius");
      ds.name = "ring";
      std::vector<double> dir(d);
      for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        do {
          norm = 0.0;
          for (double& v : dir) {
            v = rng.normal();
            norm += v * v;
          }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        const double r = rng.uniform(p.radius - p.width, p.radius + p.width);
        for (double v : dir) ds.features.push_back(r * v / norm);
      }
      break;
    }
    case OodKind::ShiftedMixture: {
      if (d < 2) throw ConfigError("gen_ood: shifted_mixture needs d >= 2");
      Dataset mix = gen_gaussian_mixture(p.k, (n + p.k - 1) / p.k, d, p.separation, p.sigma, seed);
      ds.name = "shifted_mixture";
      ds.features.assign(mix.features.begin(), mix.features.begin() + static_cast<std::ptrdiff_t>(n * d));
      for (std::size_t i = 0; i < n; ++i) ds.features[i * d] += p.shift;
      break;
    }
  }
  return ds;
}

/// Deterministic partition into the first `n_first` rows of a seeded
/// permutation and the rest. Every source row lands in exactly one part.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, std::size_t n_first, std::uint64_t seed) {
  const std::size_t n = ds.rows();
  if (n_first > n) throw ConfigError("split: n_first exceeds row count");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SeededRng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  auto take = [&](std::size_t from, std::size_t to, const char* suffix) {
    Dataset out;
    out.name = ds.name + suffix;
    out.dim = ds.dim;
    out.k = ds.k;
    out.labeled = ds.labeled;
    for (std::size_t i = from; i < to; ++i) {
      auto r = ds.row(order[i]);
      out.features.insert(out.features.end(), r.begin(), r.end());
      if (ds.labeled) out.labels.push_back(ds.labels[order[i]]);
    }
    return out;
  };
  return {take(0, n_first, "-a"), take(n_first, n, "-b")};
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace detail

/// Header `f0,...,f{d-1}` plus `,label` for labelled sets. Values are written
/// in shortest round-trip form.
inline void save_csv(const Dataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t j = 0; j < ds.dim; ++j) out << (j ? "," : "") << 'f' << j;
  if (ds.labeled) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    auto r = ds.row(i);
    for (std::size_t j = 0; j < ds.dim; ++j) out << (j ? "," : "") << detail::format_double(r[j]);
    if (ds.labeled) out << ',' << ds.labels[i];
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

/// Reads a CSV written by save_csv. When `k` is given labels must be below
/// it; otherwise k is inferred as max label + 1.
inline Dataset load_csv(const std::string& path, std::optional<std::size_t> k = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(line_no, "missing header row in '" + path + "'");

  const auto header = detail::split_fields(detail::trim(line));
  Dataset ds;
  ds.name = path;
  std::size_t n_cols = header.size();
  ds.labeled = detail::trim(header.back()) == "label";
  ds.dim = ds.labeled ? n_cols - 1 : n_cols;
  if (ds.dim < 1) throw ParseError(line_no, "header declares no feature columns");
  for (std::size_t j = 0; j < ds.dim; ++j) {
    if (detail::trim(header[j]) != "f" + std::to_string(j))
      throw ParseError(line_no, "expected column 'f" + std::to_string(j) + "'");
  }

  std::size_t max_label = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    const auto fields = detail::split_fields(body);
    if (fields.size() != n_cols) {
      throw ParseError(line_no, "expected " + std::to_string(n_cols) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < ds.dim; ++j) {
      const std::string_view f = detail::trim(fields[j]);
      double v = 0.0;
      auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size() || !std::isfinite(v))
        throw ParseError(line_no, "bad number '" + std::string(f) + "' in column f" + std::to_string(j));
      ds.features.push_back(v);
    }
    if (ds.labeled) {
      const std::string_view f = detail::trim(fields.back());
      std::size_t y = 0;
      auto res = std::from_chars(f.data(), f.data() + f.size(), y);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
        throw ParseError(line_no, "bad label '" + std::string(f) + "'");
      if (k && y >= *k) throw ParseError(line_no, "label " + std::to_string(y) + " out of range for k=" + std::to_string(*k));
      max_label = std::max(max_label, y);
      ds.labels.push_back(y);
    }
  }
  if (ds.labeled) ds.k = k ? *k : (ds.labels.empty() ? 0 : max_label + 1);
  return ds;
}

}  // namespace data
}  // namespace vdir

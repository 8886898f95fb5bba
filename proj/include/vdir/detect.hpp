#pragma once
// Confidence scoring and out-of-distribution evaluation.
//
// A sample is accepted as in-distribution when its confidence is strictly
// above the threshold. Every metric treats in-distribution as the positive
// class except aupr_out, which swaps roles and negates the scores.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "vdir/config.hpp"
#include "vdir/dirichlet.hpp"
#include "vdir/error.hpp"
#include "vdir/net.hpp"
#include "vdir/objective.hpp"

namespace vdir {

enum class Origin { In, Out };

struct ScoreRecord {
  double score = 0.0;
  Origin origin = Origin::In;
};

struct DetectionReport {
  double fpr_at_95_tpr = 0.0;  // at the configured TPR target
  double detection_error = 0.0;
  double auroc = 0.0;
  double aupr_in = 0.0;
  double aupr_out = 0.0;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

namespace detect {

/// C(alpha) = -H(Dir(alpha)).
inline double confidence(const ConcentrationVector& alpha) { return -dirichlet::entropy(alpha).value; }

inline double smooth_value(double a, Smoothing kind) {
  switch (kind) {
    case Smoothing::None:
    case Smoothing::Identity: return a;
    case Smoothing::Log1p: return std::log1p(a);
    case Smoothing::Sqrt: return std::sqrt(a);
    case Smoothing::Cbrt: return std::cbrt(a);
    case Smoothing::Square: return a * a;
    case Smoothing::Sigmoid: return 1.0 / (1.0 + std::exp(-a));
    case Smoothing::Softsign: return a / (1.0 + a);
  }
  return a;
}

/// Entry-wise smoothing; results below kMinConcentration are raised to it.
inline ConcentrationVector smooth(const ConcentrationVector& alpha, Smoothing kind) {
  if (kind == Smoothing::None || kind == Smoothing::Identity) return alpha;
  std::vector<double> out(alpha.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::max(smooth_value(alpha[i], kind), kMinConcentration);
  return ConcentrationVector(std::move(out));
}

inline constexpr double kDefaultPerturbEpsilon = 0.01;

/// x - eps * sign(grad_x [psi(alpha0) - psi(alpha_yhat)]), with yhat the
/// model's own prediction.
inline std::vector<double> perturb_input(const ModelParams& params, std::span<const double> x,
                                         double epsilon = kDefaultPerturbEpsilon) {
  if (!(epsilon >= 0.0)) throw ConfigError("perturb_input: epsilon must be >= 0");
  if (x.size() != params.input_dim()) throw DimensionError("perturb_input: input dimension mismatch");
  std::vector<double> out(x.begin(), x.end());
  if (epsilon == 0.0) return out;
  const ForwardResult fr = net::forward(params, x);
  const auto grad_alpha = objective::adversarial_loss_grad(fr.alpha, fr.alpha.argmax());
  const auto g = net::backward(params, fr.trace, grad_alpha);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= epsilon * objective::sign(g.input[i]);
  return out;
}

inline Origin classify(double score, double threshold) { return score > threshold ? Origin::In : Origin::Out; }

struct ScoringOptions {
  Smoothing smoothing = Smoothing::None;
  double perturb_eps = 0.0;
};

inline double score(const ModelParams& params, std::span<const double> x, const ScoringOptions& opt = {}) {
  if (opt.perturb_eps > 0.0) {
    const auto xp = perturb_input(params, x, opt.perturb_eps);
    return confidence(smooth(net::forward(params, xp).alpha, opt.smoothing));
  }
  return confidence(smooth(net::forward(params, x).alpha, opt.smoothing));
}

namespace detail {

struct Group {
  double score;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
};

// Distinct scores in descending order with per-origin counts.
inline std::vector<Group> groups_descending(std::span<const ScoreRecord> records) {
  std::vector<ScoreRecord> sorted(records.begin(), records.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  std::vector<Group> out;
  for (const auto& r : sorted) {
    if (out.empty() || out.back().score != r.score) out.push_back(Group{r.score});
    (r.origin == Origin::In ? out.back().n_in : out.back().n_out) += 1;
  }
  return out;
}

// Step-curve average precision for the positive class `pos_in` (true: in)
// with groups ordered from most to least positive.
template <typename It>
double average_precision(It first, It last, bool pos_in, std::size_t n_pos) {
  double ap = 0.0;
  std::size_t tp = 0, fp = 0;
  for (auto it = first; it != last; ++it) {
    const std::size_t p = pos_in ? it->n_in : it->n_out;
    const std::size_t n = pos_in ? it->n_out : it->n_in;
    tp += p;
    fp += n;
    if (p == 0) continue;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += precision * static_cast<double>(p) / static_cast<double>(n_pos);
  }
  return std::min(ap, 1.0);  // the sum can round a few ulp past 1
}

}  // namespace detail

/// ROC polyline from (0,0) to (1,1), one vertex per distinct score.
inline std::vector<RocPoint> roc_curve(std::span<const ScoreRecord> records) {
  const auto groups = detail::groups_descending(records);
  std::size_t n_in = 0, n_out = 0;
  for (const auto& g : groups) {
    n_in += g.n_in;
    n_out += g.n_out;
  }
  if (n_in == 0 || n_out == 0) throw ConfigError("roc_curve: need both in and out records");
  std::vector<RocPoint> pts{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (const auto& g : groups) {
    tp += g.n_in;
    fp += g.n_out;
    pts.push_back({static_cast<double>(fp) / static_cast<double>(n_out),
                   static_cast<double>(tp) / static_cast<double>(n_in)});
  }
  return pts;
}

inline DetectionReport evaluate(std::span<const ScoreRecord> records, double tpr_target = 0.95) {
  for (const auto& r : records)
    if (!std::isfinite(r.score)) throw DomainError("evaluate: non-finite score");
  const auto groups = detail::groups_descending(records);
  DetectionReport rep;
  for (const auto& g : groups) {
    rep.n_in += g.n_in;
    rep.n_out += g.n_out;
  }
  if (rep.n_in == 0 || rep.n_out == 0) throw ConfigError("evaluate: need at least one in and one out record");
  const double n_in = static_cast<double>(rep.n_in);
  const double n_out = static_cast<double>(rep.n_out);

  // Walk thresholds from high to low: after group j, accepted = score >= s_j.
  std::size_t tp = 0, fp = 0;
  double pair_wins = 0.0;  // sum over in of (#out below + 0.5 #out tied)
  bool fpr_found = false;
  double best_err = 0.5;   // threshold at +inf / -inf
  for (const auto& g : groups) {
    const std::size_t out_below = rep.n_out - fp - g.n_out;
    pair_wins += static_cast<double>(g.n_in) * (static_cast<double>(out_below) + 0.5 * static_cast<double>(g.n_out));
    tp += g.n_in;
    fp += g.n_out;
    if (!fpr_found && static_cast<double>(tp) >= tpr_target * n_in - 1e-9) {
      rep.fpr_at_95_tpr = static_cast<double>(fp) / n_out;
      fpr_found = true;
    }
    // delta just below s_j: in rejected iff score < s_j, out accepted iff score >= s_j
    const double err = 0.5 * (n_in - static_cast<double>(tp)) / n_in + 0.5 * static_cast<double>(fp) / n_out;
    best_err = std::min(best_err, err);
  }
  rep.auroc = pair_wins / (n_in * n_out);
  rep.detection_error = best_err;
  rep.aupr_in = detail::average_precision(groups.begin(), groups.end(), true, rep.n_in);
  rep.aupr_out = detail::average_precision(groups.rbegin(), groups.rend(), false, rep.n_out);
  return rep;
}

}  // namespace detect
}  // namespace vdir

#pragma once
// Feedforward concentration network: tanh hidden layers, a linear output
// layer producing logits o, and the exponential link alpha = exp(clamp(o)).
// Gradients are exact reverse-mode with respect to both the parameters and
// the input.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vdir/dirichlet.hpp"
#include "vdir/error.hpp"
#include "vdir/rng.hpp"

namespace vdir {

inline constexpr double kLogitClamp = 15.0;

struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;  // out x in, row-major
  std::vector<double> bias;    // out

  Layer() = default;
  Layer(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weight(in_dim * out_dim, 0.0), bias(out_dim, 0.0) {}

  double& w(std::size_t row, std::size_t col) { return weight[row * in + col]; }
  double w(std::size_t row, std::size_t col) const { return weight[row * in + col]; }

  bool operator==(const Layer&) const = default;
};

/// Network parameters. Every layer but the last is followed by tanh.
struct ModelParams {
  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in; }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
  }

  /// Mutable views over every weight and bias tensor, in storage order.
  std::vector<std::span<double>> tensors() {
    std::vector<std::span<double>> out;
    for (auto& l : layers) {
      out.emplace_back(l.weight);
      out.emplace_back(l.bias);
    }
    return out;
  }
  std::vector<std::span<const double>> tensors() const {
    std::vector<std::span<const double>> out;
    for (const auto& l : layers) {
      out.emplace_back(l.weight);
      out.emplace_back(l.bias);
    }
    return out;
  }

  void validate() const {
    if (layers.empty()) throw DimensionError("model has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const Layer& l = layers[i];
      if (l.in == 0 || l.out == 0) throw DimensionError("layer with zero width");
      if (l.weight.size() != l.in * l.out || l.bias.size() != l.out) {
        throw DimensionError("layer " + std::to_string(i) + " storage does not match its shape");
      }
      if (i > 0 && layers[i - 1].out != l.in) {
        throw DimensionError("layer " + std::to_string(i) + " input width does not chain");
      }
      for (double v : l.weight)
        if (!std::isfinite(v)) throw DomainError("non-finite weight");
      for (double v : l.bias)
        if (!std::isfinite(v)) throw DomainError("non-finite bias");
    }
  }

  /// Same shape, all zeros.
  ModelParams zeros_like() const {
    ModelParams z;
    z.layers.reserve(layers.size());
    for (const auto& l : layers) z.layers.emplace_back(l.in, l.out);
    return z;
  }

  /// this += scale * other (shapes must match).
  void add_scaled(const ModelParams& other, double scale) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      auto& a = layers[i];
      const auto& b = other.layers.at(i);
      for (std::size_t j = 0; j < a.weight.size(); ++j) a.weight[j] += scale * b.weight[j];
      for (std::size_t j = 0; j < a.bias.size(); ++j) a.bias[j] += scale * b.bias[j];
    }
  }

  bool operator==(const ModelParams&) const = default;
};

/// Glorot-normal weights (variance 2 / (fan_in + fan_out)), zero biases.
inline ModelParams init(std::span<const std::size_t> layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw ConfigError("init: need at least input and output sizes");
  for (std::size_t s : layer_sizes)
    if (s == 0) throw ConfigError("init: layer sizes must be positive");
  SeededRng rng(seed);
  ModelParams p;
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    Layer l(layer_sizes[i], layer_sizes[i + 1]);
    const double sd = std::sqrt(2.0 / static_cast<double>(l.in + l.out));
    for (double& w : l.weight) w = sd * rng.normal();
    p.layers.push_back(std::move(l));
  }
  return p;
}

inline ModelParams init(std::initializer_list<std::size_t> layer_sizes, std::uint64_t seed) {
  return init(std::span<const std::size_t>(layer_sizes.begin(), layer_sizes.size()), seed);
}

struct ForwardTrace {
  // activations[0] is the input; activations[l + 1] is the output of layer l
  // (tanh applied for hidden layers, raw logits for the last one).
  std::vector<std::vector<double>> activations;
  std::vector<double> logits;
  std::vector<double> alpha;
  std::vector<bool> saturated;  // |logit| > kLogitClamp
  std::size_t clamp_events = 0;
};

struct ForwardResult {
  ConcentrationVector alpha;
  ForwardTrace trace;
};

namespace net {

inline ForwardResult forward(const ModelParams& params, std::span<const double> x) {
  if (params.layers.empty()) throw DimensionError("forward: model has no layers");
  if (x.size() != params.input_dim()) {
    throw DimensionError("forward: input has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(params.input_dim()));
  }
  ForwardTrace t;
  t.activations.reserve(params.layers.size() + 1);
  t.activations.emplace_back(x.begin(), x.end());
  for (std::size_t li = 0; li < params.layers.size(); ++li) {
    const Layer& l = params.layers[li];
    const std::vector<double>& a = t.activations.back();
    std::vector<double> z(l.out);
    for (std::size_t r = 0; r < l.out; ++r) {
      double acc = l.bias[r];
      const double* row = &l.weight[r * l.in];
      for (std::size_t c = 0; c < l.in; ++c) acc += row[c] * a[c];
      z[r] = acc;
    }
    const bool hidden = li + 1 < params.layers.size();
    if (hidden)
      for (double& v : z) v = std::tanh(v);
    t.activations.push_back(std::move(z));
  }
  t.logits = t.activations.back();
  const std::size_t k = t.logits.size();
  t.alpha.resize(k);
  t.saturated.assign(k, false);
  for (std::size_t i = 0; i < k; ++i) {
    const double o = t.logits[i];
    if (o > kLogitClamp || o < -kLogitClamp) {
      t.saturated[i] = true;
      ++t.clamp_events;
    }
    t.alpha[i] = std::exp(std::clamp(o, -kLogitClamp, kLogitClamp));
  }
  ConcentrationVector alpha(t.alpha);
  return {std::move(alpha), std::move(t)};
}

struct Gradients {
  ModelParams params;
  std::vector<double> input;
};

/// Pulls dL/dalpha back to dL/dtheta and dL/dx. The logit gradient is
/// dL/dalpha * alpha, zero where the clamp was active.
inline Gradients backward(const ModelParams& params, const ForwardTrace& trace,
                          std::span<const double> grad_alpha) {
  const std::size_t n_layers = params.layers.size();
  if (trace.activations.size() != n_layers + 1 || trace.alpha.size() != params.output_dim()) {
    throw DimensionError("backward: trace does not match model");
  }
  if (grad_alpha.size() != params.output_dim()) {
    throw DimensionError("backward: gradient has " + std::to_string(grad_alpha.size()) +
                         " entries, model outputs " + std::to_string(params.output_dim()));
  }
  Gradients g{params.zeros_like(), {}};
  std::vector<double> delta(grad_alpha.size());
  for (std::size_t i = 0; i < delta.size(); ++i)
    delta[i] = trace.saturated[i] ? 0.0 : grad_alpha[i] * trace.alpha[i];

  for (std::size_t li = n_layers; li-- > 0;) {
    const Layer& l = params.layers[li];
    Layer& gl = g.params.layers[li];
    const std::vector<double>& a_in = trace.activations[li];
    std::vector<double> upstream(l.in, 0.0);
    for (std::size_t r = 0; r < l.out; ++r) {
      const double d = delta[r];
      gl.bias[r] = d;
      if (d == 0.0) continue;
      const double* row = &l.weight[r * l.in];
      double* grow = &gl.weight[r * l.in];
      for (std::size_t c = 0; c < l.in; ++c) {
        grow[c] = d * a_in[c];
        upstream[c] += row[c] * d;
      }
    }
    if (li > 0) {
      // a_in = tanh(z) for the previous (hidden) layer.
      for (std::size_t c = 0; c < l.in; ++c) upstream[c] *= 1.0 - a_in[c] * a_in[c];
    }
    delta = std::move(upstream);
  }
  g.input = std::move(delta);
  return g;
}

}  // namespace net
}  // namespace vdir

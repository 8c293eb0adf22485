#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "signnet/network.hpp"

namespace signnet {

enum class Loss { mse, bce };

inline Loss parse_loss(const std::string& name) {
  if (name == "mse") return Loss::mse;
  if (name == "bce") return Loss::bce;
  throw ParseError("unknown loss '" + name + "'");
}

inline const char* to_string(Loss l) noexcept { return l == Loss::mse ? "mse" : "bce"; }

/// Gradient of one layer, shaped like the layer: weights (dense) or kernel
/// (conv) plus bias (dense only). Pooling layers carry empty members.
struct LayerGradient {
  Mat64 weights;
  Vec64 bias;
};

struct Gradients {
  std::vector<LayerGradient> layers;
};

struct BackpropResult {
  double loss = 0.0;
  Gradients gradients;
};

namespace detail {

constexpr double kBceClamp = 1e-12;

inline double loss_value(const Vec64& y, const Vec64& target, Loss loss) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (loss == Loss::mse) {
      const double e = y[i] - target[i];
      total += 0.5 * e * e;
    } else {
      const double p = std::clamp(y[i], kBceClamp, 1.0 - kBceClamp);
      total -= target[i] * std::log(p) + (1.0 - target[i]) * std::log(1.0 - p);
    }
  }
  return total;
}

inline Vec64 loss_gradient(const Vec64& y, const Vec64& target, Loss loss) {
  Vec64 g(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (loss == Loss::mse) {
      g[i] = y[i] - target[i];
    } else {
      const double p = std::clamp(y[i], kBceClamp, 1.0 - kBceClamp);
      g[i] = (p - target[i]) / (p * (1.0 - p));
    }
  }
  return g;
}

}  // namespace detail

/// Reverse-mode gradients of the loss at (x, target). mse is 1/2 sum (y - t)^2;
/// bce clamps outputs into [1e-12, 1 - 1e-12]. relu'(0) = 0; pooling routes the
/// gradient to the arg max member, lowest index on ties.
inline BackpropResult backprop(const Network& net, const Vec64& x, const Vec64& target, Loss loss) {
  const ForwardTrace trace = forward_trace(net, x);
  const Vec64& y = trace.outputs.back();
  if (target.size() != y.size())
    throw ShapeError("backprop: target length " + std::to_string(target.size()) +
                     " but network output " + std::to_string(y.size()));
  BackpropResult result;
  result.loss = detail::loss_value(y, target, loss);
  if (!std::isfinite(result.loss)) throw NumericError("backprop: non-finite loss");

  const std::size_t depth = net.layers.size();
  std::vector<Vec64> grad_out(depth + 1);
  for (std::size_t k = 0; k <= depth; ++k) grad_out[k] = Vec64(net.width(k));
  grad_out[depth] = detail::loss_gradient(y, target, loss);
  result.gradients.layers.resize(depth);

  for (std::size_t k = depth; k >= 1; --k) {
    const Vec64& g = grad_out[k];
    for (const SkipLink& s : net.skips)
      if (s.to == k)
        for (std::size_t r = 0; r < g.size(); ++r) grad_out[s.from][r] += g[r];

    const std::size_t i = k - 1;
    const Vec64& in = trace.outputs[i];
    Vec64& g_in = grad_out[i];
    LayerGradient& lg = result.gradients.layers[i];
    if (const auto* d = std::get_if<DenseLayer>(&net.layers[i])) {
      const Activation act = effective_activation(net, i, d->activation);
      const Vec64& z = trace.pre[i];
      Vec64 dz(z.size());
      for (std::size_t r = 0; r < z.size(); ++r) dz[r] = g[r] * activation_derivative(act, z[r]);
      lg.weights = Mat64(d->weights.rows(), d->weights.cols());
      for (std::size_t r = 0; r < dz.size(); ++r)
        for (std::size_t c = 0; c < in.size(); ++c) lg.weights(r, c) = dz[r] * in[c];
      lg.bias = dz;
      for (std::size_t r = 0; r < dz.size(); ++r)
        for (std::size_t c = 0; c < in.size(); ++c) g_in[c] += d->weights(r, c) * dz[r];
    } else if (const auto* cv = std::get_if<ConvLayer>(&net.layers[i])) {
      const Activation act = effective_activation(net, i, cv->activation);
      const Vec64& z = trace.pre[i];
      const std::size_t out_cols = cv->out_cols();
      const Mat64& kernel = cv->kernel;
      lg.weights = Mat64(kernel.rows(), kernel.cols());
      for (std::size_t oi = 0; oi < cv->out_rows(); ++oi)
        for (std::size_t oj = 0; oj < out_cols; ++oj) {
          const std::size_t o = oi * out_cols + oj;
          const double dz = g[o] * activation_derivative(act, z[o]);
          if (dz == 0.0) continue;
          for (std::size_t a = 0; a < kernel.rows(); ++a)
            for (std::size_t b = 0; b < kernel.cols(); ++b) {
              const std::size_t src = (oi + a) * cv->in_cols + (oj + b);
              lg.weights(a, b) += dz * in[src];
              g_in[src] += dz * kernel(a, b);
            }
        }
    } else {
      const auto& pool = std::get<PoolLayer>(net.layers[i]);
      for (std::size_t grp = 0; grp < pool.groups.size(); ++grp)
        g_in[pool_argmax(pool.groups[grp], in)] += g[grp];
    }
  }
  return result;
}

/// Euclidean projection of every constrained weight onto its permitted sign
/// set: nonneg -> max(w, 0), mask -1 -> min(w, 0). Biases untouched.
inline void project_in_place(Network& net, const SignConstraint& constraint) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!has_weights(net.layers[i])) continue;
    const LayerConstraint lc = constraint.for_layer(i);
    if (lc.mode == LayerConstraint::Mode::free) continue;
    Mat64& w = weights_of(net.layers[i]);
    lc.check_shape(w);
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < w.cols(); ++c) {
        const int sign = lc.sign_at(r, c);
        if (sign > 0 && w(r, c) < 0.0) w(r, c) = 0.0;
        if (sign < 0 && w(r, c) > 0.0) w(r, c) = 0.0;
      }
  }
}

inline Network project(const Network& net, const SignConstraint& constraint) {
  Network out = net;
  project_in_place(out, constraint);
  return out;
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

struct Sample {
  Vec64 x;
  Vec64 target;
};

using Dataset = std::vector<Sample>;

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 1000;
  std::size_t batch_size = 0;  // 0 = full batch
  Loss loss = Loss::mse;
  std::uint64_t seed = 0;
  SignConstraint projection;
};

struct TrainReport {
  std::vector<double> loss_trace;  // mean loss per epoch
  double final_max_error = 0.0;    // max |F(x) - target| over the probe set
  double wall_seconds = 0.0;
};

struct TrainResult {
  Network network;
  TrainReport report;
};

/// Called after each epoch's final update and projection.
using EpochCallback = std::function<void(std::size_t epoch, const Network&)>;

inline double max_pointwise_error(const Network& net, const Dataset& data) {
  double worst = 0.0;
  for (const Sample& s : data) {
    const Vec64 y = forward(net, s.x);
    for (std::size_t i = 0; i < y.size(); ++i) worst = std::max(worst, std::abs(y[i] - s.target[i]));
  }
  return worst;
}

/// Gradient descent on the mean batch loss, followed by projection onto the
/// sign constraint after every update. Deterministic given cfg.seed.
inline TrainResult train(Network net, const Dataset& data, const TrainConfig& cfg,
                         const Dataset& probe = {}, const EpochCallback& on_epoch = {}) {
  if (data.empty()) throw DomainError("train: empty dataset");
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
    throw DomainError("train: learning rate must be finite and non-negative");
  if (!satisfies_constraint(net, cfg.projection))
    throw DomainError("train: initial network violates the projection constraint");

  const auto start = std::chrono::steady_clock::now();
  Rng rng(cfg.seed);
  const std::size_t batch = cfg.batch_size == 0 ? data.size() : std::min(cfg.batch_size, data.size());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.report.loss_trace.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < data.size()) rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t lo = 0; lo < data.size(); lo += batch) {
      const std::size_t hi = std::min(data.size(), lo + batch);
      Gradients sum;
      for (std::size_t n = lo; n < hi; ++n) {
        const Sample& s = data[order[n]];
        BackpropResult br;
        try {
          br = backprop(net, s.x, s.target, cfg.loss);
        } catch (const NumericError& e) {
          throw DivergenceError(epoch, "training diverged at epoch " + std::to_string(epoch) +
                                           ": " + e.what());
        }
        epoch_loss += br.loss;
        if (sum.layers.empty()) {
          sum = std::move(br.gradients);
          continue;
        }
        for (std::size_t i = 0; i < sum.layers.size(); ++i) {
          auto acc = sum.layers[i].weights.flat();
          const auto add = br.gradients.layers[i].weights.flat();
          for (std::size_t e = 0; e < acc.size(); ++e) acc[e] += add[e];
          for (std::size_t e = 0; e < sum.layers[i].bias.size(); ++e)
            sum.layers[i].bias[e] += br.gradients.layers[i].bias[e];
        }
      }
      const double step = cfg.learning_rate / static_cast<double>(hi - lo);
      for (std::size_t i = 0; i < net.layers.size(); ++i) {
        if (!has_weights(net.layers[i])) continue;
        auto w = weights_of(net.layers[i]).flat();
        const auto gw = sum.layers[i].weights.flat();
        for (std::size_t e = 0; e < w.size(); ++e) w[e] -= step * gw[e];
        if (auto* d = std::get_if<DenseLayer>(&net.layers[i]))
          for (std::size_t e = 0; e < d->bias.size(); ++e) d->bias[e] -= step * sum.layers[i].bias[e];
      }
      project_in_place(net, cfg.projection);
    }
    const double mean_loss = epoch_loss / static_cast<double>(data.size());
    if (!std::isfinite(mean_loss))
      throw DivergenceError(epoch, "training diverged at epoch " + std::to_string(epoch));
    result.report.loss_trace.push_back(mean_loss);
    if (on_epoch) on_epoch(epoch, net);
  }
  try {
    result.report.final_max_error = max_pointwise_error(net, probe.empty() ? data : probe);
  } catch (const NumericError& e) {
    throw DivergenceError(cfg.epochs, std::string("training diverged: ") + e.what());
  }
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.network = std::move(net);
  return result;
}

inline nlohmann::json to_json(const TrainReport& r) {
  return {{"epochs", r.loss_trace.size()},
          {"final_loss", r.loss_trace.empty() ? 0.0 : r.loss_trace.back()},
          {"final_max_error", r.final_max_error},
          {"wall_seconds", r.wall_seconds},
          {"loss_trace", r.loss_trace}};
}

}  // namespace signnet

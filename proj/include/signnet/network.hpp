#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "signnet/activation.hpp"
#include "signnet/error.hpp"
#include "signnet/rng.hpp"
#include "signnet/tensor.hpp"

namespace signnet {

// ---------------------------------------------------------------------------
// Layers
// ---------------------------------------------------------------------------

/// y = act(W x + b)
struct DenseLayer {
  Mat64 weights;
  Vec64 bias;
  Activation activation;

  std::size_t in_size() const noexcept { return weights.cols(); }
  std::size_t out_size() const noexcept { return weights.rows(); }
};

/// Single-channel valid-mode convolution (cross-correlation indexing, stride 1,
/// no padding, no bias). The incoming vector is the row-major flattening of an
/// in_rows x in_cols image; the output is flattened the same way.
struct ConvLayer {
  Mat64 kernel;
  std::size_t in_rows = 0;
  std::size_t in_cols = 0;
  Activation activation;

  std::size_t out_rows() const noexcept { return in_rows - kernel.rows() + 1; }
  std::size_t out_cols() const noexcept { return in_cols - kernel.cols() + 1; }
  std::size_t in_size() const noexcept { return in_rows * in_cols; }
  std::size_t out_size() const noexcept { return out_rows() * out_cols(); }
};

/// Max over disjoint groups of incoming indices; one output per group.
struct PoolLayer {
  std::vector<std::vector<std::size_t>> groups;

  std::size_t out_size() const noexcept { return groups.size(); }
};

using Layer = std::variant<DenseLayer, ConvLayer, PoolLayer>;

/// Identity connection adding the output of layer `from` to the output of
/// layer `to` after the latter's activation. Layer 0 is the network input;
/// layer k >= 1 is the output of layers[k - 1].
struct SkipLink {
  std::size_t from = 0;
  std::size_t to = 0;

  friend bool operator==(const SkipLink&, const SkipLink&) = default;
};

struct Network {
  std::size_t input_dim = 0;
  std::vector<Layer> layers;
  std::vector<SkipLink> skips;
  /// When false the activation of the last dense/conv layer is not applied.
  bool final_activation = true;

  std::size_t depth() const noexcept { return layers.size(); }

  /// Width of layer k's output (k = 0 is the input).
  std::size_t width(std::size_t k) const {
    if (k == 0) return input_dim;
    return std::visit(
        [](const auto& l) -> std::size_t { return l.out_size(); }, layers.at(k - 1));
  }

  std::size_t output_dim() const { return width(layers.size()); }
};

/// Activation actually applied by dense/conv layer `index` (0-based into layers).
inline Activation effective_activation(const Network& net, std::size_t index,
                                       const Activation& declared) {
  if (!net.final_activation && index + 1 == net.layers.size()) return Activation::identity();
  return declared;
}

inline const Activation* declared_activation(const Layer& layer) noexcept {
  if (const auto* d = std::get_if<DenseLayer>(&layer)) return &d->activation;
  if (const auto* c = std::get_if<ConvLayer>(&layer)) return &c->activation;
  return nullptr;
}

inline bool has_weights(const Layer& layer) noexcept {
  return !std::holds_alternative<PoolLayer>(layer);
}

/// The weight matrix of a dense layer or the kernel of a conv layer.
inline Mat64& weights_of(Layer& layer) {
  if (auto* d = std::get_if<DenseLayer>(&layer)) return d->weights;
  if (auto* c = std::get_if<ConvLayer>(&layer)) return c->kernel;
  throw DomainError("pooling layers carry no weights");
}

inline const Mat64& weights_of(const Layer& layer) {
  return weights_of(const_cast<Layer&>(layer));
}

/// Throws ShapeError describing the first inconsistency, if any.
inline void validate(const Network& net) {
  if (net.input_dim == 0) throw ShapeError("network input_dim must be positive");
  if (net.layers.empty()) throw ShapeError("network has no layers");
  std::size_t width = net.input_dim;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const std::string where = "layer " + std::to_string(i) + ": ";
    const Layer& layer = net.layers[i];
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      if (d->weights.cols() != width)
        throw ShapeError(where + "dense weights " + d->weights.shape() + " receive width " +
                         std::to_string(width));
      if (d->weights.rows() == 0 || d->bias.size() != d->weights.rows())
        throw ShapeError(where + "bias length " + std::to_string(d->bias.size()) +
                         " does not match weights " + d->weights.shape());
      if (!is_non_decreasing(d->activation))
        throw DomainError(where + "activation must be non-decreasing");
    } else if (const auto* c = std::get_if<ConvLayer>(&layer)) {
      if (c->kernel.rows() == 0 || c->kernel.cols() == 0)
        throw ShapeError(where + "empty convolution kernel");
      if (c->kernel.rows() > c->in_rows || c->kernel.cols() > c->in_cols)
        throw ShapeError(where + "kernel " + c->kernel.shape() + " larger than image " +
                         detail::shape_str(c->in_rows, c->in_cols));
      if (c->in_size() != width)
        throw ShapeError(where + "image " + detail::shape_str(c->in_rows, c->in_cols) +
                         " receives width " + std::to_string(width));
      if (!is_non_decreasing(c->activation))
        throw DomainError(where + "activation must be non-decreasing");
    } else {
      const auto& p = std::get<PoolLayer>(layer);
      if (p.groups.empty()) throw ShapeError(where + "pooling layer has no groups");
      std::vector<bool> seen(width, false);
      for (const auto& g : p.groups) {
        if (g.empty()) throw ShapeError(where + "empty pooling group");
        for (std::size_t idx : g) {
          if (idx >= width)
            throw ShapeError(where + "pool index " + std::to_string(idx) + " out of range " +
                             std::to_string(width));
          if (seen[idx])
            throw ShapeError(where + "pool index " + std::to_string(idx) +
                             " appears in more than one group");
          seen[idx] = true;
        }
      }
    }
    width = net.width(i + 1);
  }
  for (const SkipLink& s : net.skips) {
    if (s.to > net.layers.size() || s.to < 2 || s.from + 2 > s.to)
      throw ShapeError("skip " + std::to_string(s.from) + "->" + std::to_string(s.to) +
                       " must connect non-adjacent layers");
    if (net.width(s.from) != net.width(s.to))
      throw ShapeError("skip " + std::to_string(s.from) + "->" + std::to_string(s.to) +
                       " joins widths " + std::to_string(net.width(s.from)) + " and " +
                       std::to_string(net.width(s.to)));
  }
}

// ---------------------------------------------------------------------------
// Primitive operations
// ---------------------------------------------------------------------------

/// Valid-mode cross-correlation: O(i,j) = sum_k sum_l I(i+k, j+l) K(k,l).
inline Mat64 conv2d(const Mat64& image, const Mat64& kernel) {
  if (kernel.rows() == 0 || kernel.cols() == 0 || kernel.rows() > image.rows() ||
      kernel.cols() > image.cols())
    throw ShapeError("conv2d: kernel " + kernel.shape() + " does not fit image " + image.shape());
  Mat64 out(image.rows() - kernel.rows() + 1, image.cols() - kernel.cols() + 1);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kernel.rows(); ++k)
        for (std::size_t l = 0; l < kernel.cols(); ++l) acc += image(i + k, j + l) * kernel(k, l);
      out(i, j) = acc;
    }
  detail::require_finite(out.flat(), "conv2d");
  return out;
}

inline Vec64 maxpool(const PoolLayer& pool, const Vec64& x) {
  if (pool.groups.empty()) throw ShapeError("maxpool: no groups");
  Vec64 out(pool.groups.size());
  for (std::size_t g = 0; g < pool.groups.size(); ++g) {
    const auto& members = pool.groups[g];
    if (members.empty()) throw ShapeError("maxpool: empty group " + std::to_string(g));
    double best = 0.0;
    for (std::size_t n = 0; n < members.size(); ++n) {
      if (members[n] >= x.size())
        throw ShapeError("maxpool: index " + std::to_string(members[n]) +
                         " out of range for length " + std::to_string(x.size()));
      const double v = x[members[n]];
      if (n == 0 || v > best) best = v;
    }
    out[g] = best;
  }
  return out;
}

/// Index (into x) that receives the gradient of a pooling group: the arg max,
/// lowest index on ties.
inline std::size_t pool_argmax(const std::vector<std::size_t>& members, const Vec64& x) {
  std::size_t best = members.front();
  for (std::size_t idx : members)
    if (x[idx] > x[best] || (x[idx] == x[best] && idx < best)) best = idx;
  return best;
}

// ---------------------------------------------------------------------------
// Forward evaluation
// ---------------------------------------------------------------------------

/// Per-layer values recorded by forward_trace. outputs[0] is the input and
/// outputs[k] the (post-skip) output of layer k; pre[k-1] is the
/// pre-activation of layer k (empty for pooling layers).
struct ForwardTrace {
  std::vector<Vec64> outputs;
  std::vector<Vec64> pre;
};

namespace detail {

inline Vec64 conv_forward_linear(const ConvLayer& c, const Vec64& in) {
  const Mat64 image(c.in_rows, c.in_cols, in.values());
  const Mat64 out = conv2d(image, c.kernel);
  return Vec64(std::vector<double>(out.flat().begin(), out.flat().end()));
}

inline Vec64 apply_activation(const Activation& a, const Vec64& z) {
  Vec64 y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = eval_activation(a, z[i]);
  return y;
}

}  // namespace detail

inline ForwardTrace forward_trace(const Network& net, const Vec64& x) {
  validate(net);
  if (x.size() != net.input_dim)
    throw ShapeError("forward: input length " + std::to_string(x.size()) + " but network expects " +
                     std::to_string(net.input_dim));
  detail::require_finite(x.span(), "forward input");
  ForwardTrace t;
  t.outputs.reserve(net.layers.size() + 1);
  t.pre.reserve(net.layers.size());
  t.outputs.push_back(x);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const Vec64& in = t.outputs.back();
    Vec64 z;
    Vec64 y;
    if (const auto* d = std::get_if<DenseLayer>(&net.layers[i])) {
      z = matvec(d->weights, in);
      for (std::size_t r = 0; r < z.size(); ++r) z[r] += d->bias[r];
      y = detail::apply_activation(effective_activation(net, i, d->activation), z);
    } else if (const auto* c = std::get_if<ConvLayer>(&net.layers[i])) {
      z = detail::conv_forward_linear(*c, in);
      y = detail::apply_activation(effective_activation(net, i, c->activation), z);
    } else {
      y = maxpool(std::get<PoolLayer>(net.layers[i]), in);
    }
    for (const SkipLink& s : net.skips)
      if (s.to == i + 1)
        for (std::size_t r = 0; r < y.size(); ++r) y[r] += t.outputs[s.from][r];
    if (!all_finite(y.span()))
      throw NumericError("forward: non-finite activation in layer " + std::to_string(i));
    t.pre.push_back(std::move(z));
    t.outputs.push_back(std::move(y));
  }
  return t;
}

inline Vec64 forward(const Network& net, const Vec64& x) {
  return std::move(forward_trace(net, x).outputs.back());
}

/// Convenience for scalar-output networks.
inline double forward_scalar(const Network& net, const Vec64& x) {
  if (net.output_dim() != 1)
    throw ShapeError("expected a scalar-output network, got output width " +
                     std::to_string(net.output_dim()));
  return forward(net, x)[0];
}

// ---------------------------------------------------------------------------
// Sign constraints
// ---------------------------------------------------------------------------

/// Constraint on one dense/conv layer's weights. Biases are never constrained.
struct LayerConstraint {
  enum class Mode { free, nonneg, mask };

  Mode mode = Mode::free;
  /// For mask mode: row-major, same shape as the weights. +1 requires w >= 0,
  /// -1 requires w <= 0, 0 leaves the entry free.
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> signs;

  static LayerConstraint free() { return {}; }
  static LayerConstraint nonneg() { return {Mode::nonneg, 0, 0, {}}; }
  static LayerConstraint mask(std::size_t rows, std::size_t cols, std::vector<int> signs) {
    if (signs.size() != rows * cols) throw ShapeError("sign mask size does not match its shape");
    for (int s : signs)
      if (s < -1 || s > 1) throw DomainError("sign mask entries must be -1, 0 or +1");
    return {Mode::mask, rows, cols, std::move(signs)};
  }

  /// Permitted sign for an entry: +1, -1, or 0 (free).
  int sign_at(std::size_t r, std::size_t c) const noexcept {
    switch (mode) {
      case Mode::free: return 0;
      case Mode::nonneg: return 1;
      case Mode::mask: return signs[r * cols + c];
    }
    return 0;
  }

  void check_shape(const Mat64& w) const {
    if (mode == Mode::mask && (rows != w.rows() || cols != w.cols()))
      throw ShapeError("sign mask " + detail::shape_str(rows, cols) + " does not match weights " +
                       w.shape());
  }
};

/// Per-layer sign constraints, indexed like Network::layers. Layers without
/// an explicit entry use `fallback`.
struct SignConstraint {
  LayerConstraint::Mode fallback = LayerConstraint::Mode::free;
  std::map<std::size_t, LayerConstraint> per_layer;

  static SignConstraint free() { return {}; }
  static SignConstraint nonneg() { return {LayerConstraint::Mode::nonneg, {}}; }

  SignConstraint& set(std::size_t layer, LayerConstraint c) {
    per_layer[layer] = std::move(c);
    return *this;
  }

  LayerConstraint for_layer(std::size_t layer) const {
    if (auto it = per_layer.find(layer); it != per_layer.end()) return it->second;
    return LayerConstraint{fallback, 0, 0, {}};
  }
};

inline bool obeys_sign(int sign, double w) noexcept {
  return sign == 0 || (sign > 0 ? w >= 0.0 : w <= 0.0);
}

/// Exact check (no tolerance) of every dense/conv weight; biases ignored.
inline bool satisfies_constraint(const Network& net, const SignConstraint& constraint) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!has_weights(net.layers[i])) continue;
    const LayerConstraint lc = constraint.for_layer(i);
    if (lc.mode == LayerConstraint::Mode::free) continue;
    const Mat64& w = weights_of(net.layers[i]);
    lc.check_shape(w);
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < w.cols(); ++c)
        if (!obeys_sign(lc.sign_at(r, c), w(r, c))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Construction helpers
// ---------------------------------------------------------------------------

/// Fully connected architecture such as "2-8-8-1".
struct Architecture {
  std::size_t input_dim = 0;
  std::vector<std::size_t> widths;
  Activation hidden = Activation::relu();
  Activation output = Activation::identity();
  bool final_activation = true;

  static Architecture parse(std::string_view spec) {
    std::vector<std::size_t> dims;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
      const std::size_t dash = std::min(spec.find('-', pos), spec.size());
      const std::string_view tok = spec.substr(pos, dash - pos);
      std::size_t value = 0;
      const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (tok.empty() || ec != std::errc{} || end != tok.data() + tok.size() || value == 0)
        throw ParseError("bad architecture '" + std::string(spec) +
                         "': expected positive widths like 2-8-1");
      dims.push_back(value);
      pos = dash + 1;
    }
    if (dims.size() < 2) throw ParseError("architecture needs an input and at least one layer");
    Architecture a;
    a.input_dim = dims.front();
    a.widths.assign(dims.begin() + 1, dims.end());
    return a;
  }

  std::string to_string() const {
    std::string s = std::to_string(input_dim);
    for (std::size_t w : widths) s += "-" + std::to_string(w);
    return s;
  }
};

/// Redraws every dense/conv weight uniform(-s, s), s = 1/sqrt(fan_in), and
/// moves it into the constraint set (nonneg: |w|; mask: sign-matched |w|).
/// Dense biases are drawn uniform(-s, s) without constraint.
inline void randomize(Network& net, const SignConstraint& constraint, Rng& rng) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    Layer& layer = net.layers[i];
    if (!has_weights(layer)) continue;
    Mat64& w = weights_of(layer);
    const LayerConstraint lc = constraint.for_layer(i);
    lc.check_shape(w);
    const std::size_t fan_in = std::holds_alternative<DenseLayer>(layer) ? w.cols() : w.size();
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < w.cols(); ++c) {
        const double v = rng.uniform(-s, s);
        const int sign = lc.sign_at(r, c);
        w(r, c) = sign == 0 ? v : sign * std::abs(v);
      }
    if (auto* d = std::get_if<DenseLayer>(&layer))
      for (double& b : d->bias) b = rng.uniform(-s, s);
  }
}

inline Network make_mlp(const Architecture& arch) {
  if (arch.input_dim == 0 || arch.widths.empty())
    throw ShapeError("architecture needs an input and at least one layer");
  Network net;
  net.input_dim = arch.input_dim;
  net.final_activation = arch.final_activation;
  std::size_t prev = arch.input_dim;
  for (std::size_t i = 0; i < arch.widths.size(); ++i) {
    const bool last = i + 1 == arch.widths.size();
    net.layers.emplace_back(DenseLayer{Mat64(arch.widths[i], prev), Vec64(arch.widths[i]),
                                       last ? arch.output : arch.hidden});
    prev = arch.widths[i];
  }
  return net;
}

inline Network init_random(const Architecture& arch, const SignConstraint& constraint, Rng& rng) {
  Network net = make_mlp(arch);
  randomize(net, constraint, rng);
  return net;
}

/// Copy of `net` with one dense weight or conv kernel entry negated.
inline Network flip_weight(const Network& net, std::size_t layer, std::size_t row,
                           std::size_t col) {
  if (layer >= net.layers.size())
    throw DomainError("flip_weight: layer " + std::to_string(layer) + " out of range");
  if (!has_weights(net.layers[layer]))
    throw DomainError("flip_weight: layer " + std::to_string(layer) + " is a pooling layer");
  Network out = net;
  Mat64& w = weights_of(out.layers[layer]);
  if (row >= w.rows() || col >= w.cols())
    throw DomainError("flip_weight: entry (" + std::to_string(row) + "," + std::to_string(col) +
                      ") outside " + w.shape());
  w(row, col) = -w(row, col);
  return out;
}

inline std::size_t parameter_count(const Network& net) {
  std::size_t n = 0;
  for (const Layer& l : net.layers) {
    if (const auto* d = std::get_if<DenseLayer>(&l)) n += d->weights.size() + d->bias.size();
    if (const auto* c = std::get_if<ConvLayer>(&l)) n += c->kernel.size();
  }
  return n;
}

}  // namespace signnet

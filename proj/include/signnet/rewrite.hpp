#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "signnet/domain.hpp"
#include "signnet/network.hpp"

namespace signnet {

/// Dense equivalent of a conv layer acting on the row-major vectorized image:
/// row i*(N-n+1)+j holds K(k,l) at column (i+k)*N + (j+l). Zero bias, same
/// activation. Its nonzero entries are exactly the kernel entries, so a
/// non-negative kernel gives a non-negative matrix.
inline DenseLayer conv_to_dense(const ConvLayer& conv) {
  const Mat64& k = conv.kernel;
  if (k.rows() == 0 || k.cols() == 0 || k.rows() > conv.in_rows || k.cols() > conv.in_cols)
    throw ShapeError("conv_to_dense: kernel " + k.shape() + " does not fit image " +
                     detail::shape_str(conv.in_rows, conv.in_cols));
  DenseLayer d{Mat64(conv.out_size(), conv.in_size()), Vec64(conv.out_size()), conv.activation};
  for (std::size_t i = 0; i < conv.out_rows(); ++i)
    for (std::size_t j = 0; j < conv.out_cols(); ++j) {
      const std::size_t row = i * conv.out_cols() + j;
      for (std::size_t a = 0; a < k.rows(); ++a)
        for (std::size_t b = 0; b < k.cols(); ++b)
          d.weights(row, (i + a) * conv.in_cols + (j + b)) = k(a, b);
    }
  return d;
}

/// Replaces every conv layer by its dense equivalent.
inline Network lower_convolutions(const Network& net) {
  Network out = net;
  for (Layer& layer : out.layers)
    if (const auto* c = std::get_if<ConvLayer>(&layer)) layer = conv_to_dense(*c);
  return out;
}

namespace detail {

inline bool passes_through(const Activation& a, bool carried_nonneg) noexcept {
  switch (a.kind) {
    case Activation::Kind::identity: return true;
    case Activation::Kind::relu:
    case Activation::Kind::leaky_relu: return carried_nonneg;
    case Activation::Kind::sigmoid:
    case Activation::Kind::tanh: return false;
  }
  return false;
}

// Original layer output y_k expressed over the units u_k of the rewritten
// network: y_k[r] = sum of u_k[idx] for idx in repr[r].
using Representation = std::vector<std::vector<std::size_t>>;

}  // namespace detail

/// Rewrites a network with skip links into a plain feed-forward one. Each
/// skipped value is carried by pass-through units (weight 1, bias 0) through
/// the intermediate layers; the addition at the receiving layer is folded into
/// the next layer's weights, or into an appended identity layer with 0/1
/// weights when the receiving layer is the last. Conv layers are lowered first.
///
/// A pass-through unit must reproduce its input exactly: identity always does,
/// relu/leaky_relu only for values known to be non-negative (outputs of relu or
/// sigmoid layers, or inputs when `input_domain` is non-negative). Anything
/// else raises DomainError. A pooling layer over a summed value is preceded by
/// an identity layer with 0/1 weights that forms the sums.
inline Network skip_to_mlp(const Network& net, const std::optional<BoxDomain>& input_domain = {}) {
  validate(net);
  if (net.skips.empty()) return net;
  const Network src = lower_convolutions(net);
  const std::size_t depth = src.layers.size();

  std::vector<bool> nonneg(depth + 1, false);
  if (input_domain) {
    if (input_domain->dim() != src.input_dim) throw ShapeError("skip_to_mlp: domain dimension mismatch");
    nonneg[0] = true;
    for (double lo : input_domain->lower()) nonneg[0] = nonneg[0] && lo >= 0.0;
  }
  for (std::size_t k = 1; k <= depth; ++k) {
    const Layer& layer = src.layers[k - 1];
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      const auto kind = effective_activation(src, k - 1, d->activation).kind;
      nonneg[k] = kind == Activation::Kind::relu || kind == Activation::Kind::sigmoid;
    } else {
      nonneg[k] = nonneg[k - 1];
    }
    for (const SkipLink& s : src.skips)
      if (s.to == k) nonneg[k] = nonneg[k] && nonneg[s.from];
  }

  Network out;
  out.input_dim = src.input_dim;
  out.final_activation = src.final_activation;

  detail::Representation repr(src.input_dim);
  for (std::size_t r = 0; r < src.input_dim; ++r) repr[r] = {r};
  std::size_t unit_count = src.input_dim;
  // carried[s] = units of the current layer holding skip s's value.
  std::vector<std::vector<std::size_t>> carried(src.skips.size());
  std::vector<detail::Representation> reprs{repr};

  for (std::size_t k = 1; k <= depth; ++k) {
    const Layer& layer = src.layers[k - 1];
    detail::Representation in = reprs[k - 1];

    // Per skip active at this layer, the representation of its value in u_{k-1}.
    std::vector<std::pair<std::size_t, detail::Representation>> through;
    for (std::size_t s = 0; s < src.skips.size(); ++s) {
      const SkipLink& sk = src.skips[s];
      if (!(sk.from < k && k <= sk.to)) continue;
      detail::Representation value;
      if (sk.from == k - 1) {
        value = reprs[sk.from];
      } else {
        for (std::size_t idx : carried[s]) value.push_back({idx});
      }
      through.emplace_back(s, std::move(value));
    }

    std::size_t main_width = 0;
    std::size_t new_width = 0;
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      const Activation act = effective_activation(src, k - 1, d->activation);
      main_width = d->weights.rows();
      new_width = main_width;
      for (const auto& t : through) new_width += t.second.size();
      DenseLayer nd{Mat64(new_width, unit_count), Vec64(new_width), act};
      for (std::size_t r = 0; r < main_width; ++r) {
        nd.bias[r] = d->bias[r];
        for (std::size_t c = 0; c < in.size(); ++c)
          for (std::size_t idx : in[c]) nd.weights(r, idx) += d->weights(r, c);
      }
      std::size_t row = main_width;
      for (auto& [s, value] : through) {
        if (!detail::passes_through(act, nonneg[src.skips[s].from]))
          throw DomainError("skip_to_mlp: layer " + std::to_string(k - 1) + " activation '" +
                            std::string(to_string(act.kind)) +
                            "' cannot pass the skipped value through unchanged");
        carried[s].clear();
        for (const auto& terms : value) {
          for (std::size_t idx : terms) nd.weights(row, idx) = 1.0;
          carried[s].push_back(row++);
        }
      }
      out.layers.emplace_back(std::move(nd));
    } else {
      const auto& pool = std::get<PoolLayer>(layer);
      bool summed = false;
      for (const auto& terms : in) summed = summed || terms.size() > 1;
      if (summed) {
        // Max over sums cannot be split across units: an identity layer with
        // 0/1 weights materializes every sum (and carries the skips) first.
        std::size_t rows = in.size();
        for (const auto& t : through) rows += t.second.size();
        DenseLayer m{Mat64(rows, unit_count), Vec64(rows), Activation::identity()};
        std::size_t row = 0;
        auto materialize = [&](std::vector<std::size_t>& terms) {
          for (std::size_t idx : terms) m.weights(row, idx) = 1.0;
          terms = {row++};
        };
        for (auto& terms : in) materialize(terms);
        for (auto& t : through)
          for (auto& terms : t.second) materialize(terms);
        out.layers.emplace_back(std::move(m));
        unit_count = rows;
      }
      PoolLayer np;
      for (const auto& g : pool.groups) {
        std::vector<std::size_t> ng;
        for (std::size_t c : g) ng.push_back(in[c].front());
        np.groups.push_back(std::move(ng));
      }
      main_width = pool.groups.size();
      std::size_t row = main_width;
      for (auto& [s, value] : through) {
        carried[s].clear();
        for (const auto& terms : value) {
          np.groups.push_back({terms.front()});
          carried[s].push_back(row++);
        }
      }
      new_width = row;
      out.layers.emplace_back(std::move(np));
    }

    detail::Representation next(main_width);
    for (std::size_t r = 0; r < main_width; ++r) next[r] = {r};
    for (std::size_t s = 0; s < src.skips.size(); ++s)
      if (src.skips[s].to == k)
        for (std::size_t r = 0; r < main_width; ++r) next[r].push_back(carried[s][r]);
    reprs.push_back(std::move(next));
    unit_count = new_width;
  }

  bool ends_with_sum = false;
  for (const SkipLink& s : src.skips) ends_with_sum = ends_with_sum || s.to == depth;
  if (ends_with_sum) {
    const detail::Representation& last = reprs[depth];
    DenseLayer sum{Mat64(last.size(), unit_count), Vec64(last.size()), Activation::identity()};
    for (std::size_t r = 0; r < last.size(); ++r)
      for (std::size_t idx : last[r]) sum.weights(r, idx) = 1.0;
    out.layers.emplace_back(std::move(sum));
    out.final_activation = true;
  }
  validate(out);
  return out;
}

struct RewriteReport {
  std::string pass;
  std::size_t params_before = 0;
  std::size_t params_after = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::size_t trials = 0;

  bool passed() const noexcept { return max_deviation <= tolerance; }
};

inline nlohmann::json to_json(const RewriteReport& r) {
  return {{"pass", r.pass},
          {"params_before", r.params_before},
          {"params_after", r.params_after},
          {"max_deviation", r.max_deviation},
          {"tolerance", r.tolerance},
          {"trials", r.trials},
          {"passed", r.passed()}};
}

/// Max absolute output difference over `trials` uniform inputs from `domain`.
inline RewriteReport fuzz_equivalence(const Network& a, const Network& b, const BoxDomain& domain,
                                      std::size_t trials, Rng& rng) {
  if (a.input_dim != b.input_dim || a.output_dim() != b.output_dim())
    throw ShapeError("fuzz_equivalence: networks differ in input or output width");
  if (domain.dim() != a.input_dim) throw ShapeError("fuzz_equivalence: domain dimension mismatch");
  RewriteReport rep;
  rep.pass = "fuzz";
  rep.params_before = parameter_count(a);
  rep.params_after = parameter_count(b);
  rep.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const Vec64 x = domain.sample(rng);
    const Vec64 ya = forward(a, x);
    const Vec64 yb = forward(b, x);
    for (std::size_t i = 0; i < ya.size(); ++i)
      rep.max_deviation = std::max(rep.max_deviation, std::abs(ya[i] - yb[i]));
  }
  return rep;
}

constexpr double kConvRewriteTolerance = 1e-12;
constexpr double kSkipRewriteTolerance = 1e-9;

struct RewriteOutcome {
  Network network;
  RewriteReport report;
};

/// Runs a named pass ("conv2dense" or "skip2mlp") and fuzzes the result
/// against the original.
inline RewriteOutcome run_rewrite_pass(const std::string& pass, const Network& net,
                                       const BoxDomain& domain, std::size_t trials, Rng& rng) {
  RewriteOutcome out;
  double tol = 0.0;
  if (pass == "conv2dense") {
    out.network = lower_convolutions(net);
    tol = kConvRewriteTolerance;
  } else if (pass == "skip2mlp") {
    out.network = skip_to_mlp(net, domain);
    tol = kSkipRewriteTolerance;
  } else {
    throw DomainError("unknown rewrite pass '" + pass + "'");
  }
  out.report = fuzz_equivalence(net, out.network, domain, trials, rng);
  out.report.pass = pass;
  out.report.tolerance = tol;
  return out;
}

}  // namespace signnet

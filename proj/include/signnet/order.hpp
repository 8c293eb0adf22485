#pragma once

#include <atomic>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "signnet/domain.hpp"
#include "signnet/network.hpp"
#include "signnet/parallel.hpp"

namespace signnet {

/// Coordinatewise partial order: x <= y in every component.
inline bool leq(const Vec64& x, const Vec64& y) {
  if (x.size() != y.size())
    throw ShapeError("leq: lengths " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()) + " differ");
  for (std::size_t k = 0; k < x.size(); ++k)
    if (!(x[k] <= y[k])) return false;
  return true;
}

/// A pair with x <= y, checked on construction.
class OrderPair {
 public:
  OrderPair(Vec64 x, Vec64 y) : x_(std::move(x)), y_(std::move(y)) {
    if (!leq(x_, y_)) throw DomainError("OrderPair: x is not below y");
  }
  const Vec64& x() const noexcept { return x_; }
  const Vec64& y() const noexcept { return y_; }

 private:
  Vec64 x_;
  Vec64 y_;
};

/// Order pair whose images are not ordered: leq(fx, fy) fails.
struct OrderWitness {
  Vec64 x, y, fx, fy;
};

struct Certificate {
  enum class Verdict { certified_monotone, falsified, inconclusive };
  enum class Basis { structural, empirical };

  Verdict verdict = Verdict::inconclusive;
  Basis basis = Basis::structural;
  std::optional<OrderWitness> witness;
};

inline const char* to_string(Certificate::Verdict v) noexcept {
  switch (v) {
    case Certificate::Verdict::certified_monotone: return "certified_monotone";
    case Certificate::Verdict::falsified: return "falsified";
    case Certificate::Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

inline const char* to_string(Certificate::Basis b) noexcept {
  return b == Certificate::Basis::structural ? "structural" : "empirical";
}

inline nlohmann::json to_json(const Certificate& c) {
  nlohmann::json j;
  j["verdict"] = to_string(c.verdict);
  j["basis"] = to_string(c.basis);
  if (c.witness) {
    j["witness"] = {{"x", c.witness->x.values()},
                    {"y", c.witness->y.values()},
                    {"fx", c.witness->fx.values()},
                    {"fy", c.witness->fy.values()}};
  }
  return j;
}

/// Sufficient condition for order preservation: non-negative dense weights and
/// conv kernels, non-decreasing activations. Pooling layers and identity skips
/// preserve order unconditionally. Biases are ignored. A negative weight only
/// makes the verdict inconclusive; it does not prove the function non-monotone.
inline Certificate certify_structural(const Network& net) {
  Certificate cert;
  cert.basis = Certificate::Basis::structural;
  cert.verdict = Certificate::Verdict::certified_monotone;
  for (const Layer& layer : net.layers) {
    if (!has_weights(layer)) continue;
    if (!is_non_decreasing(*declared_activation(layer))) {
      cert.verdict = Certificate::Verdict::inconclusive;
      break;
    }
    bool nonneg = true;
    for (double w : weights_of(layer).flat()) nonneg = nonneg && w >= 0.0;
    if (!nonneg) {
      cert.verdict = Certificate::Verdict::inconclusive;
      break;
    }
  }
  return cert;
}

namespace detail {

/// Pair number `index` of the stream keyed by `base`: x uniform in K,
/// y = min(x + delta, upper) with delta_k uniform on [0, width_k / 2].
inline OrderPair draw_order_pair(const BoxDomain& domain, const Rng& base, std::size_t index) {
  Rng r = base.split(index);
  Vec64 x = domain.sample(r);
  Vec64 y(domain.dim());
  for (std::size_t k = 0; k < domain.dim(); ++k) {
    const double delta = r.uniform(0.0, domain.width(k) / 2.0);
    y[k] = std::min(x[k] + delta, domain.upper()[k]);
  }
  return OrderPair(std::move(x), std::move(y));
}

}  // namespace detail

/// Draws `count` order pairs. Advances `rng` by one draw regardless of count.
inline std::vector<OrderPair> sample_order_pairs(const BoxDomain& domain, std::size_t count,
                                                 Rng& rng) {
  if (count == 0) throw DomainError("sample_order_pairs: count must be positive");
  const Rng base(rng.next_u64());
  std::vector<OrderPair> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) pairs.push_back(detail::draw_order_pair(domain, base, i));
  return pairs;
}

/// Searches the same pairs sample_order_pairs(domain, trials, rng) would
/// produce for one with F(x) not below F(y). Returns the lowest-index witness
/// (independent of the worker count), or inconclusive.
inline Certificate falsify_monotone(const Network& net, const BoxDomain& domain,
                                    std::size_t trials, Rng& rng) {
  if (trials == 0) throw DomainError("falsify_monotone: trials must be positive");
  if (domain.dim() != net.input_dim)
    throw ShapeError("falsify_monotone: domain dimension " + std::to_string(domain.dim()) +
                     " but network input " + std::to_string(net.input_dim));
  validate(net);
  const Rng base(rng.next_u64());
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::atomic<std::size_t> first{none};
  const std::size_t workers = worker_count();
  const std::size_t block = (trials + workers - 1) / workers;
  parallel_for(
      workers,
      [&](std::size_t w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(trials, lo + block);
        for (std::size_t t = lo; t < hi && t < first.load(std::memory_order_relaxed); ++t) {
          const OrderPair p = detail::draw_order_pair(domain, base, t);
          if (!leq(forward(net, p.x()), forward(net, p.y()))) {
            std::size_t cur = first.load();
            while (t < cur && !first.compare_exchange_weak(cur, t)) {
            }
            return;
          }
        }
      },
      workers);

  Certificate cert;
  cert.basis = Certificate::Basis::empirical;
  cert.verdict = Certificate::Verdict::inconclusive;
  if (const std::size_t t = first.load(); t != none) {
    const OrderPair p = detail::draw_order_pair(domain, base, t);
    cert.verdict = Certificate::Verdict::falsified;
    cert.witness = OrderWitness{p.x(), p.y(), forward(net, p.x()), forward(net, p.y())};
  }
  return cert;
}

/// Deterministic search over the (resolution+1)^n grid nodes of `domain`:
/// compares every node with its successor along each axis. Those successor
/// relations generate the grid order, so a pass here means F is monotone on
/// the grid. Refuses grids with more than 10^7 nodes.
inline Certificate falsify_on_grid(const Network& net, const BoxDomain& domain,
                                   std::size_t resolution) {
  if (resolution == 0) throw DomainError("falsify_on_grid: resolution must be positive");
  if (domain.dim() != net.input_dim) throw ShapeError("falsify_on_grid: domain dimension mismatch");
  const std::size_t n = resolution + 1;
  const std::size_t dim = domain.dim();
  std::size_t total = 1;
  for (std::size_t k = 0; k < dim; ++k) {
    if (total > 10'000'000 / n) throw DomainError("falsify_on_grid: grid too large");
    total *= n;
  }
  auto node = [&](std::size_t flat) {
    Vec64 x(dim);
    for (std::size_t k = 0; k < dim; ++k, flat /= n) x[k] = domain.grid_coord(k, flat % n, resolution);
    return x;
  };
  std::vector<Vec64> values(total);
  parallel_for(total, [&](std::size_t i) { values[i] = forward(net, node(i)); });

  Certificate cert;
  cert.basis = Certificate::Basis::empirical;
  cert.verdict = Certificate::Verdict::inconclusive;
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t stride = 1;
    for (std::size_t k = 0; k < dim; ++k, stride *= n) {
      if ((i / stride) % n + 1 >= n) continue;
      if (!leq(values[i], values[i + stride])) {
        cert.verdict = Certificate::Verdict::falsified;
        cert.witness = OrderWitness{node(i), node(i + stride), values[i], values[i + stride]};
        return cert;
      }
    }
  }
  return cert;
}

/// An order pair straddling the threshold the wrong way: F(x) >= t > F(y).
struct UpperSetWitness {
  Vec64 x, y;
  double fx = 0.0;
  double fy = 0.0;
};

/// First pair showing that the superlevel set {F >= threshold} of a scalar
/// network is not an upper set, if any.
inline std::optional<UpperSetWitness> is_upper_set_violation(const Network& net, double threshold,
                                                             const std::vector<OrderPair>& pairs) {
  if (net.output_dim() != 1)
    throw ShapeError("is_upper_set_violation: network output width " +
                     std::to_string(net.output_dim()) + " is not scalar");
  for (const OrderPair& p : pairs) {
    const double fx = forward(net, p.x())[0];
    if (fx < threshold) continue;
    const double fy = forward(net, p.y())[0];
    if (fy < threshold) return UpperSetWitness{p.x(), p.y(), fx, fy};
  }
  return std::nullopt;
}

}  // namespace signnet

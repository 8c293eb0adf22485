#pragma once

// Constructors for point triples p0 <= p1 <= p2 whose labels satisfy
// label(p0) == label(p2) != label(p1). Any order-preserving scalar F then has
// F(p0) <= F(p1) <= F(p2), so it cannot track all three labels: at least one
// point is off by half the label gap.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include <json.hpp>

#include "signnet/network.hpp"
#include "signnet/order.hpp"
#include "signnet/tasks.hpp"

namespace signnet {

struct WitnessTriple {
  std::array<Vec64, 3> points;
  std::array<double, 3> labels{};
  std::string construction;
};

/// Throws DomainError unless the order chain holds exactly and the labels
/// follow the same-different-same pattern.
inline void validate_witness(const WitnessTriple& w) {
  if (!leq(w.points[0], w.points[1]) || !leq(w.points[1], w.points[2]))
    throw DomainError("witness (" + w.construction + "): points are not an order chain");
  if (!(w.labels[0] == w.labels[2] && w.labels[0] != w.labels[1]))
    throw DomainError("witness (" + w.construction + "): labels do not conflict with the chain");
}

/// Labels the three points with the task and validates the result.
inline WitnessTriple make_witness(std::array<Vec64, 3> points, const TaskSpec& task,
                                  std::string construction) {
  WitnessTriple w{std::move(points), {}, std::move(construction)};
  for (std::size_t n = 0; n < 3; ++n) w.labels[n] = task.label(w.points[n]);
  validate_witness(w);
  return w;
}

/// Default step: 1/64 of the smallest domain width.
inline double default_epsilon(const BoxDomain& domain) {
  double w = domain.width(0);
  for (std::size_t k = 1; k < domain.dim(); ++k) w = std::min(w, domain.width(k));
  return w / 64.0;
}

/// Boundary-orientation witness around a point d on the hyperplane a.x + b = 0
/// whose normal has a_i a_j < 0:
///   A = d - eps e_i,  B = d + eps e_i,  C = B - 2 (a_i / a_j) eps e_j.
/// a.A + b = -a_i eps, a.B + b = a_i eps, a.C + b = -a_i eps, so A and C lie on
/// one side and B on the other; labels follow the halfplane convention
/// (1 where a.x + b >= 0).
inline WitnessTriple witness_orientation(const Vec64& a, double b, const Vec64& d, double eps,
                                         std::size_t i, std::size_t j) {
  if (a.size() != d.size()) throw ShapeError("witness_orientation: normal and point differ in length");
  if (i >= a.size() || j >= a.size() || i == j)
    throw DomainError("witness_orientation: need two distinct coordinates in range");
  if (!(a[i] * a[j] < 0.0))
    throw DomainError("witness_orientation: requires a_i * a_j < 0");
  if (!(eps > 0.0)) throw DomainError("witness_orientation: eps must be positive");
  double on_plane = b;
  for (std::size_t k = 0; k < a.size(); ++k) on_plane += a[k] * d[k];
  if (std::abs(on_plane) > 1e-9)
    throw DomainError("witness_orientation: d is not on the hyperplane (residual " +
                      std::to_string(on_plane) + ")");

  WitnessTriple w;
  w.construction = "orientation";
  w.points = {d, d, d};
  w.points[0][i] = d[i] - eps;
  w.points[1][i] = d[i] + eps;
  w.points[2][i] = d[i] + eps;
  w.points[2][j] = d[j] - 2.0 * (a[i] / a[j]) * eps;
  for (std::size_t n = 0; n < 3; ++n) {
    double s = b;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * w.points[n][k];
    w.labels[n] = s >= 0.0 ? 1.0 : 0.0;
  }
  validate_witness(w);
  return w;
}

/// First pair (i, j) with a_i a_j < 0, if any.
inline std::optional<std::pair<std::size_t, std::size_t>> mixed_sign_pair(const Vec64& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (a[i] * a[j] < 0.0) return std::pair{i, j};
  return std::nullopt;
}

/// Closed-region witness: along the line through B parallel to `axis`, locate
/// the region's extent [lo, hi] by bisection (tolerance 1e-6) and step eps
/// outside on both ends: A = (lo - eps, ...), C = (hi + eps, ...).
inline WitnessTriple witness_closed(const std::function<bool(const Vec64&)>& member,
                                    const BoxDomain& domain, const Vec64& b, double eps,
                                    std::size_t axis = 0) {
  constexpr double tol = 1e-6;
  if (b.size() != domain.dim() || axis >= b.size())
    throw ShapeError("witness_closed: point/axis does not match the domain");
  if (!(eps > 0.0)) throw DomainError("witness_closed: eps must be positive");
  if (!domain.contains(b) || !member(b)) throw DomainError("witness_closed: B is not in the region");

  auto at = [&](double v) {
    Vec64 p = b;
    p[axis] = v;
    return p;
  };
  // Returns the last in-region coordinate found between `inside` and `edge`.
  auto extent = [&](double edge) {
    if (member(at(edge)))
      throw DomainError("witness_closed: the line through B never exits the region inside the domain");
    double in = b[axis];
    double out = edge;
    while (std::abs(in - out) > tol) {
      const double mid = 0.5 * (in + out);
      (member(at(mid)) ? in : out) = mid;
    }
    return in;
  };
  const double lo = extent(domain.lower()[axis]);
  const double hi = extent(domain.upper()[axis]);

  WitnessTriple w;
  w.construction = "closed";
  w.points = {at(lo - eps), b, at(hi + eps)};
  for (std::size_t n : {0, 2})
    if (!domain.contains(w.points[n]) || member(w.points[n]))
      throw DomainError("witness_closed: stepping eps outside the region leaves the domain or re-enters it");
  w.labels = {0.0, 1.0, 0.0};
  validate_witness(w);
  return w;
}

inline WitnessTriple witness_closed(const TaskSpec& task, const Vec64& b, double eps,
                                    std::size_t axis = 0) {
  if (task.kind() != TaskSpec::Kind::closed_shape)
    throw DomainError("witness_closed: task is not a closed_shape task");
  WitnessTriple w = witness_closed([&](const Vec64& x) { return task.inside_ball(x); },
                                   task.domain(), b, eps, axis);
  for (std::size_t n = 0; n < 3; ++n) w.labels[n] = task.label(w.points[n]);
  validate_witness(w);
  return w;
}

/// Disconnected-class witness for orthant tasks, given A and B from two
/// different same-class regions.
///  - Comparable pair (lo <= hi): find C in the other class between them:
///    first on the segment, then by nudging the region-switch point on the
///    segment by eps, finally at a corner of the box [lo, hi]. Chain lo, C, hi.
///  - Incomparable points in orthants ordered by inclusion: B is replaced by
///    max(A, B) or min(A, B), which is comparable with A.
///  - Otherwise: G = A, with i, j such that A_i < t_i <= B_i and
///    A_j >= t_j > B_j. D = G with x_j = t_j and E = G with x_i = t_i; a point
///    that lands in G's class (threshold ties go to the upper side) is moved
///    eps further. Chain D, G, E.
inline WitnessTriple witness_disconnected(const TaskSpec& task, const Vec64& a, const Vec64& b,
                                          std::optional<double> epsilon = std::nullopt) {
  if (task.kind() != TaskSpec::Kind::disconnected_quadrants &&
      task.kind() != TaskSpec::Kind::xor_discontinuous)
    throw DomainError("witness_disconnected: task must be an orthant (quadrant) task");
  if (a.size() != task.dim() || b.size() != task.dim())
    throw ShapeError("witness_disconnected: point dimension does not match the task");
  if (a == b) throw DomainError("witness_disconnected: A and B coincide");
  const double eps = epsilon.value_or(default_epsilon(task.domain()));
  const double cls = task.label(a);
  if (task.label(b) != cls || task.region_id(a) == task.region_id(b))
    throw DomainError("witness_disconnected: A and B are not in disconnected regions of one class");
  const Vec64& t = task.point();
  const BoxDomain& dom = task.domain();

  if (leq(a, b) || leq(b, a)) {
    const Vec64& lo = leq(a, b) ? a : b;
    const Vec64& hi = leq(a, b) ? b : a;
    auto lerp = [&](double s) {
      Vec64 p = lo;
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = lo[k] + s * (hi[k] - lo[k]);
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::clamp(p[k], lo[k], hi[k]);
      return p;
    };
    constexpr std::size_t steps = 1024;
    for (std::size_t n = 1; n < steps; ++n) {
      const Vec64 c = lerp(static_cast<double>(n) / steps);
      if (task.label(c) != cls) return make_witness({lo, c, hi}, task, "disconnected_segment");
    }
    // The segment only touches the other class at a corner; locate where it
    // changes region and step off the segment inside the box [lo, hi].
    double s_in = 0.0;
    double s_out = 1.0;
    const std::size_t start_region = task.region_id(lo);
    while (s_out - s_in > 1e-12) {
      const double mid = 0.5 * (s_in + s_out);
      (task.region_id(lerp(mid)) == start_region ? s_in : s_out) = mid;
    }
    const Vec64 s = lerp(s_out);
    for (std::size_t k = 0; k < s.size(); ++k)
      for (double step : {-eps, eps}) {
        Vec64 c = s;
        c[k] = std::clamp(s[k] + step, lo[k], hi[k]);
        if (task.label(c) != cls) return make_witness({lo, c, hi}, task, "disconnected_segment");
      }
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << lo.size()); ++mask) {
      Vec64 c = lo;
      for (std::size_t k = 0; k < c.size(); ++k)
        if (mask & (std::size_t{1} << k)) c[k] = hi[k];
      if (task.label(c) != cls) return make_witness({lo, c, hi}, task, "disconnected_box");
    }
    throw DomainError("witness_disconnected: no other-class point between A and B");
  }

  // Orthants ordered by inclusion of their "above" bits, points not: max(A, B)
  // (or min) stays in B's orthant and is comparable with A.
  const unsigned oa = task.orthant(a);
  const unsigned ob = task.orthant(b);
  if ((oa & ob) == oa || (oa & ob) == ob) {
    Vec64 m = b;
    for (std::size_t k = 0; k < m.size(); ++k)
      m[k] = (oa & ob) == oa ? std::max(a[k], b[k]) : std::min(a[k], b[k]);
    return witness_disconnected(task, a, m, eps);
  }

  std::optional<std::size_t> i;
  std::optional<std::size_t> j;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!i && a[k] < t[k] && t[k] <= b[k]) i = k;
    if (!j && a[k] >= t[k] && t[k] > b[k]) j = k;
  }
  if (!i || !j)
    throw DomainError("witness_disconnected: no separating thresholds between A and B");
  const Vec64& g = a;
  Vec64 d = g;
  d[*j] = t[*j];
  if (task.label(d) == cls) d[*j] = std::max(t[*j] - eps, dom.lower()[*j]);
  Vec64 e = g;
  e[*i] = t[*i];
  if (task.label(e) == cls) e[*i] = std::min(t[*i] + eps, dom.upper()[*i]);
  return make_witness({d, g, e}, task, "disconnected_thresholds");
}

struct WitnessCheck {
  enum class Verdict { contradiction_demonstrated, escaped };

  Verdict verdict = Verdict::escaped;
  std::array<double, 3> outputs{};
  std::array<double, 3> labels{};
  /// max_n |F(p_n) - label_n|. At least half the label gap whenever the
  /// outputs respect the chain.
  double max_error = 0.0;
};

inline const char* to_string(WitnessCheck::Verdict v) noexcept {
  return v == WitnessCheck::Verdict::contradiction_demonstrated ? "contradiction_demonstrated"
                                                                 : "escaped";
}

/// Evaluates a scalar network on the triple. "contradiction_demonstrated" when
/// the outputs follow the order chain (so the labels cannot all be matched);
/// "escaped" when the network breaks the chain.
inline WitnessCheck check_witness(const Network& net, const WitnessTriple& w, const TaskSpec& task) {
  for (const Vec64& p : w.points)
    if (p.size() != net.input_dim || p.size() != task.dim())
      throw ShapeError("check_witness: witness dimension " + std::to_string(p.size()) +
                       " does not match network input " + std::to_string(net.input_dim));
  if (net.output_dim() != 1) throw ShapeError("check_witness: network output is not scalar");
  WitnessCheck out;
  for (std::size_t n = 0; n < 3; ++n) out.labels[n] = task.label(w.points[n]);
  if (out.labels[0] == out.labels[1] && out.labels[1] == out.labels[2])
    throw DomainError("check_witness: all three labels are equal");
  if (!(out.labels[0] == out.labels[2] && out.labels[0] != out.labels[1]))
    throw DomainError("check_witness: labels do not form a same-different-same pattern");
  if (!leq(w.points[0], w.points[1]) || !leq(w.points[1], w.points[2]))
    throw DomainError("check_witness: points are not an order chain");
  for (std::size_t n = 0; n < 3; ++n) {
    out.outputs[n] = forward(net, w.points[n])[0];
    out.max_error = std::max(out.max_error, std::abs(out.outputs[n] - out.labels[n]));
  }
  const bool ordered = out.outputs[0] <= out.outputs[1] && out.outputs[1] <= out.outputs[2];
  out.verdict = ordered ? WitnessCheck::Verdict::contradiction_demonstrated
                        : WitnessCheck::Verdict::escaped;
  return out;
}

inline nlohmann::json to_json(const WitnessTriple& w) {
  nlohmann::json pts = nlohmann::json::array();
  for (const Vec64& p : w.points) pts.push_back(p.values());
  return {{"construction", w.construction}, {"points", pts}, {"labels", w.labels}};
}

inline nlohmann::json to_json(const WitnessCheck& c) {
  return {{"verdict", to_string(c.verdict)},
          {"outputs", c.outputs},
          {"labels", c.labels},
          {"max_error", c.max_error}};
}

}  // namespace signnet

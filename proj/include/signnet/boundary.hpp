#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "signnet/domain.hpp"
#include "signnet/network.hpp"
#include "signnet/parallel.hpp"

namespace signnet {

/// Scalar network values on the (resolution+1)^2 nodes of a uniform grid over
/// a 2-D box. Node (ix, iy) is stored at iy * (resolution+1) + ix.
struct Grid {
  BoxDomain domain;
  std::size_t resolution = 0;
  std::vector<double> values;

  std::size_t nodes_per_side() const noexcept { return resolution + 1; }
  double at(std::size_t ix, std::size_t iy) const noexcept {
    return values[iy * nodes_per_side() + ix];
  }
  double x(std::size_t ix) const noexcept { return domain.grid_coord(0, ix, resolution); }
  double y(std::size_t iy) const noexcept { return domain.grid_coord(1, iy, resolution); }
};

inline Grid evaluate_grid(const Network& net, const BoxDomain& domain, std::size_t resolution) {
  if (domain.dim() != 2 || net.input_dim != 2)
    throw ShapeError("evaluate_grid: needs a 2-input network over a 2-D domain");
  if (net.output_dim() != 1) throw ShapeError("evaluate_grid: network output is not scalar");
  if (resolution < 1) throw DomainError("evaluate_grid: resolution must be positive");
  Grid g{domain, resolution, {}};
  const std::size_t n = resolution + 1;
  g.values.assign(n * n, 0.0);
  parallel_for(n, [&](std::size_t iy) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double f = forward(net, Vec64{g.x(ix), g.y(iy)})[0];
      if (std::isnan(f)) throw NumericError("evaluate_grid: NaN output");
      g.values[iy * n + ix] = f;
    }
  });
  return g;
}

/// Straight piece of a level set: endpoints p, q with unit normal a (pointing
/// towards increasing F) and offset b, so a.p + b = a.q + b = 0.
struct BoundarySegment {
  std::array<double, 2> p{};
  std::array<double, 2> q{};
  std::array<double, 2> normal{};
  double offset = 0.0;
};

namespace detail {

struct CellCorner {
  double x, y, f;
};

inline std::array<double, 2> edge_crossing(const CellCorner& u, const CellCorner& v, double t) {
  const double s = (t - u.f) / (v.f - u.f);
  return {u.x + s * (v.x - u.x), u.y + s * (v.y - u.y)};
}

}  // namespace detail

/// Marching squares on the grid for the level F = t (corners with F >= t count
/// as above). Crossings are linearly interpolated along cell edges; saddle
/// cells are resolved by `center_value` at the cell center. Zero-length pieces
/// are dropped.
inline std::vector<BoundarySegment> extract_boundary(
    const Grid& grid, double t, const std::function<double(double, double)>& center_value) {
  std::vector<BoundarySegment> out;
  const std::size_t res = grid.resolution;
  // Corner order: 0 (x0,y0), 1 (x1,y0), 2 (x1,y1), 3 (x0,y1).
  // Edge e joins corners e and (e+1)%4.
  for (std::size_t iy = 0; iy < res; ++iy)
    for (std::size_t ix = 0; ix < res; ++ix) {
      const std::array<detail::CellCorner, 4> c{{
          {grid.x(ix), grid.y(iy), grid.at(ix, iy)},
          {grid.x(ix + 1), grid.y(iy), grid.at(ix + 1, iy)},
          {grid.x(ix + 1), grid.y(iy + 1), grid.at(ix + 1, iy + 1)},
          {grid.x(ix), grid.y(iy + 1), grid.at(ix, iy + 1)},
      }};
      std::array<bool, 4> above{};
      for (std::size_t k = 0; k < 4; ++k) above[k] = c[k].f >= t;
      std::array<std::size_t, 4> crossing{};
      std::size_t n_cross = 0;
      for (std::size_t e = 0; e < 4; ++e)
        if (above[e] != above[(e + 1) % 4]) crossing[n_cross++] = e;
      if (n_cross == 0) continue;

      std::vector<std::array<std::size_t, 2>> pairs;
      if (n_cross == 2) {
        pairs.push_back({crossing[0], crossing[1]});
      } else {
        // Saddle: isolate the corners whose side differs from the center's.
        const bool center_above =
            center_value(0.5 * (c[0].x + c[2].x), 0.5 * (c[0].y + c[2].y)) >= t;
        for (std::size_t k = 0; k < 4; ++k)
          if (above[k] != center_above) pairs.push_back({(k + 3) % 4, k});
      }

      for (const auto& [e1, e2] : pairs) {
        const auto p = detail::edge_crossing(c[e1], c[(e1 + 1) % 4], t);
        const auto q = detail::edge_crossing(c[e2], c[(e2 + 1) % 4], t);
        const double dx = q[0] - p[0];
        const double dy = q[1] - p[1];
        const double len = std::hypot(dx, dy);
        if (len == 0.0) continue;
        std::array<double, 2> n{-dy / len, dx / len};
        const double mx = 0.5 * (p[0] + q[0]);
        const double my = 0.5 * (p[1] + q[1]);
        auto side = [&](const detail::CellCorner& k) { return (k.x - mx) * n[0] + (k.y - my) * n[1]; };
        double score = 0.0;
        for (std::size_t e : {e1, e2}) {
          const auto& u = c[e];
          const auto& v = c[(e + 1) % 4];
          score += above[e] ? side(u) - side(v) : side(v) - side(u);
        }
        if (score == 0.0)
          for (const auto& k : c) score += (k.f - t) * side(k);
        if (score < 0.0) n = {-n[0], -n[1]};
        out.push_back({p, q, n, -(n[0] * p[0] + n[1] * p[1])});
      }
    }
  return out;
}

/// Level set F = t of a scalar 2-input network over `domain`, extracted from
/// a (resolution+1)^2 grid. An empty result means F never crosses t.
inline std::vector<BoundarySegment> rasterize_boundary(const Network& net, const BoxDomain& domain,
                                                       std::size_t resolution, double t) {
  if (resolution < 16) throw DomainError("rasterize_boundary: resolution must be at least 16");
  const Grid grid = evaluate_grid(net, domain, resolution);
  return extract_boundary(grid, t, [&](double x, double y) { return forward(net, Vec64{x, y})[0]; });
}

inline std::vector<BoundarySegment> rasterize_boundary(const Network& net, const Grid& grid,
                                                       double t) {
  if (grid.resolution < 16) throw DomainError("rasterize_boundary: resolution must be at least 16");
  return extract_boundary(grid, t, [&](double x, double y) { return forward(net, Vec64{x, y})[0]; });
}

enum class SlopeClass { negative, positive, axis_aligned, degenerate };

inline const char* to_string(SlopeClass s) noexcept {
  switch (s) {
    case SlopeClass::negative: return "neg_slope";
    case SlopeClass::positive: return "pos_slope";
    case SlopeClass::axis_aligned: return "axis";
    case SlopeClass::degenerate: return "degenerate";
  }
  return "?";
}

constexpr double kSlopeTolerance = 1e-9;

/// Positive slope iff a1 a2 < -tau, negative iff a1 a2 > tau, else axis-aligned.
inline SlopeClass classify_segment(const BoundarySegment& s) noexcept {
  if (s.p == s.q) return SlopeClass::degenerate;
  const double prod = s.normal[0] * s.normal[1];
  if (prod < -kSlopeTolerance) return SlopeClass::positive;
  if (prod > kSlopeTolerance) return SlopeClass::negative;
  return SlopeClass::axis_aligned;
}

struct OrientationReport {
  std::size_t neg_slope_count = 0;
  std::size_t pos_slope_count = 0;
  std::size_t axis_count = 0;
  std::size_t degenerate_count = 0;
};

inline OrientationReport classify_segment_orientations(const std::vector<BoundarySegment>& segments) {
  OrientationReport r;
  for (const auto& s : segments) switch (classify_segment(s)) {
      case SlopeClass::negative: ++r.neg_slope_count; break;
      case SlopeClass::positive: ++r.pos_slope_count; break;
      case SlopeClass::axis_aligned: ++r.axis_count; break;
      case SlopeClass::degenerate: ++r.degenerate_count; break;
    }
  return r;
}

inline nlohmann::json to_json(const OrientationReport& r) {
  return {{"neg_slope_count", r.neg_slope_count},
          {"pos_slope_count", r.pos_slope_count},
          {"axis_count", r.axis_count},
          {"degenerate_count", r.degenerate_count}};
}

/// Grid nodes p <= q with F(p) >= t > F(q). The grid order is generated by
/// unit steps right and up, so checking neighbours is exhaustive.
struct GridUpperSetViolation {
  std::array<double, 2> low{};
  std::array<double, 2> high{};
  double f_low = 0.0;
  double f_high = 0.0;
};

inline std::optional<GridUpperSetViolation> grid_upper_set_violation(const Grid& g, double t) {
  const std::size_t n = g.nodes_per_side();
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double f = g.at(ix, iy);
      if (f < t) continue;
      if (ix + 1 < n && g.at(ix + 1, iy) < t)
        return GridUpperSetViolation{{g.x(ix), g.y(iy)}, {g.x(ix + 1), g.y(iy)}, f, g.at(ix + 1, iy)};
      if (iy + 1 < n && g.at(ix, iy + 1) < t)
        return GridUpperSetViolation{{g.x(ix), g.y(iy)}, {g.x(ix), g.y(iy + 1)}, f, g.at(ix, iy + 1)};
    }
  return std::nullopt;
}

// CSV writers. Floats use 17 significant digits.

inline void write_segments_csv(std::ostream& os, const std::vector<BoundarySegment>& segments) {
  os << "seg_id,px,py,qx,qy,ax,ay,b,slope_class\n";
  char buf[512];
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", i, s.p[0],
                  s.p[1], s.q[0], s.q[1], s.normal[0], s.normal[1], s.offset,
                  to_string(classify_segment(s)));
    os << buf;
  }
}

inline void write_grid_csv(std::ostream& os, const Grid& g) {
  os << "x,y,f\n";
  char buf[128];
  const std::size_t n = g.nodes_per_side();
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.x(ix), g.y(iy), g.at(ix, iy));
      os << buf;
    }
}

}  // namespace signnet

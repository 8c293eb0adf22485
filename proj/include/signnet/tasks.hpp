#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "signnet/domain.hpp"
#include "signnet/error.hpp"
#include "signnet/training.hpp"

namespace signnet {

/// f(x1, x2) = x1 + x2 - 2 x1 x2 on [0,1]^2.
inline double xor_continuous(const Vec64& x) {
  if (x.size() != 2 || !(x[0] >= 0.0 && x[0] <= 1.0 && x[1] >= 0.0 && x[1] <= 1.0))
    throw DomainError("xor_continuous: point outside [0,1]^2");
  return x[0] + x[1] - 2.0 * x[0] * x[1];
}

/// 0 when both coordinates sit on the same side of their thresholds (the upper
/// side includes the threshold), 1 otherwise.
inline int xor_discontinuous(const Vec64& x, double t1, double t2) {
  if (!(t1 > 0.0 && t1 < 1.0 && t2 > 0.0 && t2 < 1.0))
    throw DomainError("xor_discontinuous: thresholds must lie in (0,1)");
  if (x.size() != 2 || !(x[0] >= 0.0 && x[0] <= 1.0 && x[1] >= 0.0 && x[1] <= 1.0))
    throw DomainError("xor_discontinuous: point outside [0,1]^2");
  const bool hi1 = x[0] >= t1;
  const bool hi2 = x[1] >= t2;
  return hi1 == hi2 ? 0 : 1;
}

/// A binary or real-valued target over a box domain.
class TaskSpec {
 public:
  enum class Kind { xor_continuous, xor_discontinuous, closed_shape, disconnected_quadrants, halfplane };

  static TaskSpec make_xor_continuous() { return TaskSpec(Kind::xor_continuous, BoxDomain::unit(2)); }

  static TaskSpec make_xor_discontinuous(double t1, double t2) {
    if (!(t1 > 0.0 && t1 < 1.0 && t2 > 0.0 && t2 < 1.0))
      throw DomainError("xor_discontinuous: thresholds must lie in (0,1)");
    TaskSpec t(Kind::xor_discontinuous, BoxDomain::unit(2));
    t.point_ = Vec64{t1, t2};
    return t;
  }

  /// Disk (ball) of the given radius, class 1 inside (boundary included).
  /// The ball must lie strictly inside the domain.
  static TaskSpec make_closed_shape(Vec64 center, double radius,
                                    std::optional<BoxDomain> domain = std::nullopt) {
    BoxDomain dom = domain ? *domain : BoxDomain::unit(center.size());
    if (center.size() != dom.dim()) throw ShapeError("closed_shape: center dimension mismatch");
    if (!(radius > 0.0)) throw DomainError("closed_shape: radius must be positive");
    for (std::size_t k = 0; k < dom.dim(); ++k)
      if (!(center[k] - radius > dom.lower()[k] && center[k] + radius < dom.upper()[k]))
        throw DomainError("closed_shape: disk of radius " + std::to_string(radius) +
                          " does not fit strictly inside the domain");
    TaskSpec t(Kind::closed_shape, std::move(dom));
    t.point_ = std::move(center);
    t.scalar_ = radius;
    return t;
  }

  /// Orthants of the unit cube split at `thresholds`; class = parity of the
  /// number of coordinates at or above their threshold. Same-class orthants
  /// are pairwise path-disconnected.
  static TaskSpec make_disconnected_quadrants(Vec64 thresholds = Vec64{0.5, 0.5}) {
    if (thresholds.size() < 2) throw DomainError("disconnected_quadrants needs dimension >= 2");
    for (double t : thresholds)
      if (!(t > 0.0 && t < 1.0)) throw DomainError("disconnected_quadrants: thresholds must lie in (0,1)");
    TaskSpec t(Kind::disconnected_quadrants, BoxDomain::unit(thresholds.size()));
    t.point_ = std::move(thresholds);
    return t;
  }

  /// Class 1 where a.x + b >= 0.
  static TaskSpec make_halfplane(Vec64 normal, double offset,
                                 std::optional<BoxDomain> domain = std::nullopt) {
    BoxDomain dom = domain ? *domain : BoxDomain::unit(normal.size());
    if (normal.size() != dom.dim()) throw ShapeError("halfplane: normal dimension mismatch");
    bool nonzero = false;
    for (double a : normal) nonzero = nonzero || a != 0.0;
    if (!nonzero) throw DomainError("halfplane: normal must be nonzero");
    TaskSpec t(Kind::halfplane, std::move(dom));
    t.point_ = std::move(normal);
    t.scalar_ = offset;
    return t;
  }

  Kind kind() const noexcept { return kind_; }
  const BoxDomain& domain() const noexcept { return domain_; }
  std::size_t dim() const noexcept { return domain_.dim(); }
  bool is_classification() const noexcept { return kind_ != Kind::xor_continuous; }

  /// Thresholds (xor_discontinuous, disconnected_quadrants), center
  /// (closed_shape) or normal (halfplane).
  const Vec64& point() const noexcept { return point_; }
  /// Radius (closed_shape) or offset (halfplane).
  double scalar() const noexcept { return scalar_; }

  double label(const Vec64& x) const {
    if (!domain_.contains(x)) throw DomainError("task label requested outside the domain");
    switch (kind_) {
      case Kind::xor_continuous:
        return xor_continuous(x);
      case Kind::xor_discontinuous:
        return xor_discontinuous(x, point_[0], point_[1]);
      case Kind::closed_shape:
        return inside_ball(x) ? 1.0 : 0.0;
      case Kind::disconnected_quadrants:
        return static_cast<double>(std::popcount(orthant(x)) % 2);
      case Kind::halfplane:
        return signed_offset(x) >= 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
  }

  /// Region containing x in the task's partition. Throws for xor_continuous,
  /// which is not a partition.
  std::size_t region_id(const Vec64& x) const {
    if (!domain_.contains(x)) throw DomainError("region requested outside the domain");
    switch (kind_) {
      case Kind::xor_discontinuous:
      case Kind::disconnected_quadrants:
        return orthant(x);
      case Kind::closed_shape:
        return inside_ball(x) ? 0 : 1;
      case Kind::halfplane:
        return signed_offset(x) >= 0.0 ? 1 : 0;
      case Kind::xor_continuous:
        break;
    }
    throw DomainError("xor_continuous is a regression target, not a partition");
  }

  std::size_t region_count() const {
    switch (kind_) {
      case Kind::xor_discontinuous:
      case Kind::disconnected_quadrants:
        return std::size_t{1} << dim();
      case Kind::closed_shape:
      case Kind::halfplane:
        return 2;
      case Kind::xor_continuous:
        break;
    }
    throw DomainError("xor_continuous is a regression target, not a partition");
  }

  bool inside_ball(const Vec64& x) const {
    double d2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - point_[k]) * (x[k] - point_[k]);
    return d2 <= scalar_ * scalar_;
  }

  double signed_offset(const Vec64& x) const {
    double s = scalar_;
    for (std::size_t k = 0; k < x.size(); ++k) s += point_[k] * x[k];
    return s;
  }

  /// Bit k set iff x_k >= threshold_k.
  unsigned orthant(const Vec64& x) const {
    unsigned bits = 0;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k] >= point_[k]) bits |= 1u << k;
    return bits;
  }

 private:
  TaskSpec(Kind k, BoxDomain d) : kind_(k), domain_(std::move(d)) {}

  Kind kind_;
  BoxDomain domain_;
  Vec64 point_;
  double scalar_ = 0.0;
};

inline const char* to_string(TaskSpec::Kind k) noexcept {
  switch (k) {
    case TaskSpec::Kind::xor_continuous: return "xor_continuous";
    case TaskSpec::Kind::xor_discontinuous: return "xor_discontinuous";
    case TaskSpec::Kind::closed_shape: return "closed_shape";
    case TaskSpec::Kind::disconnected_quadrants: return "disconnected_quadrants";
    case TaskSpec::Kind::halfplane: return "halfplane";
  }
  return "?";
}

inline nlohmann::json to_json(const TaskSpec& t) {
  nlohmann::json j;
  j["kind"] = to_string(t.kind());
  switch (t.kind()) {
    case TaskSpec::Kind::xor_continuous: break;
    case TaskSpec::Kind::xor_discontinuous:
    case TaskSpec::Kind::disconnected_quadrants: j["thresholds"] = t.point().values(); break;
    case TaskSpec::Kind::closed_shape:
      j["center"] = t.point().values();
      j["radius"] = t.scalar();
      break;
    case TaskSpec::Kind::halfplane:
      j["normal"] = t.point().values();
      j["offset"] = t.scalar();
      break;
  }
  j["lower"] = t.domain().lower().values();
  j["upper"] = t.domain().upper().values();
  return j;
}

/// Accepts the objects produced by to_json; "lower"/"upper" are optional and
/// only honored by closed_shape and halfplane.
inline TaskSpec task_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    std::optional<BoxDomain> dom;
    if (j.contains("lower") && j.contains("upper"))
      dom = BoxDomain(Vec64(j.at("lower").get<std::vector<double>>()),
                      Vec64(j.at("upper").get<std::vector<double>>()));
    if (kind == "xor_continuous") return TaskSpec::make_xor_continuous();
    if (kind == "xor_discontinuous") {
      const auto t = j.value("thresholds", std::vector<double>{0.5, 0.5});
      if (t.size() != 2) throw ParseError("xor_discontinuous needs two thresholds");
      return TaskSpec::make_xor_discontinuous(t[0], t[1]);
    }
    if (kind == "closed_shape")
      return TaskSpec::make_closed_shape(Vec64(j.value("center", std::vector<double>{0.5, 0.5})),
                                         j.value("radius", 0.25), dom);
    if (kind == "disconnected_quadrants")
      return TaskSpec::make_disconnected_quadrants(
          Vec64(j.value("thresholds", std::vector<double>{0.5, 0.5})));
    if (kind == "halfplane")
      return TaskSpec::make_halfplane(Vec64(j.at("normal").get<std::vector<double>>()),
                                      j.value("offset", 0.0), dom);
    throw ParseError("unknown task kind '" + kind + "'");
  } catch (const ParseError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("task: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

struct Region {
  std::size_t id = 0;
  double class_id = 0.0;
  std::function<bool(const Vec64&)> contains;
};

/// The task's partition as explicit regions.
inline std::vector<Region> regions(const TaskSpec& task) {
  std::vector<Region> out;
  const std::size_t n = task.region_count();
  for (std::size_t id = 0; id < n; ++id) {
    Region r;
    r.id = id;
    switch (task.kind()) {
      case TaskSpec::Kind::xor_discontinuous:
      case TaskSpec::Kind::disconnected_quadrants:
        r.class_id = static_cast<double>(std::popcount(static_cast<unsigned>(id)) % 2);
        break;
      case TaskSpec::Kind::closed_shape:
        r.class_id = id == 0 ? 1.0 : 0.0;
        break;
      default:
        r.class_id = static_cast<double>(id);
    }
    r.contains = [task, id](const Vec64& x) { return task.region_id(x) == id; };
    out.push_back(std::move(r));
  }
  return out;
}

/// Grid audit of the partition properties for a 2-D task: regions nonempty,
/// covering, disjoint, label-constant, and 4-adjacent grid points in different
/// regions carrying different classes.
struct PartitionReport {
  bool nonempty = true;
  bool covering = true;
  bool disjoint = true;
  bool constant_label = true;
  bool adjacent_differ = true;

  bool ok() const noexcept {
    return nonempty && covering && disjoint && constant_label && adjacent_differ;
  }
};

inline PartitionReport check_partition(const TaskSpec& task, std::size_t resolution) {
  if (task.dim() != 2) throw DomainError("check_partition: 2-D tasks only");
  if (resolution < 2) throw DomainError("check_partition: resolution must be at least 2");
  const auto regs = regions(task);
  const BoxDomain& d = task.domain();
  const std::size_t n = resolution + 1;
  std::vector<std::size_t> owner(n * n, 0);
  std::vector<bool> hit(regs.size(), false);
  PartitionReport rep;
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const Vec64 x{d.grid_coord(0, ix, resolution), d.grid_coord(1, iy, resolution)};
      std::size_t count = 0;
      for (const Region& r : regs)
        if (r.contains(x)) {
          ++count;
          owner[iy * n + ix] = r.id;
          hit[r.id] = true;
          if (task.label(x) != r.class_id) rep.constant_label = false;
        }
      if (count == 0) rep.covering = false;
      if (count > 1) rep.disjoint = false;
    }
  for (bool h : hit) rep.nonempty = rep.nonempty && h;
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) {
      const std::size_t a = owner[iy * n + ix];
      auto check = [&](std::size_t b) {
        if (a != b && regs[a].class_id == regs[b].class_id) rep.adjacent_differ = false;
      };
      if (ix + 1 < n) check(owner[iy * n + ix + 1]);
      if (iy + 1 < n) check(owner[(iy + 1) * n + ix]);
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

/// The four XOR corners with targets from xor_continuous.
inline Dataset xor_corners() {
  Dataset d;
  for (double a : {0.0, 1.0})
    for (double b : {0.0, 1.0}) {
      const Vec64 x{a, b};
      d.push_back({x, Vec64{xor_continuous(x)}});
    }
  return d;
}

/// Labels of a 2-D task on a uniform (resolution+1)^2 grid.
inline Dataset grid_dataset(const TaskSpec& task, std::size_t resolution) {
  if (task.dim() != 2) throw DomainError("grid_dataset: 2-D tasks only");
  if (resolution < 1) throw DomainError("grid_dataset: resolution must be positive");
  const BoxDomain& d = task.domain();
  Dataset out;
  for (std::size_t iy = 0; iy <= resolution; ++iy)
    for (std::size_t ix = 0; ix <= resolution; ++ix) {
      const Vec64 x{d.grid_coord(0, ix, resolution), d.grid_coord(1, iy, resolution)};
      out.push_back({x, Vec64{task.label(x)}});
    }
  return out;
}

}  // namespace signnet

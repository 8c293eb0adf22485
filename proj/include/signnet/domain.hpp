#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include "signnet/error.hpp"
#include "signnet/rng.hpp"
#include "signnet/tensor.hpp"

namespace signnet {

/// Compact axis-aligned box K = [lower, upper].
class BoxDomain {
 public:
  BoxDomain(Vec64 lower, Vec64 upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size())
      throw ShapeError("box bounds have lengths " + std::to_string(lower_.size()) + " and " +
                       std::to_string(upper_.size()));
    if (!all_finite(lower_.span()) || !all_finite(upper_.span()))
      throw DomainError("box bounds must be finite");
    bool strict = false;
    for (std::size_t k = 0; k < lower_.size(); ++k) {
      if (lower_[k] > upper_[k]) throw DomainError("box lower bound exceeds upper bound");
      strict = strict || lower_[k] < upper_[k];
    }
    if (!strict) throw DomainError("degenerate box: zero width in every dimension");
  }

  /// [lo, hi]^dim
  static BoxDomain cube(std::size_t dim, double lo, double hi) {
    return BoxDomain(Vec64(dim, lo), Vec64(dim, hi));
  }
  static BoxDomain unit(std::size_t dim) { return cube(dim, 0.0, 1.0); }

  std::size_t dim() const noexcept { return lower_.size(); }
  const Vec64& lower() const noexcept { return lower_; }
  const Vec64& upper() const noexcept { return upper_; }
  double width(std::size_t k) const noexcept { return upper_[k] - lower_[k]; }

  /// Coordinate k of grid node i on a uniform grid with `resolution` cells;
  /// node `resolution` lands exactly on the upper bound.
  double grid_coord(std::size_t k, std::size_t i, std::size_t resolution) const noexcept {
    if (i >= resolution) return upper_[k];
    return lower_[k] + width(k) * (static_cast<double>(i) / static_cast<double>(resolution));
  }

  bool contains(const Vec64& x) const noexcept {
    if (x.size() != dim()) return false;
    for (std::size_t k = 0; k < dim(); ++k)
      if (!(x[k] >= lower_[k] && x[k] <= upper_[k])) return false;
    return true;
  }

  Vec64 sample(Rng& rng) const {
    Vec64 x(dim());
    for (std::size_t k = 0; k < dim(); ++k) x[k] = rng.uniform(lower_[k], upper_[k]);
    return x;
  }

 private:
  Vec64 lower_;
  Vec64 upper_;
};

}  // namespace signnet

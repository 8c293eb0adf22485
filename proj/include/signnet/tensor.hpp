#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "signnet/error.hpp"

namespace signnet {

/// Dense vector of doubles. Default construction yields an empty placeholder;
/// every sized constructor requires at least one element.
class Vec64 {
 public:
  Vec64() = default;
  explicit Vec64(std::size_t n, double fill = 0.0) : data_(n, fill) { check_nonempty(); }
  Vec64(std::initializer_list<double> init) : data_(init) { check_nonempty(); }
  explicit Vec64(std::vector<double> values) : data_(std::move(values)) { check_nonempty(); }

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  friend bool operator==(const Vec64&, const Vec64&) = default;

 private:
  void check_nonempty() const {
    if (data_.empty()) throw ShapeError("Vec64 must hold at least one element");
  }

  std::vector<double> data_;
};

/// Row-major dense matrix of doubles.
class Mat64 {
 public:
  Mat64() = default;
  Mat64(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Mat64(std::size_t rows, std::size_t cols, std::vector<double> row_major)
      : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows_ * cols_)
      throw ShapeError("Mat64 " + detail::shape_str(rows_, cols_) + " given " +
                       std::to_string(data_.size()) + " elements");
  }
  Mat64(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ShapeError("Mat64 rows have unequal lengths");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Mat64 identity(std::size_t n) {
    Mat64 m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }

  std::string shape() const { return detail::shape_str(rows_, cols_); }

  friend bool operator==(const Mat64&, const Mat64&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline bool all_finite(std::span<const double> xs) noexcept {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

namespace detail {

inline void require_finite(std::span<const double> xs, const char* where) {
  if (!all_finite(xs)) throw NumericError(std::string("non-finite value produced by ") + where);
}

}  // namespace detail

/// out[i] = sum_j m(i,j) * v[j], accumulated left to right.
inline Vec64 matvec(const Mat64& m, const Vec64& v) {
  if (m.cols() != v.size())
    throw ShapeError("matvec: matrix " + m.shape() + " cannot multiply vector of length " +
                     std::to_string(v.size()));
  Vec64 out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * v[j];
    out[i] = acc;
  }
  detail::require_finite(out.span(), "matvec");
  return out;
}

/// out[j] = sum_i m(i,j) * v[i]. Used by reverse-mode passes.
inline Vec64 matvec_transposed(const Mat64& m, const Vec64& v) {
  if (m.rows() != v.size())
    throw ShapeError("matvec_transposed: matrix " + m.shape() +
                     " cannot multiply vector of length " + std::to_string(v.size()));
  Vec64 out(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j] * v[i];
  }
  detail::require_finite(out.span(), "matvec_transposed");
  return out;
}

inline Vec64 add(const Vec64& a, const Vec64& b) {
  if (a.size() != b.size())
    throw ShapeError("add: lengths " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()) + " differ");
  Vec64 out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  detail::require_finite(out.span(), "add");
  return out;
}

inline Vec64 scale(const Vec64& a, double s) {
  Vec64 out = a;
  for (double& x : out) x *= s;
  return out;
}

}  // namespace signnet

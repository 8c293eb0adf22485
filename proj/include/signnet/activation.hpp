#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "signnet/error.hpp"

namespace signnet {

/// Scalar non-decreasing activation. Every kind satisfies u <= v => f(u) <= f(v),
/// including under IEEE round-to-nearest, which is what the order certificates
/// rely on.
struct Activation {
  enum class Kind { relu, leaky_relu, sigmoid, tanh, identity };

  Kind kind = Kind::relu;
  double alpha = 0.01;  // leaky_relu slope on the negative side

  static constexpr Activation relu() { return {Kind::relu}; }
  static constexpr Activation leaky_relu(double a = 0.01) { return {Kind::leaky_relu, a}; }
  static constexpr Activation sigmoid() { return {Kind::sigmoid}; }
  static constexpr Activation tanh() { return {Kind::tanh}; }
  static constexpr Activation identity() { return {Kind::identity}; }

  friend bool operator==(const Activation& a, const Activation& b) {
    return a.kind == b.kind && (a.kind != Kind::leaky_relu || a.alpha == b.alpha);
  }
};

inline double eval_activation(const Activation& a, double u) noexcept {
  switch (a.kind) {
    case Activation::Kind::relu:
      return u < 0.0 ? 0.0 : u;
    case Activation::Kind::leaky_relu:
      return u < 0.0 ? a.alpha * u : u;
    case Activation::Kind::sigmoid:
      // Single formula on purpose: exp, +1 and 1/x are each monotone under
      // rounding, so the composition is too. exp overflow gives 1/inf = 0.
      return 1.0 / (1.0 + std::exp(-u));
    case Activation::Kind::tanh:
      return std::tanh(u);
    case Activation::Kind::identity:
      return u;
  }
  return u;
}

/// Derivative with respect to the pre-activation. relu'(0) = 0.
inline double activation_derivative(const Activation& a, double u) noexcept {
  switch (a.kind) {
    case Activation::Kind::relu:
      return u > 0.0 ? 1.0 : 0.0;
    case Activation::Kind::leaky_relu:
      return u > 0.0 ? 1.0 : a.alpha;
    case Activation::Kind::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-u));
      return s * (1.0 - s);
    }
    case Activation::Kind::tanh: {
      const double t = std::tanh(u);
      return 1.0 - t * t;
    }
    case Activation::Kind::identity:
      return 1.0;
  }
  return 1.0;
}

/// True when the kind is non-decreasing for its parameters.
inline bool is_non_decreasing(const Activation& a) noexcept {
  return a.kind != Activation::Kind::leaky_relu || a.alpha > 0.0;
}

inline std::string_view to_string(Activation::Kind k) noexcept {
  switch (k) {
    case Activation::Kind::relu: return "relu";
    case Activation::Kind::leaky_relu: return "leaky_relu";
    case Activation::Kind::sigmoid: return "sigmoid";
    case Activation::Kind::tanh: return "tanh";
    case Activation::Kind::identity: return "identity";
  }
  return "?";
}

inline Activation parse_activation(std::string_view name, double alpha = 0.01) {
  if (name == "relu") return Activation::relu();
  if (name == "leaky_relu") {
    if (!(alpha > 0.0)) throw DomainError("leaky_relu slope must be positive");
    return Activation::leaky_relu(alpha);
  }
  if (name == "sigmoid") return Activation::sigmoid();
  if (name == "tanh") return Activation::tanh();
  if (name == "identity") return Activation::identity();
  throw ParseError("unknown activation '" + std::string(name) + "'");
}

}  // namespace signnet

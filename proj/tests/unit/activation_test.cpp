#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "signnet/activation.hpp"
#include "signnet/rng.hpp"

using namespace signnet;

namespace {
const Activation kAll[] = {Activation::relu(), Activation::leaky_relu(0.2), Activation::sigmoid(),
                           Activation::tanh(), Activation::identity()};
}

TEST(Activation, Examples) {
  EXPECT_EQ(eval_activation(Activation::relu(), -2.0), 0.0);
  EXPECT_EQ(eval_activation(Activation::relu(), 3.5), 3.5);
  EXPECT_EQ(eval_activation(Activation::sigmoid(), 0.0), 0.5);
  EXPECT_EQ(eval_activation(Activation::tanh(), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(eval_activation(Activation::leaky_relu(0.1), -2.0), -0.2);
  EXPECT_EQ(eval_activation(Activation::identity(), -7.25), -7.25);
}

TEST(Activation, SigmoidSaturatesWithoutNan) {
  EXPECT_EQ(eval_activation(Activation::sigmoid(), -1000.0), 0.0);
  EXPECT_EQ(eval_activation(Activation::sigmoid(), 1000.0), 1.0);
}

TEST(Activation, NonDecreasingOnRandomPairs) {
  Rng rng(2024);
  for (const Activation& a : kAll) {
    for (int t = 0; t < 100000; ++t) {
      // Mix wide and narrow scales so both saturation and tiny gaps are hit.
      const double scale = t % 3 == 0 ? 50.0 : (t % 3 == 1 ? 5.0 : 1e-3);
      double u = rng.uniform(-scale, scale), v = rng.uniform(-scale, scale);
      if (u > v) std::swap(u, v);
      ASSERT_LE(eval_activation(a, u), eval_activation(a, v)) << to_string(a.kind) << " " << u << " " << v;
    }
  }
}

TEST(Activation, NonDecreasingOnAdjacentDoubles) {
  Rng rng(7);
  for (const Activation& a : kAll)
    for (int t = 0; t < 20000; ++t) {
      const double u = rng.uniform(-40, 40);
      const double v = std::nextafter(u, std::numeric_limits<double>::infinity());
      ASSERT_LE(eval_activation(a, u), eval_activation(a, v)) << to_string(a.kind) << " " << u;
    }
}

TEST(Activation, DerivativeConventions) {
  EXPECT_EQ(activation_derivative(Activation::relu(), 0.0), 0.0);
  EXPECT_EQ(activation_derivative(Activation::relu(), 1e-300), 1.0);
  EXPECT_EQ(activation_derivative(Activation::leaky_relu(0.3), 0.0), 0.3);
  EXPECT_EQ(activation_derivative(Activation::sigmoid(), 0.0), 0.25);
  EXPECT_EQ(activation_derivative(Activation::tanh(), 0.0), 1.0);
}

TEST(Activation, DerivativeMatchesCentralDifference) {
  for (const Activation& a : kAll)
    for (double u : {-2.3, -0.7, 0.4, 1.9}) {
      const double h = 1e-6;
      const double fd = (eval_activation(a, u + h) - eval_activation(a, u - h)) / (2 * h);
      EXPECT_NEAR(activation_derivative(a, u), fd, 1e-8) << to_string(a.kind);
    }
}

TEST(Activation, ParseRoundTrip) {
  for (const Activation& a : kAll) EXPECT_EQ(parse_activation(to_string(a.kind), a.alpha), a);
  EXPECT_THROW(parse_activation("softplus"), ParseError);
  EXPECT_THROW(parse_activation("leaky_relu", -0.1), DomainError);
  EXPECT_FALSE(is_non_decreasing(Activation::leaky_relu(-0.5)));
  EXPECT_TRUE(is_non_decreasing(Activation::sigmoid()));
}

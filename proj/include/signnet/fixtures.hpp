#pragma once

// Small hand-built networks for the sign-flip demonstrations. Each "flipped"
// network differs from a non-negative one in the sign of the weights named in
// its comment. The JSON copies under fixtures/ are produced by
// tools/make_fixtures.cpp from these builders.

#include "signnet/network.hpp"

namespace signnet::fixtures {

inline Network two_layer(Mat64 w1, Vec64 b1, Activation hidden, Mat64 w2, Vec64 b2, Activation out) {
  Network net;
  net.input_dim = w1.cols();
  net.layers.emplace_back(DenseLayer{std::move(w1), std::move(b1), hidden});
  net.layers.emplace_back(DenseLayer{std::move(w2), std::move(b2), out});
  return net;
}

/// 2-hidden-unit relu net, F = sigmoid(4 (2 x2 - x1)) on [0,1]^2, whose
/// decision boundary F = 0.5 is the positive-slope line x2 = x1 / 2.
/// Input weight (0,0) is the single negative weight.
inline Network fig1a_flipped() {
  return two_layer(Mat64{{-2.0, 1.0}, {1.0, 1.0}}, Vec64{2.0, 0.0}, Activation::relu(),
                   Mat64{{4.0, 4.0}}, Vec64{-8.0}, Activation::sigmoid());
}

/// fig1a_flipped with the flipped input weight restored to +2.
inline Network fig1a_unflipped() { return flip_weight(fig1a_flipped(), 0, 0, 0); }

/// 4-hidden-unit relu net whose sublevel set {F < 0.5} is a bounded convex
/// region around (0.5, 0.5): the diamond |x1 - 0.5| + |x2 - 0.5| < 0.35 with
/// its four tips clipped where two hidden units are on at once. It contains
/// the diamond of radius 0.3. Unit 0 keeps non-negative input weights,
/// units 1 and 2 have one negative input weight each, unit 3 has both
/// negative. Output weights are positive.
inline Network fig1b_closed() {
  return two_layer(Mat64{{1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}},
                   Vec64{-1.3, -0.3, -0.3, 0.7}, Activation::relu(),
                   Mat64{{10.0, 10.0, 10.0, 10.0}}, Vec64{-0.5}, Activation::sigmoid());
}

/// 3-hidden-unit XOR solver: h = relu(x1), relu(x2), relu(x1 + x2 - 1);
/// F = h0 + h1 - 2 h2 (identity output). The output weight of hidden unit 2
/// is the single negative weight; F matches XOR exactly on the corners.
inline Network xor_fig1c() {
  return two_layer(Mat64{{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}, Vec64{0.0, 0.0, -1.0},
                   Activation::relu(), Mat64{{1.0, 1.0, -2.0}}, Vec64{0.0},
                   Activation::identity());
}

/// Location of the flipped output weight in xor_fig1c: (layer, row, col).
struct WeightIndex {
  std::size_t layer, row, col;
};
inline constexpr WeightIndex xor_fig1c_flipped_weight{1, 0, 2};

/// xor_fig1c with its negative output weight made positive.
inline Network xor_fig1c_unflipped() {
  const auto [l, r, c] = xor_fig1c_flipped_weight;
  return flip_weight(xor_fig1c(), l, r, c);
}

/// F(x) = x1 + x2 - 1: level set F = 0 is the anti-diagonal of [0,1]^2.
inline Network linear_antidiagonal() {
  Network net;
  net.input_dim = 2;
  net.layers.emplace_back(DenseLayer{Mat64{{1.0, 1.0}}, Vec64{-1.0}, Activation::identity()});
  return net;
}

/// A non-negative 2-8-8-1 relu/sigmoid network drawn from a fixed seed.
inline Network dnnplus_example() {
  Architecture arch = Architecture::parse("2-8-8-1");
  arch.hidden = Activation::relu();
  arch.output = Activation::sigmoid();
  Rng rng(20240101);
  return init_random(arch, SignConstraint::nonneg(), rng);
}

}  // namespace signnet::fixtures

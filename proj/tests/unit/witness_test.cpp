#include <gtest/gtest.h>

#include <cmath>

#include "../support/random_nets.hpp"
#include "signnet/fixtures.hpp"
#include "signnet/witness.hpp"

using namespace signnet;

namespace {

double affine(const Vec64& a, double b, const Vec64& x) {
  double s = b;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * x[k];
  return s;
}

void expect_point(const Vec64& p, std::initializer_list<double> want, double tol = 1e-12) {
  ASSERT_EQ(p.size(), want.size());
  std::size_t k = 0;
  for (double w : want) EXPECT_NEAR(p[k++], w, tol);
}

WitnessTriple xor_triple() {
  return make_witness({Vec64{0, 0}, Vec64{1, 0}, Vec64{1, 1}}, TaskSpec::make_xor_discontinuous(0.5, 0.5),
                      "xor");
}

}  // namespace

TEST(WitnessOrientation, Example) {
  const Vec64 a{1, -1};
  const WitnessTriple w = witness_orientation(a, 0.0, Vec64{0.5, 0.5}, 0.1, 0, 1);
  expect_point(w.points[0], {0.4, 0.5});
  expect_point(w.points[1], {0.6, 0.5});
  expect_point(w.points[2], {0.6, 0.7});
  EXPECT_NEAR(affine(a, 0, w.points[0]), -0.1, 1e-12);
  EXPECT_NEAR(affine(a, 0, w.points[1]), 0.1, 1e-12);
  EXPECT_NEAR(affine(a, 0, w.points[2]), -0.1, 1e-12);
}

TEST(WitnessOrientation, MirroredExample) {
  const Vec64 a{-1, 1};
  const WitnessTriple w = witness_orientation(a, 0.0, Vec64{0.5, 0.5}, 0.1, 1, 0);
  expect_point(w.points[0], {0.5, 0.4});
  expect_point(w.points[1], {0.5, 0.6});
  expect_point(w.points[2], {0.7, 0.6});
  EXPECT_NEAR(affine(a, 0, w.points[0]), -0.1, 1e-12);
  EXPECT_NEAR(affine(a, 0, w.points[1]), 0.1, 1e-12);
  EXPECT_NEAR(affine(a, 0, w.points[2]), -0.1, 1e-12);
}

TEST(WitnessOrientation, Errors) {
  EXPECT_THROW(witness_orientation(Vec64{1, 1}, -1.0, Vec64{0.5, 0.5}, 0.1, 0, 1), DomainError);
  EXPECT_THROW(witness_orientation(Vec64{1, -1}, 0.0, Vec64{0.5, 0.6}, 0.1, 0, 1), DomainError);
  EXPECT_THROW(witness_orientation(Vec64{1, -1}, 0.0, Vec64{0.5, 0.5}, 0.0, 0, 1), DomainError);
  EXPECT_THROW(witness_orientation(Vec64{1, -1}, 0.0, Vec64{0.5, 0.5}, 0.1, 0, 0), DomainError);
  EXPECT_THROW(witness_orientation(Vec64{1, -1}, 0.0, Vec64{0.5}, 0.1, 0, 1), ShapeError);
}

TEST(WitnessOrientation, RandomParameterizations) {
  Rng rng(31);
  for (int n = 0; n < 100; ++n) {
    const std::size_t dim = 2 + rng.index(4);
    Vec64 a(dim);
    for (double& v : a) v = rng.uniform(-2, 2);
    const std::size_t i = rng.index(dim);
    std::size_t j = rng.index(dim - 1);
    if (j >= i) ++j;
    a[i] = rng.uniform(0.1, 2);
    a[j] = -rng.uniform(0.1, 2);
    if (rng.index(2)) {
      a[i] = -a[i];
      a[j] = -a[j];
    }
    Vec64 d(dim);
    for (double& v : d) v = rng.uniform(0, 1);
    const double b = -affine(a, 0, d);
    const double eps = rng.uniform(1e-3, 0.2);
    const WitnessTriple w = witness_orientation(a, b, d, eps, i, j);
    EXPECT_TRUE(leq(w.points[0], w.points[1]));
    EXPECT_TRUE(leq(w.points[1], w.points[2]));
    const double scale = std::abs(a[i]) * eps;
    EXPECT_NEAR(affine(a, b, w.points[0]), -a[i] * eps, 1e-9 * (1 + scale));
    EXPECT_NEAR(affine(a, b, w.points[1]), a[i] * eps, 1e-9 * (1 + scale));
    EXPECT_NEAR(affine(a, b, w.points[2]), -a[i] * eps, 1e-9 * (1 + scale));
    EXPECT_EQ(w.labels[0], w.labels[2]);
    EXPECT_NE(w.labels[0], w.labels[1]);
  }
}

TEST(WitnessClosed, DiskExample) {
  const TaskSpec disk = TaskSpec::make_closed_shape(Vec64{0.5, 0.5}, 0.2);
  const WitnessTriple w = witness_closed(disk, Vec64{0.5, 0.5}, 0.05);
  expect_point(w.points[0], {0.25, 0.5}, 1e-6);
  expect_point(w.points[1], {0.5, 0.5});
  expect_point(w.points[2], {0.75, 0.5}, 1e-6);
  EXPECT_EQ(w.labels, (std::array<double, 3>{0, 1, 0}));
}

TEST(WitnessClosed, OffCenterPointOnSameLineGivesSameEnds) {
  const TaskSpec disk = TaskSpec::make_closed_shape(Vec64{0.5, 0.5}, 0.2);
  const WitnessTriple c = witness_closed(disk, Vec64{0.5, 0.5}, 0.05);
  const WitnessTriple o = witness_closed(disk, Vec64{0.62, 0.5}, 0.05);
  EXPECT_NEAR(o.points[0][0], c.points[0][0], 1e-6);
  EXPECT_NEAR(o.points[2][0], c.points[2][0], 1e-6);
}

TEST(WitnessClosed, Errors) {
  const TaskSpec disk = TaskSpec::make_closed_shape(Vec64{0.5, 0.5}, 0.2);
  EXPECT_THROW(witness_closed(disk, Vec64{0.9, 0.9}, 0.05), DomainError);
  EXPECT_THROW(witness_closed(disk, Vec64{0.5, 0.5}, 0.4), DomainError);
  EXPECT_THROW(witness_closed(TaskSpec::make_disconnected_quadrants(), Vec64{0.5, 0.5}, 0.05), DomainError);
  EXPECT_THROW(TaskSpec::make_closed_shape(Vec64{0.5, 0.5}, 0.7), DomainError);
  // A region that reaches the domain edge never closes along the scan line.
  auto strip = [](const Vec64& x) { return x[1] < 0.6 && x[1] > 0.4; };
  EXPECT_THROW(witness_closed(strip, BoxDomain::unit(2), Vec64{0.5, 0.5}, 0.05), DomainError);
}

TEST(WitnessClosed, RandomParameterizations) {
  Rng rng(32);
  for (int n = 0; n < 100; ++n) {
    const std::size_t dim = 2 + rng.index(3);
    const double r = rng.uniform(0.05, 0.3);
    Vec64 c(dim);
    for (double& v : c) v = rng.uniform(r + 0.1, 0.9 - r);
    const TaskSpec disk = TaskSpec::make_closed_shape(c, r);
    Vec64 b = c;
    for (double& v : b) v += rng.uniform(-0.5, 0.5) * r / std::sqrt(static_cast<double>(dim));
    const std::size_t axis = rng.index(dim);
    const WitnessTriple w = witness_closed(disk, b, 0.05, axis);
    EXPECT_TRUE(leq(w.points[0], w.points[1]));
    EXPECT_TRUE(leq(w.points[1], w.points[2]));
    EXPECT_EQ(w.labels, (std::array<double, 3>{0, 1, 0}));
    double off = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
      if (k != axis) off += (b[k] - c[k]) * (b[k] - c[k]);
    const double half = std::sqrt(r * r - off);
    EXPECT_NEAR(w.points[0][axis], c[axis] - half - 0.05, 2e-6);
    EXPECT_NEAR(w.points[2][axis], c[axis] + half + 0.05, 2e-6);
  }
}

TEST(WitnessDisconnected, ComparablePairFindsOtherClassBetween) {
  const TaskSpec q = TaskSpec::make_disconnected_quadrants();
  const WitnessTriple w = witness_disconnected(q, Vec64{0.25, 0.25}, Vec64{0.75, 0.75});
  expect_point(w.points[0], {0.25, 0.25});
  expect_point(w.points[2], {0.75, 0.75});
  EXPECT_EQ(w.labels, (std::array<double, 3>{0, 1, 0}));
  const double eps = default_epsilon(q.domain());
  EXPECT_NEAR(w.points[1][0], 0.5, eps + 1e-9);
  EXPECT_NEAR(w.points[1][1], 0.5, eps + 1e-9);
}

TEST(WitnessDisconnected, IncomparablePairUsesThresholds) {
  const TaskSpec q = TaskSpec::make_disconnected_quadrants();
  const double eps = default_epsilon(q.domain());
  const WitnessTriple w = witness_disconnected(q, Vec64{0.25, 0.75}, Vec64{0.75, 0.25});
  // D sits on the x2 threshold, stepped below it so that it leaves G's class.
  expect_point(w.points[0], {0.25, 0.5 - eps});
  expect_point(w.points[1], {0.25, 0.75});
  expect_point(w.points[2], {0.5, 0.75});
  EXPECT_EQ(w.labels, (std::array<double, 3>{0, 1, 0}));
}

TEST(WitnessDisconnected, Errors) {
  const TaskSpec q = TaskSpec::make_disconnected_quadrants();
  EXPECT_THROW(witness_disconnected(q, Vec64{0.25, 0.25}, Vec64{0.25, 0.25}), DomainError);
  EXPECT_THROW(witness_disconnected(q, Vec64{0.25, 0.25}, Vec64{0.3, 0.3}), DomainError);
  EXPECT_THROW(witness_disconnected(q, Vec64{0.25, 0.25}, Vec64{0.25, 0.75}), DomainError);
  EXPECT_THROW(witness_disconnected(TaskSpec::make_closed_shape(Vec64{0.5, 0.5}, 0.2), Vec64{0.5, 0.5},
                                    Vec64{0.1, 0.1}),
               DomainError);
}

TEST(WitnessDisconnected, RandomParameterizations) {
  Rng rng(33);
  for (int n = 0; n < 100; ++n) {
    const std::size_t dim = 2 + rng.index(2);
    Vec64 t(dim);
    for (double& v : t) v = rng.uniform(0.2, 0.8);
    const TaskSpec q = TaskSpec::make_disconnected_quadrants(t);
    // Two distinct orthants with equal parity.
    unsigned ra = static_cast<unsigned>(rng.index(1u << dim));
    unsigned rb = ra;
    while (rb == ra || std::popcount(rb) % 2 != std::popcount(ra) % 2)
      rb = static_cast<unsigned>(rng.index(1u << dim));
    auto point_in = [&](unsigned region) {
      Vec64 p(dim);
      for (std::size_t k = 0; k < dim; ++k)
        p[k] = (region >> k) & 1u ? rng.uniform(t[k], 1.0) : rng.uniform(0.0, t[k] * 0.999);
      return p;
    };
    const Vec64 a = point_in(ra);
    const Vec64 b = point_in(rb);
    const WitnessTriple w = witness_disconnected(q, a, b);
    EXPECT_TRUE(leq(w.points[0], w.points[1])) << n;
    EXPECT_TRUE(leq(w.points[1], w.points[2])) << n;
    EXPECT_EQ(w.labels[0], w.labels[2]);
    EXPECT_NE(w.labels[0], w.labels[1]);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(w.labels[k], q.label(w.points[k]));
  }
}

TEST(CheckWitness, CertifiedNetsAlwaysContradicted) {
  Rng rng(40);
  support::NetGen g;
  g.activations = {Activation::relu(), Activation::sigmoid()};
  g.input_dim = 2;
  for (int n = 0; n < 50; ++n) {
    g.max_dense = 2 + n % 3;
    const Network net = support::random_network(support::Variant::mlp, g, rng);
    const WitnessCheck c = check_witness(net, xor_triple(), TaskSpec::make_xor_discontinuous(0.5, 0.5));
    EXPECT_EQ(c.verdict, WitnessCheck::Verdict::contradiction_demonstrated);
    EXPECT_GE(c.max_error, 0.5);
  }
  const WitnessCheck c =
      check_witness(fixtures::dnnplus_example(), xor_triple(), TaskSpec::make_xor_discontinuous(0.5, 0.5));
  EXPECT_EQ(c.verdict, WitnessCheck::Verdict::contradiction_demonstrated);
}

TEST(CheckWitness, FlippedXorNetEscapes) {
  const WitnessCheck c =
      check_witness(fixtures::xor_fig1c(), xor_triple(), TaskSpec::make_xor_discontinuous(0.5, 0.5));
  EXPECT_EQ(c.verdict, WitnessCheck::Verdict::escaped);
  EXPECT_EQ(c.max_error, 0.0);
}

TEST(CheckWitness, Errors) {
  WitnessTriple same{{Vec64{0, 0}, Vec64{0.1, 0}, Vec64{0.2, 0}}, {}, "flat"};
  const TaskSpec xor_task = TaskSpec::make_xor_discontinuous(0.5, 0.5);
  EXPECT_THROW(check_witness(fixtures::xor_fig1c(), same, xor_task), DomainError);
  EXPECT_THROW(validate_witness(WitnessTriple{{Vec64{0, 0}, Vec64{0, 0}, Vec64{0, 0}}, {0, 0, 0}, "x"}),
               DomainError);
  WitnessTriple unordered = xor_triple();
  std::swap(unordered.points[0], unordered.points[2]);
  EXPECT_THROW(check_witness(fixtures::xor_fig1c(), unordered, xor_task), DomainError);
  Network three;
  three.input_dim = 3;
  three.layers.emplace_back(DenseLayer{Mat64{{1, 1, 1}}, Vec64{0}, Activation::identity()});
  EXPECT_THROW(check_witness(three, xor_triple(), xor_task), ShapeError);
}

TEST(WitnessJson, Layout) {
  const auto j = to_json(xor_triple());
  EXPECT_EQ(j["points"].size(), 3u);
  EXPECT_EQ(j["labels"][1], 1.0);
  const auto c = to_json(check_witness(fixtures::xor_fig1c(), xor_triple(),
                                       TaskSpec::make_xor_discontinuous(0.5, 0.5)));
  EXPECT_EQ(c["verdict"], "escaped");
}

// Runs the eight acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "../support/gradcheck.hpp"
#include "../support/random_nets.hpp"
#include "signnet/signnet.hpp"

using namespace signnet;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

bool certified(const Network& net) {
  return certify_structural(net).verdict == Certificate::Verdict::certified_monotone;
}

double triple_error(const Network& net) {
  return std::max({std::abs(forward_scalar(net, Vec64{0, 0})), std::abs(forward_scalar(net, Vec64{1, 0}) - 1.0),
                   std::abs(forward_scalar(net, Vec64{1, 1}))});
}

double corner_error(const Network& net) {
  double e = 0.0;
  for (const Sample& s : xor_corners()) e = std::max(e, std::abs(forward_scalar(net, s.x) - s.target[0]));
  return e;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

constexpr double kFloor = 0.5 - 1e-9;

// Certified 2-input scalar nets shared by the boundary and upper-set checks.
std::vector<Network> certified_planar_nets(std::size_t count) {
  Rng rng(4004);
  support::NetGen g;
  g.input_dim = 2;
  std::vector<Network> nets;
  for (std::size_t i = 0; nets.size() < count; ++i) {
    g.max_dense = 2 + i % 3;
    const auto v = i % 3 == 0 ? support::Variant::mlp : i % 3 == 1 ? support::Variant::pool : support::Variant::skip;
    nets.push_back(support::random_network(v, g, rng));
  }
  return nets;
}

std::vector<double> spanning_thresholds(const Grid& grid) {
  const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
  std::vector<double> ts;
  for (int k = 1; k <= 5; ++k) ts.push_back(*lo + (*hi - *lo) * k / 6.0);
  return ts;
}

// 1. Sampled order pairs never falsify structurally certified nets.
Outcome order_preservation() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(1001);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const support::Variant v = support::variant_for(i);
    support::NetGen g;
    g.output_dim = 1 + i % 2;
    // At most four weight layers, counting the conv layer.
    g.max_dense = v == support::Variant::conv || v == support::Variant::conv_pool_skip ? 3 : 4;
    const Network net = support::random_network(v, g, rng);
    if (!certified(net)) return fail("generated net " + std::to_string(i) + " is not certified");
    const Certificate c = falsify_monotone(net, BoxDomain::cube(net.input_dim, -5, 5), 100000, rng);
    if (c.verdict == Certificate::Verdict::falsified) return fail("net " + std::to_string(i) + " falsified");
    pairs += 100000;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > 60.0) return fail(fmt("zero falsifications but took %.1f s (limit 60 s)", secs));
  return {true, fmt("100 nets, %.0f pairs, 0 falsifications, %.1f s", double(pairs), secs)};
}

// 2. The non-negative triple floor holds at every epoch; free nets solve XOR.
Outcome xor_gap() {
  Architecture plus = Architecture::parse("2-32-32-1");
  std::vector<double> min_triple(10, 1e300);
  std::vector<std::string> errors(10);
  parallel_for(10, [&](std::size_t s) {
    Rng rng(s);
    const Network init = init_random(plus, SignConstraint::nonneg(), rng);
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.epochs = 20000;
    cfg.seed = s;
    cfg.projection = SignConstraint::nonneg();
    min_triple[s] = triple_error(init);
    try {
      train(init, xor_corners(), cfg, {},
            [&](std::size_t, const Network& n) { min_triple[s] = std::min(min_triple[s], triple_error(n)); });
    } catch (const DivergenceError& e) {
      errors[s] = e.what();
    }
  });
  for (std::size_t s = 0; s < 10; ++s)
    if (!errors[s].empty()) return fail("nonneg seed " + std::to_string(s) + " diverged: " + errors[s]);
  const double floor_min = *std::min_element(min_triple.begin(), min_triple.end());
  if (floor_min < kFloor) return fail(fmt("nonneg triple error reached %.17g", floor_min));

  Architecture free_arch = Architecture::parse("2-3-1");
  free_arch.hidden = Activation::sigmoid();
  std::vector<double> final_err(10, 1e300);
  parallel_for(10, [&](std::size_t s) {
    Rng rng(100 + s);
    TrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.epochs = 20000;
    cfg.seed = s;
    try {
      final_err[s] = train(init_random(free_arch, SignConstraint::free(), rng), xor_corners(), cfg)
                         .report.final_max_error;
    } catch (const DivergenceError&) {
    }
  });
  const double best = *std::min_element(final_err.begin(), final_err.end());
  if (!(best < 0.1)) return fail(fmt("best unconstrained corner error %.3g", best));
  return {true, fmt("nonneg min triple error %.12f over 10x20k epochs; free best corner error %.2e", floor_min, best)};
}

// 3. One negative output weight solves XOR; making it positive restores the floor.
Outcome single_flip() {
  const Network net = fixtures::xor_fig1c();
  std::size_t negatives = 0;
  for (const Layer& l : net.layers)
    for (double w : weights_of(l).flat()) negatives += w < 0.0;
  if (negatives != 1) return fail("fixture has " + std::to_string(negatives) + " negative weights");
  const double solved = corner_error(net);
  if (!(solved < 0.1)) return fail(fmt("fixture corner error %.3g", solved));

  const auto [l, r, c] = fixtures::xor_fig1c_flipped_weight;
  const Network restored = project(flip_weight(net, l, r, c), SignConstraint::nonneg());
  if (!certified(restored)) return fail("restored fixture is not certified");
  double worst = triple_error(restored);
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = 5000;
  cfg.projection = SignConstraint::nonneg();
  train(restored, xor_corners(), cfg, {},
        [&](std::size_t, const Network& n) { worst = std::min(worst, triple_error(n)); });
  if (worst < kFloor) return fail(fmt("restored net reached triple error %.17g", worst));
  return {true, fmt("flipped corner error %.2g; restored min triple error %.12f over 5000 epochs", solved, worst)};
}

// 4. Certified boundaries have no positive-slope pieces; the flipped net does.
Outcome boundary_orientation(const std::vector<Network>& nets) {
  std::size_t segments = 0;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    const Grid grid = evaluate_grid(nets[i], BoxDomain::unit(2), 128);
    for (double t : spanning_thresholds(grid)) {
      const auto segs = rasterize_boundary(nets[i], grid, t);
      segments += segs.size();
      const auto rep = classify_segment_orientations(segs);
      if (rep.pos_slope_count != 0)
        return fail("net " + std::to_string(i) + fmt(" has %.0f positive-slope segments at t=%.6g",
                                                     double(rep.pos_slope_count), t));
    }
  }
  const auto flipped = classify_segment_orientations(
      rasterize_boundary(fixtures::fig1a_flipped(), BoxDomain::unit(2), 128, 0.5));
  if (flipped.pos_slope_count < 1) return fail("flipped slope fixture has no positive-slope segment");
  return {true, fmt("%.0f segments from %.0f certified nets, 0 positive; flipped fixture %.0f positive",
                    double(segments), double(nets.size()), double(flipped.pos_slope_count))};
}

bool chain_ok(const WitnessTriple& w, const TaskSpec& task) {
  for (std::size_t n = 0; n < 3; ++n)
    if (task.label(w.points[n]) != w.labels[n]) return false;
  return leq(w.points[0], w.points[1]) && leq(w.points[1], w.points[2]) && w.labels[0] == w.labels[2] &&
         w.labels[0] != w.labels[1];
}

// 5. Upper sets on the grid, valid witnesses, and forced contradictions.
Outcome upper_set_and_witnesses(const std::vector<Network>& nets) {
  for (std::size_t i = 0; i < nets.size(); ++i) {
    const Grid grid = evaluate_grid(nets[i], BoxDomain::unit(2), 128);
    for (double t : spanning_thresholds(grid))
      if (grid_upper_set_violation(grid, t)) return fail("net " + std::to_string(i) + " grid upper-set violation");
  }

  Rng rng(5005);
  std::vector<std::pair<WitnessTriple, TaskSpec>> planar;
  for (int n = 0; n < 100; ++n) {
    const std::size_t dim = 2 + n % 3;
    Vec64 a(dim), d(dim);
    for (double& v : a) v = rng.uniform(-2, 2);
    for (double& v : d) v = rng.uniform(0.2, 0.8);
    const std::size_t i = rng.index(dim);
    const std::size_t j = (i + 1 + rng.index(dim - 1)) % dim;
    a[i] = rng.uniform(0.1, 2);
    a[j] = -rng.uniform(0.1, 2);
    double b = 0.0;
    for (std::size_t k = 0; k < dim; ++k) b -= a[k] * d[k];
    const double eps = rng.uniform(0.005, 0.05);
    const WitnessTriple w = witness_orientation(a, b, d, eps, i, j);
    const TaskSpec task = TaskSpec::make_halfplane(a, b, BoxDomain::cube(dim, -50, 50));
    if (!chain_ok(w, task)) return fail("orientation witness " + std::to_string(n) + " invalid");
    if (dim == 2) planar.emplace_back(w, task);
  }
  for (int n = 0; n < 100; ++n) {
    const std::size_t dim = 2 + n % 3;
    const double r = rng.uniform(0.05, 0.3);
    Vec64 c(dim);
    for (double& v : c) v = rng.uniform(r + 0.1, 0.9 - r);
    const TaskSpec task = TaskSpec::make_closed_shape(c, r);
    Vec64 b = c;
    for (double& v : b) v += rng.uniform(-0.4, 0.4) * r / std::sqrt(double(dim));
    const WitnessTriple w = witness_closed(task, b, rng.uniform(0.01, 0.09), rng.index(dim));
    if (!chain_ok(w, task)) return fail("closed witness " + std::to_string(n) + " invalid");
    if (dim == 2) planar.emplace_back(w, task);
  }
  for (int n = 0; n < 100; ++n) {
    const std::size_t dim = 2 + n % 2;
    Vec64 t(dim);
    for (double& v : t) v = rng.uniform(0.2, 0.8);
    const TaskSpec task = TaskSpec::make_disconnected_quadrants(t);
    const unsigned ra = static_cast<unsigned>(rng.index(std::size_t{1} << dim));
    unsigned rb = ra;
    while (rb == ra || std::popcount(rb) % 2 != std::popcount(ra) % 2)
      rb = static_cast<unsigned>(rng.index(std::size_t{1} << dim));
    auto point_in = [&](unsigned region) {
      Vec64 p(dim);
      for (std::size_t k = 0; k < dim; ++k)
        p[k] = (region >> k) & 1u ? rng.uniform(t[k], 1.0) : rng.uniform(0.0, t[k] * 0.999);
      return p;
    };
    const Vec64 pa = point_in(ra);
    const Vec64 pb = point_in(rb);
    const WitnessTriple w = witness_disconnected(task, pa, pb);
    if (!chain_ok(w, task)) return fail("disconnected witness " + std::to_string(n) + " invalid");
    if (dim == 2) planar.emplace_back(w, task);
  }
  planar.emplace_back(make_witness({Vec64{0, 0}, Vec64{1, 0}, Vec64{1, 1}}, TaskSpec::make_xor_discontinuous(0.5, 0.5),
                                   "xor"),
                      TaskSpec::make_xor_discontinuous(0.5, 0.5));

  std::size_t checks = 0;
  for (std::size_t i = 0; i < nets.size(); ++i)
    for (const auto& [w, task] : planar) {
      const WitnessCheck c = check_witness(nets[i], w, task);
      if (c.verdict != WitnessCheck::Verdict::contradiction_demonstrated)
        return fail("net " + std::to_string(i) + " escaped a " + w.construction + " witness");
      ++checks;
    }
  return {true, fmt("grid upper sets hold for %.0f nets; 300 valid witnesses; %.0f contradictions", double(nets.size()),
                    double(checks))};
}

// 6. conv -> dense and skip -> mlp rewrites preserve outputs and signs.
Outcome rewrite_equivalence() {
  Rng rng(6006);
  double conv_dev = 0.0;
  for (int n = 0; n < 200; ++n) {
    ConvLayer c;
    c.in_rows = 6;
    c.in_cols = 6;
    c.kernel = Mat64(3, 3);
    const bool nonneg = n % 2 == 0;
    for (double& w : c.kernel.flat()) w = nonneg ? rng.uniform(0, 1) : rng.uniform(-1, 1);
    c.activation = support::monotone_activations()[n % 4];
    Network net;
    net.input_dim = 36;
    net.layers.emplace_back(c);
    const Network dense = lower_convolutions(net);
    if (certified(net) && !certified(dense)) return fail("conv instance " + std::to_string(n) + " lost its signs");
    Rng fuzz = rng.split(n);
    conv_dev = std::max(conv_dev, fuzz_equivalence(net, dense, BoxDomain::cube(36, -1, 1), 200, fuzz).max_deviation);
  }
  if (conv_dev > kConvRewriteTolerance) return fail(fmt("conv deviation %.3g", conv_dev));

  double skip_dev = 0.0;
  support::NetGen g;
  g.activations = {Activation::relu()};
  for (int n = 0; n < 200; ++n) {
    g.nonneg = n % 2 == 0;
    const Network net = support::random_network(n % 4 < 2 ? support::Variant::skip : support::Variant::conv_pool_skip,
                                                g, rng);
    const BoxDomain dom = BoxDomain::unit(net.input_dim);
    const Network mlp = skip_to_mlp(net, dom);
    if (!mlp.skips.empty()) return fail("skip instance " + std::to_string(n) + " still has skips");
    if (certified(net) && !certified(mlp)) return fail("skip instance " + std::to_string(n) + " lost its signs");
    Rng fuzz = rng.split(1000 + n);
    skip_dev = std::max(skip_dev, fuzz_equivalence(net, mlp, dom, 200, fuzz).max_deviation);
  }
  if (skip_dev > kSkipRewriteTolerance) return fail(fmt("skip deviation %.3g", skip_dev));
  return {true, fmt("conv max deviation %.2e (200 instances), skip max deviation %.2e (200 instances)", conv_dev,
                    skip_dev)};
}

// 7. Backprop against finite differences; projection exactness during training.
Outcome gradients_and_projection() {
  Rng rng(7007);
  double worst = 0.0;
  std::size_t params = 0;
  for (const Activation& act : {Activation::relu(), Activation::leaky_relu(0.1), Activation::sigmoid(),
                                Activation::tanh(), Activation::identity()}) {
    support::NetGen g;
    g.activations = {act};
    g.nonneg = false;
    g.max_width = 6;
    g.max_dense = 3;
    for (int n = 0; n < 10; ++n) {
      const Network net = support::random_network(support::Variant::mlp, g, rng);
      Vec64 x(net.input_dim);
      do
        for (double& v : x) v = rng.uniform(-2, 2);
      while (support::kink_margin(net, x) < 1e-3);
      const auto r = support::finite_difference_check(net, x, Vec64{rng.uniform(-1, 1)}, Loss::mse);
      worst = std::max(worst, r.worst_relative);
      params += r.parameters;
    }
  }
  if (worst > 1e-6) return fail(fmt("worst relative gradient error %.3g", worst));

  SignConstraint masked = SignConstraint::nonneg();
  masked.set(1, LayerConstraint::mask(8, 8, std::vector<int>(64, 0)));
  for (const SignConstraint& sc : {SignConstraint::nonneg(), masked}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      Architecture arch = Architecture::parse("2-8-8-1");
      arch.output = Activation::sigmoid();
      Rng init(seed);
      TrainConfig cfg;
      cfg.epochs = 2000;
      cfg.learning_rate = 0.5;
      cfg.loss = Loss::bce;
      cfg.projection = sc;
      cfg.batch_size = 32;
      cfg.seed = seed;
      bool exact = true;
      train(init_random(arch, sc, init), grid_dataset(TaskSpec::make_xor_discontinuous(0.5, 0.5), 12), cfg, {},
            [&](std::size_t, const Network& n) {
              if (!satisfies_constraint(n, sc)) exact = false;
              const Network p = project(n, sc);
              for (std::size_t k = 0; k < n.layers.size(); ++k)
                if (weights_of(p.layers[k]) != weights_of(n.layers[k])) exact = false;
            });
      if (!exact) return fail("constraint or idempotence broken during training");
    }
  }
  return {true, fmt("%.0f parameters, worst relative error %.2e; projection exact over 6 runs x 2000 epochs",
                    double(params), worst)};
}

// 8. Max pooling preserves order.
Outcome maxpool_monotone() {
  Rng rng(8008);
  const std::vector<std::vector<std::vector<std::size_t>>> configs{
      {{0, 1}},
      {{0, 1}, {2, 3}},
      {{0, 1, 2, 3}},
      {{0}, {1, 2}, {3, 4, 5}},
      {{0, 2, 4}, {1, 3, 5}},
      {{5, 1}, {3}},
      {{3, 1}, {0}, {2, 4}},
      {{0, 1, 2, 3, 4, 5, 6, 7}},
  };
  std::size_t pairs = 0;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    Network net;
    std::size_t width = 0;
    for (const auto& g : configs[c])
      for (std::size_t i : g) width = std::max(width, i + 1);
    net.input_dim = width;
    net.layers.emplace_back(PoolLayer{configs[c]});
    const BoxDomain dom = BoxDomain::cube(width, -5, 5);
    for (const OrderPair& p : sample_order_pairs(dom, 100000, rng)) {
      if (!leq(forward(net, p.x()), forward(net, p.y())))
        return fail("pool configuration " + std::to_string(c) + " violated order");
      ++pairs;
    }
  }
  return {true, fmt("%.0f configurations, %.0f pairs, 0 violations", double(configs.size()), double(pairs))};
}

}  // namespace

int main() {
  const std::vector<Network> planar = certified_planar_nets(50);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 order preservation", order_preservation},
      {"2 xor gap", xor_gap},
      {"3 single-flip repair", single_flip},
      {"4 boundary orientation", [&] { return boundary_orientation(planar); }},
      {"5 upper sets and witnesses", [&] { return upper_set_and_witnesses(planar); }},
      {"6 rewrite equivalence", rewrite_equivalence},
      {"7 gradients and projection", gradients_and_projection},
      {"8 max-pool monotonicity", maxpool_monotone},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

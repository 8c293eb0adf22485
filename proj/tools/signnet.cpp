// signnet: experiment driver for sign-constrained networks.
//
// Every run writes <out-dir>/manifest.json with the fully resolved options;
// passing it back through --json-config repeats the run.
//
// Exit codes: 0 ok/certified, 1 usage or parse error, 2 falsified or a failed
// check, 3 inconclusive.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "json_config.hpp"
#include "signnet/signnet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace signnet;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kFailed = 2, kInconclusive = 3 };

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

BoxDomain box(std::size_t dim, double lo, double hi) { return BoxDomain::cube(dim, lo, hi); }

// ---------------------------------------------------------------------------
// certify

struct CertifyOpts {
  std::string model;
  std::size_t trials = 100000;
  std::size_t grid = 64;
  double lo = 0.0, hi = 1.0;
};

int cmd_certify(const CertifyOpts& o, const Globals& g) {
  const Network net = load_network(o.model);
  const BoxDomain dom = box(net.input_dim, o.lo, o.hi);
  const Certificate structural = certify_structural(net);
  Rng rng(g.seed);
  const Certificate sampled = falsify_monotone(net, dom, o.trials, rng);

  // Exhaustive grid comparison when the grid stays small.
  std::optional<Certificate> grid;
  if (o.grid > 0 && std::pow(double(o.grid + 1), double(net.input_dim)) <= 1e6)
    grid = falsify_on_grid(net, dom, o.grid);

  Certificate verdict = structural;
  if (sampled.verdict == Certificate::Verdict::falsified)
    verdict = sampled;
  else if (grid && grid->verdict == Certificate::Verdict::falsified)
    verdict = *grid;

  json out{{"model", o.model},
           {"domain", {{"lower", o.lo}, {"upper", o.hi}}},
           {"verdict", to_string(verdict.verdict)},
           {"certificate", to_json(verdict)},
           {"structural", to_json(structural)},
           {"sampled", to_json(sampled)},
           {"trials", o.trials}};
  if (grid) out["grid"] = to_json(*grid);
  write_json(fs::path(g.out_dir) / "certificate.json", out);
  std::cout << out.dump(2) << "\n";

  switch (verdict.verdict) {
    case Certificate::Verdict::certified_monotone: return kOk;
    case Certificate::Verdict::falsified: return kFailed;
    case Certificate::Verdict::inconclusive: return kInconclusive;
  }
  return kInconclusive;
}

// ---------------------------------------------------------------------------
// xor-gap

struct XorGapOpts {
  std::string constraint = "nonneg";
  std::string arch = "2-32-32-1";
  std::string hidden = "relu";
  std::string output = "identity";
  std::size_t seeds = 10;
  std::size_t epochs = 20000;
  double lr = 0.1;
  bool flip = false;
  std::size_t flip_epochs = 5000;
};

constexpr double kXorFloor = 0.5;
constexpr double kFloorSlack = 1e-9;

double triple_error(const Network& net) {
  const double f00 = forward_scalar(net, Vec64{0.0, 0.0});
  const double f10 = forward_scalar(net, Vec64{1.0, 0.0});
  const double f11 = forward_scalar(net, Vec64{1.0, 1.0});
  return std::max({std::abs(f00), std::abs(f10 - 1.0), std::abs(f11)});
}

struct SeedRun {
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string error;
  double final_max_error = 0.0;
  double final_triple_error = 0.0;
  double min_triple_error = 0.0;
  std::optional<std::size_t> floor_broken_at;  // epochs completed when first below
  Network network;
};

json to_json(const SeedRun& r) {
  json j{{"seed", r.seed}, {"diverged", r.diverged}};
  if (r.diverged) {
    j["error"] = r.error;
    return j;
  }
  j["final_max_error"] = r.final_max_error;
  j["final_triple_error"] = r.final_triple_error;
  j["min_triple_error"] = r.min_triple_error;
  j["floor_broken_at_epoch"] = r.floor_broken_at ? json(*r.floor_broken_at) : json(nullptr);
  return j;
}

void write_loss_csv(const fs::path& path, const std::vector<double>& trace) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << "epoch,loss\n";
  char buf[64];
  for (std::size_t e = 0; e < trace.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e, trace[e]);
    out << buf;
  }
}

SignConstraint parse_constraint(const std::string& spec) {
  if (spec == "free") return SignConstraint::free();
  if (spec == "nonneg") return SignConstraint::nonneg();
  std::ifstream in(spec);
  if (!in) throw ParseError("constraint must be 'free', 'nonneg' or a JSON file; cannot open '" + spec + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("constraint file: " + std::string(e.what()));
  }
  return sign_constraint_from_json(j);
}

Architecture make_arch(const std::string& spec, const std::string& hidden, const std::string& output) {
  Architecture a = Architecture::parse(spec);
  a.hidden = parse_activation(hidden);
  a.output = parse_activation(output);
  return a;
}

int cmd_xor_gap(const XorGapOpts& o, const Globals& g) {
  if (o.seeds == 0) throw DomainError("xor-gap: --seeds must be positive");
  const Architecture arch = make_arch(o.arch, o.hidden, o.output);
  if (arch.input_dim != 2 || arch.widths.back() != 1)
    throw DomainError("xor-gap: architecture must map 2 inputs to 1 output");
  const SignConstraint constraint = parse_constraint(o.constraint);
  const bool nonneg = o.constraint == "nonneg";
  const Dataset data = xor_corners();
  const fs::path out_dir(g.out_dir);

  std::vector<SeedRun> runs(o.seeds);
  parallel_for(o.seeds, [&](std::size_t s) {
    SeedRun& run = runs[s];
    run.seed = g.seed + s;
    Rng rng(run.seed);
    Network net = init_random(arch, constraint, rng);
    TrainConfig cfg;
    cfg.learning_rate = o.lr;
    cfg.epochs = o.epochs;
    cfg.seed = run.seed;
    cfg.projection = constraint;
    run.min_triple_error = triple_error(net);
    if (run.min_triple_error < kXorFloor - kFloorSlack) run.floor_broken_at = 0;
    try {
      TrainResult res = train(net, data, cfg, {}, [&](std::size_t epoch, const Network& n) {
        const double e = triple_error(n);
        run.min_triple_error = std::min(run.min_triple_error, e);
        if (e < kXorFloor - kFloorSlack && !run.floor_broken_at) run.floor_broken_at = epoch + 1;
      });
      run.final_max_error = res.report.final_max_error;
      run.final_triple_error = triple_error(res.network);
      write_loss_csv(out_dir / ("loss_seed" + std::to_string(run.seed) + ".csv"), res.report.loss_trace);
      run.network = std::move(res.network);
    } catch (const DivergenceError& e) {
      run.diverged = true;
      run.error = e.what();
    }
  });

  json report{{"constraint", o.constraint}, {"arch", arch.to_string()}, {"epochs", o.epochs}};
  json per_seed = json::array();
  std::optional<std::size_t> best;
  bool floor_holds = true;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    per_seed.push_back(to_json(runs[s]));
    if (runs[s].diverged) continue;
    if (!best || runs[s].final_max_error < runs[*best].final_max_error) best = s;
    floor_holds = floor_holds && !runs[s].floor_broken_at;
  }
  report["seeds"] = per_seed;
  if (best) {
    report["best_seed"] = runs[*best].seed;
    report["best_max_error"] = runs[*best].final_max_error;
  }
  if (nonneg) report["floor_holds"] = floor_holds;

  if (o.flip && best) {
    // Flip the output weight of the last hidden unit most active at (1,1),
    // pin its sign negative and keep everything else under the constraint.
    Network net = runs[*best].network;
    const std::size_t last = net.depth() - 1;
    const auto* out_layer = std::get_if<DenseLayer>(&net.layers[last]);
    if (!out_layer) throw DomainError("xor-gap --flip: last layer must be dense");
    const ForwardTrace tr = forward_trace(net, Vec64{1.0, 1.0});
    const Vec64& h = tr.outputs[last];
    std::size_t unit = 0;
    for (std::size_t k = 1; k < h.size(); ++k)
      if (h[k] > h[unit]) unit = k;
    std::vector<int> signs(out_layer->weights.cols(), nonneg ? 1 : 0);
    signs[unit] = -1;
    SignConstraint flipped = constraint;
    flipped.set(last, LayerConstraint::mask(1, signs.size(), signs));
    net = project(flip_weight(net, last, 0, unit), flipped);
    TrainConfig cfg;
    cfg.learning_rate = o.lr;
    cfg.epochs = o.flip_epochs;
    cfg.seed = runs[*best].seed;
    cfg.projection = flipped;
    const TrainResult res = train(net, data, cfg);
    write_loss_csv(out_dir / "loss_flip.csv", res.report.loss_trace);
    save_network(res.network, (out_dir / "flipped_model.json").string());
    report["flip"] = {{"layer", last},
                      {"row", 0},
                      {"col", unit},
                      {"final_max_error", res.report.final_max_error},
                      {"final_triple_error", triple_error(res.network)}};
  }

  write_json(out_dir / "xor_gap.json", report);
  std::cout << report.dump(2) << "\n";
  return nonneg && !floor_holds ? kFailed : kOk;
}

// ---------------------------------------------------------------------------
// boundary

struct BoundaryOpts {
  std::string model;
  std::size_t resolution = 128;
  std::vector<double> thresholds{0.5};
  double lo = 0.0, hi = 1.0;
};

int cmd_boundary(const BoundaryOpts& o, const Globals& g) {
  const Network net = load_network(o.model);
  if (net.input_dim != 2 || net.output_dim() != 1)
    throw ShapeError("boundary: model must map 2 inputs to 1 output, got " +
                     std::to_string(net.input_dim) + " -> " + std::to_string(net.output_dim()));
  if (o.resolution < 16) throw DomainError("boundary: resolution must be at least 16");
  const fs::path out_dir(g.out_dir);
  const Grid grid = evaluate_grid(net, box(2, o.lo, o.hi), o.resolution);
  {
    std::ofstream out(out_dir / "grid.csv");
    write_grid_csv(out, grid);
  }
  json levels = json::array();
  for (std::size_t k = 0; k < o.thresholds.size(); ++k) {
    const auto segments = rasterize_boundary(net, grid, o.thresholds[k]);
    const std::string file = "segments_" + std::to_string(k) + ".csv";
    std::ofstream out(out_dir / file);
    write_segments_csv(out, segments);
    json entry = to_json(classify_segment_orientations(segments));
    entry["threshold"] = o.thresholds[k];
    entry["segments"] = segments.size();
    entry["file"] = file;
    levels.push_back(entry);
  }
  const json report{{"model", o.model}, {"resolution", o.resolution}, {"levels", levels}};
  write_json(out_dir / "orientation.json", report);
  std::cout << report.dump(2) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// witness

struct WitnessOpts {
  std::string corollary;
  std::string model;
  std::string arch = "8-8";  // hidden widths of the random non-negative net
  std::vector<double> normal{1.0, -1.0};
  double offset = 0.0;
  std::vector<double> point;
  std::optional<double> eps;
  std::optional<std::size_t> i, j;
  std::vector<double> center{0.5, 0.5};
  double radius = 0.25;
  std::size_t axis = 0;
  std::vector<double> thresholds{0.5, 0.5};
  std::vector<double> a{0.25, 0.25};
  std::vector<double> b{0.75, 0.75};
};

int cmd_witness(const WitnessOpts& o, const Globals& g) {
  std::optional<TaskSpec> task;
  WitnessTriple w;
  if (o.corollary == "orientation") {
    task = TaskSpec::make_halfplane(Vec64(o.normal), o.offset);
    const Vec64 normal(o.normal);
    std::size_t i = 0, j = 0;
    if (o.i && o.j) {
      i = *o.i;
      j = *o.j;
    } else if (auto p = mixed_sign_pair(normal)) {
      std::tie(i, j) = *p;
    } else {
      throw DomainError("witness orientation: normal has no pair of opposite-sign entries");
    }
    if (o.point.empty()) throw DomainError("witness orientation: --point (on the hyperplane) is required");
    w = witness_orientation(normal, o.offset, Vec64(o.point), o.eps.value_or(0.05), i, j);
  } else if (o.corollary == "closed") {
    task = TaskSpec::make_closed_shape(Vec64(o.center), o.radius);
    const Vec64 b = o.point.empty() ? Vec64(o.center) : Vec64(o.point);
    w = witness_closed(*task, b, o.eps.value_or(default_epsilon(task->domain())), o.axis);
  } else {
    task = TaskSpec::make_disconnected_quadrants(Vec64(o.thresholds));
    w = witness_disconnected(*task, Vec64(o.a), Vec64(o.b), o.eps);
  }

  Network net;
  std::string source;
  if (!o.model.empty()) {
    net = load_network(o.model);
    source = o.model;
  } else {
    Architecture arch = Architecture::parse(std::to_string(task->dim()) + "-" + o.arch + "-1");
    arch.output = Activation::sigmoid();
    Rng rng(g.seed);
    net = init_random(arch, SignConstraint::nonneg(), rng);
    source = "random non-negative " + arch.to_string();
    save_network(net, (fs::path(g.out_dir) / "witness_model.json").string());
  }
  const Certificate cert = certify_structural(net);
  const WitnessCheck check = check_witness(net, w, *task);
  const json report{{"corollary", o.corollary},
                    {"task", to_json(*task)},
                    {"witness", to_json(w)},
                    {"model", source},
                    {"structural", to_string(cert.verdict)},
                    {"check", to_json(check)}};
  write_json(fs::path(g.out_dir) / "witness.json", report);
  std::cout << report.dump(2) << "\n";
  return check.verdict == WitnessCheck::Verdict::contradiction_demonstrated ? kOk : kFailed;
}

// ---------------------------------------------------------------------------
// rewrite

struct RewriteOpts {
  std::string pass;
  std::string in;
  std::string out;
  std::size_t fuzz = 200;
  double lo = 0.0, hi = 1.0;
};

int cmd_rewrite(const RewriteOpts& o, const Globals& g) {
  const Network net = load_network(o.in);
  Rng rng(g.seed);
  const RewriteOutcome res = run_rewrite_pass(o.pass, net, box(net.input_dim, o.lo, o.hi), o.fuzz, rng);
  save_network(res.network, o.out);
  json report = to_json(res.report);
  report["structural_before"] = to_string(certify_structural(net).verdict);
  report["structural_after"] = to_string(certify_structural(res.network).verdict);
  write_json(fs::path(g.out_dir) / "rewrite_report.json", report);
  std::cout << report.dump(2) << "\n";
  const bool signs_kept = report["structural_before"] != "certified_monotone" ||
                          report["structural_after"] == "certified_monotone";
  return res.report.passed() && signs_kept ? kOk : kFailed;
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  std::string model;
  std::string arch = "2-8-8-1";
  std::string hidden = "relu";
  std::string output = "auto";
  std::string task = "xor_continuous";
  std::vector<double> thresholds{0.5, 0.5};
  std::vector<double> center{0.5, 0.5};
  double radius = 0.25;
  std::vector<double> normal{1.0, 1.0};
  double offset = -1.0;
  std::size_t resolution = 16;
  std::string constraint = "free";
  double lr = 0.1;
  std::size_t epochs = 1000;
  std::size_t batch = 0;
  std::string loss = "auto";
};

TaskSpec build_task(const TrainOpts& o) {
  json j{{"kind", o.task}};
  j["thresholds"] = o.thresholds;
  j["center"] = o.center;
  j["radius"] = o.radius;
  j["normal"] = o.normal;
  j["offset"] = o.offset;
  return task_from_json(j);
}

int cmd_train(const TrainOpts& o, const Globals& g) {
  const TaskSpec task = build_task(o);
  const bool regression = !task.is_classification();
  const SignConstraint constraint = parse_constraint(o.constraint);

  Network net;
  if (!o.model.empty()) {
    net = load_network(o.model);
  } else {
    const std::string out_act = o.output == "auto" ? (regression ? "identity" : "sigmoid") : o.output;
    Rng rng(g.seed);
    net = init_random(make_arch(o.arch, o.hidden, out_act), constraint, rng);
  }
  if (net.input_dim != task.dim() || net.output_dim() != 1)
    throw ShapeError("train: model must map " + std::to_string(task.dim()) + " inputs to 1 output");
  const bool projected_initial = !satisfies_constraint(net, constraint);
  if (projected_initial) project_in_place(net, constraint);

  const Dataset data = regression ? xor_corners() : grid_dataset(task, o.resolution);
  TrainConfig cfg;
  cfg.learning_rate = o.lr;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch;
  cfg.loss = o.loss == "auto" ? (regression ? Loss::mse : Loss::bce) : parse_loss(o.loss);
  cfg.seed = g.seed;
  cfg.projection = constraint;
  const TrainResult res = train(net, data, cfg);

  const fs::path out_dir(g.out_dir);
  save_network(res.network, (out_dir / "model.json").string());
  write_loss_csv(out_dir / "loss.csv", res.report.loss_trace);
  json report = to_json(res.report);
  report.erase("loss_trace");
  report["task"] = to_json(task);
  report["loss"] = to_string(cfg.loss);
  report["constraint"] = to_json(constraint);
  report["projected_initial_model"] = projected_initial;
  report["satisfies_constraint"] = satisfies_constraint(res.network, constraint);
  report["structural"] = to_string(certify_structural(res.network).verdict);
  write_json(out_dir / "report.json", report);
  std::cout << report.dump(2) << "\n";
  return kOk;
}

std::vector<std::string> activation_names() { return {"relu", "leaky_relu", "sigmoid", "tanh", "identity"}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments with sign-constrained feed-forward networks"};
  app.config_formatter(std::make_shared<signnet::cli::JsonConfig>());
  app.set_config("--json-config", "", "Read options from a JSON file (same layout as manifest.json)");
  app.require_subcommand(1, 0);

  Globals g;
  app.add_option("--seed", g.seed, "Base RNG seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for all output files")->capture_default_str();

  const auto acts = activation_names();

  CertifyOpts certify;
  auto* c = app.add_subcommand("certify", "Structural and sampled monotonicity check of a model");
  c->add_option("--model", certify.model, "Model JSON")->required();
  c->add_option("--trials", certify.trials, "Random order pairs to test")->capture_default_str();
  c->add_option("--grid", certify.grid, "Grid resolution for the exhaustive neighbour check (0 = off)")
      ->capture_default_str();
  c->add_option("--lo", certify.lo, "Domain lower bound (every axis)")->capture_default_str();
  c->add_option("--hi", certify.hi, "Domain upper bound (every axis)")->capture_default_str();

  XorGapOpts xg;
  auto* x = app.add_subcommand("xor-gap", "Train on XOR corners and track the three-point error");
  x->add_option("--constraint", xg.constraint, "free, nonneg or a constraint JSON file")->capture_default_str();
  x->add_option("--arch", xg.arch, "Layer widths, e.g. 2-32-32-1")->capture_default_str();
  x->add_option("--hidden", xg.hidden, "Hidden activation")->check(CLI::IsMember(acts))->capture_default_str();
  x->add_option("--output", xg.output, "Output activation")->check(CLI::IsMember(acts))->capture_default_str();
  x->add_option("--seeds", xg.seeds, "Number of seeds (base seed + k)")->capture_default_str();
  x->add_option("--epochs", xg.epochs)->capture_default_str();
  x->add_option("--lr", xg.lr, "Learning rate")->capture_default_str();
  x->add_flag("--flip", xg.flip, "Flip one output weight of the best net and retrain");
  x->add_option("--flip-epochs", xg.flip_epochs)->capture_default_str();

  BoundaryOpts bd;
  auto* b = app.add_subcommand("boundary", "Rasterize level sets of a 2-input model");
  b->add_option("--model", bd.model, "Model JSON")->required();
  b->add_option("--resolution", bd.resolution, "Grid cells per side (>= 16)")->capture_default_str();
  b->add_option("--thresholds", bd.thresholds, "Level values")->delimiter(',')->capture_default_str();
  b->add_option("--lo", bd.lo)->capture_default_str();
  b->add_option("--hi", bd.hi)->capture_default_str();

  WitnessOpts wo;
  auto* w = app.add_subcommand("witness", "Build a witness triple and evaluate a monotone model on it");
  w->add_option("--corollary", wo.corollary)
      ->required()
      ->check(CLI::IsMember({"orientation", "closed", "disconnected"}));
  w->add_option("--model", wo.model, "Model JSON (default: random non-negative net)");
  w->add_option("--hidden-widths", wo.arch, "Hidden widths of the random net")->capture_default_str();
  w->add_option("--normal", wo.normal, "orientation: hyperplane normal a")->delimiter(',')->capture_default_str();
  w->add_option("--offset", wo.offset, "orientation: hyperplane offset b")->capture_default_str();
  w->add_option("--point", wo.point, "orientation: point d on the hyperplane; closed: point B in the region")
      ->delimiter(',');
  w->add_option("--eps", wo.eps, "Step size");
  w->add_option("--i", wo.i, "orientation: first axis (0-based)");
  w->add_option("--j", wo.j, "orientation: second axis (0-based)");
  w->add_option("--center", wo.center, "closed: disk center")->delimiter(',')->capture_default_str();
  w->add_option("--radius", wo.radius, "closed: disk radius")->capture_default_str();
  w->add_option("--axis", wo.axis, "closed: search axis")->capture_default_str();
  w->add_option("--thresholds", wo.thresholds, "disconnected: orthant thresholds")
      ->delimiter(',')
      ->capture_default_str();
  w->add_option("--a", wo.a, "disconnected: point A")->delimiter(',')->capture_default_str();
  w->add_option("--b", wo.b, "disconnected: point B")->delimiter(',')->capture_default_str();

  RewriteOpts rw;
  auto* r = app.add_subcommand("rewrite", "Lower conv layers or skip links into plain dense layers");
  r->add_option("--pass", rw.pass)->required()->check(CLI::IsMember({"conv2dense", "skip2mlp"}));
  r->add_option("--in", rw.in, "Input model JSON")->required();
  r->add_option("--out", rw.out, "Output model JSON")->required();
  r->add_option("--fuzz", rw.fuzz, "Random inputs for the equivalence check")->capture_default_str();
  r->add_option("--lo", rw.lo)->capture_default_str();
  r->add_option("--hi", rw.hi)->capture_default_str();

  TrainOpts to;
  auto* t = app.add_subcommand("train", "Projected gradient descent on a task");
  t->add_option("--model", to.model, "Initial model JSON (otherwise a random --arch net)");
  t->add_option("--arch", to.arch)->capture_default_str();
  t->add_option("--hidden", to.hidden)->check(CLI::IsMember(acts))->capture_default_str();
  std::vector<std::string> out_acts = acts;
  out_acts.push_back("auto");
  t->add_option("--output", to.output)->check(CLI::IsMember(out_acts))->capture_default_str();
  t->add_option("--task", to.task)
      ->check(CLI::IsMember(
          {"xor_continuous", "xor_discontinuous", "closed_shape", "disconnected_quadrants", "halfplane"}))
      ->capture_default_str();
  t->add_option("--thresholds", to.thresholds)->delimiter(',')->capture_default_str();
  t->add_option("--center", to.center)->delimiter(',')->capture_default_str();
  t->add_option("--radius", to.radius)->capture_default_str();
  t->add_option("--normal", to.normal)->delimiter(',')->capture_default_str();
  t->add_option("--offset", to.offset)->capture_default_str();
  t->add_option("--resolution", to.resolution, "Grid cells per side for region datasets")->capture_default_str();
  t->add_option("--constraint", to.constraint, "free, nonneg or a constraint JSON file")->capture_default_str();
  t->add_option("--lr", to.lr)->capture_default_str();
  t->add_option("--epochs", to.epochs)->capture_default_str();
  t->add_option("--batch", to.batch, "Minibatch size (0 = full batch)")->capture_default_str();
  t->add_option("--loss", to.loss)->check(CLI::IsMember({"auto", "mse", "bce"}))->capture_default_str();

  for (CLI::App* sub : {c, x, b, w, r, t}) sub->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  try {
    fs::create_directories(g.out_dir);
    write_json(fs::path(g.out_dir) / "manifest.json", signnet::cli::config_json(&app, true, true));
    const std::string name = chosen->get_name();
    if (name == "certify") return cmd_certify(certify, g);
    if (name == "xor-gap") return cmd_xor_gap(xg, g);
    if (name == "boundary") return cmd_boundary(bd, g);
    if (name == "witness") return cmd_witness(wo, g);
    if (name == "rewrite") return cmd_rewrite(rw, g);
    return cmd_train(to, g);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
}

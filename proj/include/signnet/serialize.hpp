#pragma once

// JSON model format:
//
//   { "input_dim": 2,
//     "final_activation": true,                      (optional, default true)
//     "layers": [
//       {"kind":"dense","weights":[[...],...],"bias":[...],"activation":"relu"},
//       {"kind":"conv2d","kernel":[[...],...],"in_shape":[M,N],"activation":"relu"},
//       {"kind":"maxpool","groups":[[0,1],[2,3]]} ],
//     "skips": [{"from":0,"to":2}] }
//
// Matrices are nested row-major arrays; conv inputs/outputs are flattened
// row-major. "leaky_relu" layers may carry an "alpha" field.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "signnet/network.hpp"

namespace signnet {

using json = nlohmann::json;

namespace detail {

inline json matrix_to_json(const Mat64& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(json(std::vector<double>(row.begin(), row.end())));
  }
  return rows;
}

inline Mat64 matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  std::vector<double> flat;
  flat.reserve(rows * cols);
  for (const json& row : j) {
    if (!row.is_array() || row.size() != cols || cols == 0)
      throw ParseError(std::string(what) + " rows must be equal-length non-empty arrays");
    for (const json& v : row) {
      if (!v.is_number()) throw ParseError(std::string(what) + " entries must be numbers");
      flat.push_back(v.get<double>());
    }
  }
  if (!all_finite(flat)) throw ParseError(std::string(what) + " contains non-finite values");
  return Mat64(rows, cols, std::move(flat));
}

inline void activation_to_json(json& j, const Activation& a) {
  j["activation"] = std::string(to_string(a.kind));
  if (a.kind == Activation::Kind::leaky_relu) j["alpha"] = a.alpha;
}

inline Activation activation_from_json(const json& j) {
  const std::string name = j.value("activation", std::string("relu"));
  return parse_activation(name, j.value("alpha", 0.01));
}

}  // namespace detail

inline json to_json(const Network& net) {
  json j;
  j["input_dim"] = net.input_dim;
  j["final_activation"] = net.final_activation;
  json layers = json::array();
  for (const Layer& layer : net.layers) {
    json l;
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      l["kind"] = "dense";
      l["weights"] = detail::matrix_to_json(d->weights);
      l["bias"] = d->bias.values();
      detail::activation_to_json(l, d->activation);
    } else if (const auto* c = std::get_if<ConvLayer>(&layer)) {
      l["kind"] = "conv2d";
      l["kernel"] = detail::matrix_to_json(c->kernel);
      l["in_shape"] = {c->in_rows, c->in_cols};
      detail::activation_to_json(l, c->activation);
    } else {
      l["kind"] = "maxpool";
      l["groups"] = std::get<PoolLayer>(layer).groups;
    }
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  json skips = json::array();
  for (const SkipLink& s : net.skips) skips.push_back({{"from", s.from}, {"to", s.to}});
  j["skips"] = std::move(skips);
  return j;
}

/// Parses and validates a model. All failures surface as ParseError.
inline Network network_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ParseError("model must be a JSON object");
    Network net;
    const json& dim = j.at("input_dim");
    if (!dim.is_number_unsigned()) throw ParseError("input_dim must be a positive integer");
    net.input_dim = dim.get<std::size_t>();
    net.final_activation = j.value("final_activation", true);
    const json& layers = j.at("layers");
    if (!layers.is_array()) throw ParseError("layers must be an array");
    for (const json& l : layers) {
      const std::string kind = l.at("kind").get<std::string>();
      if (kind == "dense") {
        DenseLayer d{detail::matrix_from_json(l.at("weights"), "dense weights"),
                     Vec64(l.at("bias").get<std::vector<double>>()),
                     detail::activation_from_json(l)};
        if (!all_finite(d.bias.span())) throw ParseError("dense bias contains non-finite values");
        net.layers.emplace_back(std::move(d));
      } else if (kind == "conv2d") {
        const auto shape = l.at("in_shape").get<std::vector<std::size_t>>();
        if (shape.size() != 2) throw ParseError("conv2d in_shape must be [rows, cols]");
        net.layers.emplace_back(ConvLayer{detail::matrix_from_json(l.at("kernel"), "conv kernel"),
                                          shape[0], shape[1], detail::activation_from_json(l)});
      } else if (kind == "maxpool") {
        net.layers.emplace_back(
            PoolLayer{l.at("groups").get<std::vector<std::vector<std::size_t>>>()});
      } else {
        throw ParseError("unknown layer kind '" + kind + "'");
      }
    }
    if (j.contains("skips"))
      for (const json& s : j.at("skips"))
        net.skips.push_back({s.at("from").get<std::size_t>(), s.at("to").get<std::size_t>()});
    validate(net);
    return net;
  } catch (const ParseError&) {
    throw;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  } catch (const Error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

inline std::string serialize(const Network& net) { return to_json(net).dump(2); }

inline Network deserialize(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  return network_from_json(j);
}

inline Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

inline void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write model file '" + path + "'");
  out << serialize(net) << '\n';
}

// Sign constraints: "free" | "nonneg" |
//   {"fallback": "nonneg", "layers": {"1": {"mask": [[1,-1,0]]}, "0": "free"}}

inline json to_json(const SignConstraint& c) {
  auto mode_name = [](LayerConstraint::Mode m) {
    return m == LayerConstraint::Mode::nonneg ? "nonneg" : "free";
  };
  if (c.per_layer.empty()) return mode_name(c.fallback);
  json j;
  j["fallback"] = mode_name(c.fallback);
  json layers = json::object();
  for (const auto& [idx, lc] : c.per_layer) {
    if (lc.mode == LayerConstraint::Mode::mask) {
      json rows = json::array();
      for (std::size_t r = 0; r < lc.rows; ++r)
        rows.push_back(std::vector<int>(lc.signs.begin() + static_cast<long>(r * lc.cols),
                                        lc.signs.begin() + static_cast<long>((r + 1) * lc.cols)));
      layers[std::to_string(idx)] = {{"mask", rows}};
    } else {
      layers[std::to_string(idx)] = mode_name(lc.mode);
    }
  }
  j["layers"] = std::move(layers);
  return j;
}

inline SignConstraint sign_constraint_from_json(const json& j) {
  auto parse_mode = [](const json& v) {
    const std::string s = v.get<std::string>();
    if (s == "free") return LayerConstraint::Mode::free;
    if (s == "nonneg") return LayerConstraint::Mode::nonneg;
    throw ParseError("unknown constraint mode '" + s + "'");
  };
  try {
    SignConstraint c;
    if (j.is_string()) {
      c.fallback = parse_mode(j);
      return c;
    }
    c.fallback = parse_mode(j.value("fallback", json("free")));
    if (j.contains("layers"))
      for (const auto& [key, v] : j.at("layers").items()) {
        const std::size_t idx = std::stoul(key);
        if (v.is_string()) {
          c.set(idx, LayerConstraint{parse_mode(v), 0, 0, {}});
        } else {
          const auto rows = v.at("mask").get<std::vector<std::vector<int>>>();
          if (rows.empty()) throw ParseError("empty sign mask");
          std::vector<int> flat;
          for (const auto& r : rows) {
            if (r.size() != rows.front().size()) throw ParseError("ragged sign mask");
            flat.insert(flat.end(), r.begin(), r.end());
          }
          c.set(idx, LayerConstraint::mask(rows.size(), rows.front().size(), std::move(flat)));
        }
      }
    return c;
  } catch (const ParseError&) {
    throw;
  } catch (const json::exception& e) {
    throw ParseError(std::string("constraint: ") + e.what());
  } catch (const Error& e) {
    throw ParseError(std::string("constraint: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ParseError(std::string("constraint: ") + e.what());
  }
}

}  // namespace signnet

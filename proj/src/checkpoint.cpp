// Copyright 2026 The HenonNets Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "henon/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <utility>
#include <vector>

namespace henon {

using nlohmann::json;

namespace {

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

double finite_number(const json& j, const char* field) {
  if (!j.is_number()) throw FormatError(std::string("field '") + field + "' must hold numbers");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw FormatError(std::string("field '") + field + "' is not finite");
  return x;
}

Vec vec_from_json(const json& j, const char* field) {
  if (!j.is_array()) throw FormatError(std::string("field '") + field + "' must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = finite_number(j[i], field);
  return v;
}

const json& require(const json& j, const char* field) {
  if (!j.is_object() || !j.contains(field)) {
    throw FormatError(std::string("missing field '") + field + "'");
  }
  return j.at(field);
}

int positive_int(const json& j, const char* field) {
  const json& v = require(j, field);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw FormatError(std::string("field '") + field + "' must be a positive integer");
  }
  return v.get<int>();
}

}  // namespace

json potential_to_json(const PotentialNet& net) {
  json K = json::array();
  for (int r = 0; r < net.width(); ++r) {
    json row = json::array();
    for (int c = 0; c < net.input_dim(); ++c) row.push_back(net.K()(r, c));
    K.push_back(std::move(row));
  }
  return {{"input_dim", net.input_dim()}, {"width", net.width()},
          {"activation", to_string(net.activation())}, {"K", std::move(K)},
          {"b", vec_to_json(net.b())}, {"a", vec_to_json(net.a())}};
}

PotentialNet potential_from_json(const json& j) {
  const int n = positive_int(j, "input_dim");
  const int m = positive_int(j, "width");
  const json& act = require(j, "activation");
  if (!act.is_string()) throw FormatError("field 'activation' must be a string");
  Activation activation;
  try {
    activation = activation_from_string(act.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  const json& jk = require(j, "K");
  if (!jk.is_array() || jk.size() != static_cast<std::size_t>(m)) {
    throw FormatError("field 'K' must have 'width' rows");
  }
  Mat K(m, n);
  for (int r = 0; r < m; ++r) {
    const Vec row = vec_from_json(jk[static_cast<std::size_t>(r)], "K");
    if (row.size() != n) throw FormatError("field 'K' rows must have 'input_dim' entries");
    K.row(r) = row.transpose();
  }
  Vec b = vec_from_json(require(j, "b"), "b");
  Vec a = vec_from_json(require(j, "a"), "a");
  if (b.size() != m || a.size() != m) throw FormatError("fields 'b' and 'a' must have 'width' entries");
  return PotentialNet(std::move(K), std::move(b), std::move(a), activation);
}

json architecture_to_json(const HenonArchitecture& net) {
  json layers = json::array();
  for (const auto& layer : net.layers()) {
    json block = potential_to_json(layer.potential);
    block["eta_p"] = vec_to_json(layer.eta_p);
    block["eta_q"] = vec_to_json(layer.eta_q);
    layers.push_back(std::move(block));
  }
  return {{"format", "henon-checkpoint"},
          {"version", 1},
          {"variant", to_string(net.variant())},
          {"d", net.d()},
          {"layers", std::move(layers)}};
}

HenonArchitecture architecture_from_json(const json& j) {
  const json& jv = require(j, "variant");
  if (!jv.is_string()) throw FormatError("field 'variant' must be a string");
  Variant variant;
  try {
    variant = variant_from_string(jv.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  const int d = positive_int(j, "d");
  const json& jl = require(j, "layers");
  if (!jl.is_array() || jl.empty()) throw FormatError("field 'layers' must be a non-empty array");
  std::vector<HenonLayerParams> layers;
  for (const auto& block : jl) {
    layers.push_back({potential_from_json(block), vec_from_json(require(block, "eta_p"), "eta_p"),
                      vec_from_json(require(block, "eta_q"), "eta_q")});
  }
  try {
    return HenonArchitecture(variant, d, std::move(layers));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("inconsistent checkpoint: ") + e.what());
  }
}

json adam_to_json(const AdamState& state) {
  return {{"learning_rate", state.learning_rate},
          {"beta1", state.beta1},
          {"beta2", state.beta2},
          {"epsilon", state.epsilon},
          {"step_count", state.step_count},
          {"first_moment", vec_to_json(state.first_moment)},
          {"second_moment", vec_to_json(state.second_moment)}};
}

AdamState adam_from_json(const json& j) {
  AdamState s;
  s.learning_rate = finite_number(require(j, "learning_rate"), "learning_rate");
  s.beta1 = finite_number(require(j, "beta1"), "beta1");
  s.beta2 = finite_number(require(j, "beta2"), "beta2");
  s.epsilon = finite_number(require(j, "epsilon"), "epsilon");
  const json& sc = require(j, "step_count");
  if (!sc.is_number_integer() || sc.get<long long>() < 0) {
    throw FormatError("field 'step_count' must be a non-negative integer");
  }
  s.step_count = sc.get<std::int64_t>();
  s.first_moment = vec_from_json(require(j, "first_moment"), "first_moment");
  s.second_moment = vec_from_json(require(j, "second_moment"), "second_moment");
  if (s.first_moment.size() != s.second_moment.size()) {
    throw FormatError("optimizer moments differ in length");
  }
  return s;
}

void save_checkpoint(const std::filesystem::path& path, const HenonArchitecture& net,
                     const std::optional<AdamState>& optimizer) {
  json j = architecture_to_json(net);
  if (optimizer) j["optimizer"] = adam_to_json(*optimizer);
  write_json_file(path, j);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  Checkpoint ck{architecture_from_json(j), std::nullopt};
  if (j.contains("optimizer")) {
    ck.optimizer = adam_from_json(j.at("optimizer"));
    const auto n = static_cast<Eigen::Index>(parameter_count(ck.net));
    if (ck.optimizer->step_count > 0 && ck.optimizer->first_moment.size() != n) {
      throw FormatError("optimizer state does not match the network's parameter count");
    }
  }
  return ck;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace henon

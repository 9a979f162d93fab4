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

#include "henon/config.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "henon/checkpoint.hpp"

namespace henon {

using nlohmann::json;

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (experiment != "pendulum" && experiment != "linear" && experiment != "forced_oscillator") {
    fail("experiment: unknown tag '" + experiment + "'");
  }
  if (sampling.oracle.tag != experiment) {
    fail("sampling.oracle.tag: '" + sampling.oracle.tag + "' does not match experiment '" +
         experiment + "'");
  }
  try {
    sampling.validate();
  } catch (const std::invalid_argument& e) {
    fail(std::string("sampling: ") + e.what());
  }
  if (architecture.layers < 1) fail("architecture.layers: must be >= 1");
  if (architecture.width < 1) fail("architecture.width: must be >= 1");
  if (architecture.variant == Variant::NAT && !sampling.t_range) {
    fail("architecture.variant: NAT needs a non-autonomous system");
  }
  if (optimizer.epochs < 0) fail("optimizer.epochs: must be >= 0");
  if (!(optimizer.learning_rate > 0.0)) fail("optimizer.learning_rate: must be > 0");
  if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0)) fail("optimizer.beta1: must be in [0, 1)");
  if (!(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) fail("optimizer.beta2: must be in [0, 1)");
  if (!(optimizer.epsilon > 0.0)) fail("optimizer.epsilon: must be > 0");
  if (test.x0.size() != static_cast<std::size_t>(2 * sampling.d())) {
    fail("test_trajectory.x0: must have 2d entries");
  }
  if (test.k < 1) fail("test_trajectory.k: must be >= 1");
  if (!std::isfinite(test.h)) fail("test_trajectory.h: must be finite");
  if (checkpoint_every < 0) fail("checkpoint_every: must be >= 0");
}

json config_to_json(const ExperimentConfig& cfg) {
  return {{"schema_version", ExperimentConfig::kSchemaVersion},
          {"name", cfg.name},
          {"experiment", cfg.experiment},
          {"architecture",
           {{"variant", to_string(cfg.architecture.variant)},
            {"layers", cfg.architecture.layers},
            {"width", cfg.architecture.width},
            {"activation", to_string(cfg.architecture.activation)}}},
          {"sampling", sample_spec_to_json(cfg.sampling)},
          {"test_trajectory",
           {{"x0", cfg.test.x0},
            {"h", cfg.test.h},
            {"k", cfg.test.k},
            {"t0", cfg.test.t0 ? json(*cfg.test.t0) : json(nullptr)}}},
          {"optimizer",
           {{"learning_rate", cfg.optimizer.learning_rate},
            {"epochs", cfg.optimizer.epochs},
            {"beta1", cfg.optimizer.beta1},
            {"beta2", cfg.optimizer.beta2},
            {"epsilon", cfg.optimizer.epsilon}}},
          {"init_seed", cfg.init_seed},
          {"checkpoint_every", cfg.checkpoint_every},
          {"output_dir", cfg.output_dir.generic_string()}};
}

namespace {

const json& field(const json& j, const std::string& path, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(path + key + ": missing");
  return j.at(key);
}

int get_int(const json& j, const std::string& path, const char* key) {
  const json& v = field(j, path, key);
  if (!v.is_number_integer()) throw ConfigError(path + key + ": must be an integer");
  return v.get<int>();
}

double get_number(const json& j, const std::string& path, const char* key) {
  const json& v = field(j, path, key);
  if (!v.is_number()) throw ConfigError(path + key + ": must be a number");
  return v.get<double>();
}

std::string get_string(const json& j, const std::string& path, const char* key) {
  const json& v = field(j, path, key);
  if (!v.is_string()) throw ConfigError(path + key + ": must be a string");
  return v.get<std::string>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: must be a JSON object");
  const int version = get_int(j, "", "schema_version");
  if (version != ExperimentConfig::kSchemaVersion) {
    throw ConfigError("schema_version: unsupported version " + std::to_string(version));
  }
  ExperimentConfig cfg;
  cfg.name = get_string(j, "", "name");
  cfg.experiment = get_string(j, "", "experiment");

  const json& arch = field(j, "", "architecture");
  try {
    cfg.architecture.variant = variant_from_string(get_string(arch, "architecture.", "variant"));
    if (arch.contains("activation")) {
      cfg.architecture.activation =
          activation_from_string(get_string(arch, "architecture.", "activation"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("architecture: ") + e.what());
  }
  cfg.architecture.layers = get_int(arch, "architecture.", "layers");
  cfg.architecture.width = get_int(arch, "architecture.", "width");

  try {
    cfg.sampling = sample_spec_from_json(field(j, "", "sampling"));
  } catch (const ConfigError&) {
    throw;
  } catch (const FormatError& e) {
    throw ConfigError(std::string("sampling: ") + e.what());
  }

  const json& test = field(j, "", "test_trajectory");
  const json& x0 = field(test, "test_trajectory.", "x0");
  if (!x0.is_array()) throw ConfigError("test_trajectory.x0: must be an array");
  cfg.test.x0.clear();
  for (const auto& v : x0) {
    if (!v.is_number()) throw ConfigError("test_trajectory.x0: must hold numbers");
    cfg.test.x0.push_back(v.get<double>());
  }
  cfg.test.h = get_number(test, "test_trajectory.", "h");
  cfg.test.k = get_int(test, "test_trajectory.", "k");
  if (test.contains("t0") && !test.at("t0").is_null()) {
    cfg.test.t0 = get_number(test, "test_trajectory.", "t0");
  }

  const json& opt = field(j, "", "optimizer");
  cfg.optimizer.learning_rate = get_number(opt, "optimizer.", "learning_rate");
  cfg.optimizer.epochs = get_int(opt, "optimizer.", "epochs");
  if (opt.contains("beta1")) cfg.optimizer.beta1 = get_number(opt, "optimizer.", "beta1");
  if (opt.contains("beta2")) cfg.optimizer.beta2 = get_number(opt, "optimizer.", "beta2");
  if (opt.contains("epsilon")) cfg.optimizer.epsilon = get_number(opt, "optimizer.", "epsilon");

  const json& seed = field(j, "", "init_seed");
  if (!seed.is_number_unsigned()) throw ConfigError("init_seed: must be a non-negative integer");
  cfg.init_seed = seed.get<std::uint64_t>();
  if (j.contains("checkpoint_every")) cfg.checkpoint_every = get_int(j, "", "checkpoint_every");
  cfg.output_dir = get_string(j, "", "output_dir");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = read_json_file(path);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("output_dir");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> preset_names() {
  return {"pendulum", "pendulum_desk", "linear",     "linear_desk",
          "forced_T", "forced_T_desk", "forced_NAT", "forced_NAT_desk"};
}

ExperimentConfig preset(const std::string& name) {
  const bool desk = name.size() > 5 && name.substr(name.size() - 5) == "_desk";
  const std::string base = desk ? name.substr(0, name.size() - 5) : name;

  ExperimentConfig cfg;
  cfg.name = name;
  cfg.init_seed = 1;
  cfg.optimizer.learning_rate = 1e-3;
  cfg.output_dir = "runs/" + name;

  if (base == "pendulum" || base == "linear") {
    const double sqrt2 = std::numbers::sqrt2;
    const double half_pi = std::numbers::pi / 2.0;
    cfg.experiment = base;
    cfg.architecture = {Variant::T, 5, 30, Activation::Tanh};
    cfg.sampling.n_samples = 40;
    cfg.sampling.phase_box = {{-sqrt2, sqrt2}, {-half_pi, half_pi}};
    cfg.sampling.h_range = {0.2, 0.5};
    cfg.sampling.seed = 1;
    cfg.sampling.oracle.tag = base;
    if (base == "pendulum") {
      cfg.sampling.oracle.params = {{"substeps", 10}};
    } else {
      cfg.sampling.oracle.params = {{"coupling", 0.4}};
    }
    cfg.test = {{1.0, 0.0}, 0.1, 100, std::nullopt};
    cfg.optimizer.epochs = desk ? 5000 : 50000;
  } else if (base == "forced_T" || base == "forced_NAT") {
    cfg.experiment = "forced_oscillator";
    cfg.architecture = {base == "forced_T" ? Variant::T : Variant::NAT, 6, 20, Activation::Tanh};
    cfg.sampling.n_samples = 800;
    cfg.sampling.phase_box = {{-3.5, 2.0}, {-4.0, 4.0}};
    cfg.sampling.h_range = {0.0, 0.3};
    cfg.sampling.t_range = Range{0.0, 16.0};
    cfg.sampling.seed = 1;
    cfg.sampling.oracle.tag = "forced_oscillator";
    cfg.sampling.oracle.params = {{"omega0", 1.0}, {"omega", 2.0}, {"F0", 1.0}};
    cfg.test = {{-0.2, -0.5}, 0.2, 80, 0.0};
    cfg.optimizer.epochs = desk ? 8000 : 40000;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  cfg.validate();
  return cfg;
}

}  // namespace henon

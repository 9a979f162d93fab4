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

#ifndef HENON_CONFIG_HPP
#define HENON_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "henon/datasets.hpp"
#include "henon/errors.hpp"
#include "henon/layers.hpp"

namespace henon {

/// Invalid experiment configuration; the message names the field.
class ConfigError : public FormatError {
 public:
  using FormatError::FormatError;
};

struct ArchitectureConfig {
  Variant variant = Variant::T;
  int layers = 5;
  int width = 30;
  Activation activation = Activation::Tanh;
};

struct OptimizerConfig {
  double learning_rate = 1e-3;
  int epochs = 50000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrajectoryConfig {
  std::vector<double> x0{1.0, 0.0};
  double h = 0.1;
  int k = 100;
  std::optional<double> t0;
};

/// Everything needed to reproduce one training run.
struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  std::string name = "pendulum";
  std::string experiment = "pendulum";
  ArchitectureConfig architecture;
  SampleSpec sampling;
  TrajectoryConfig test;
  OptimizerConfig optimizer;
  std::uint64_t init_seed = 1;
  /// Write an intermediate checkpoint every this many epochs; 0 disables.
  int checkpoint_every = 0;
  std::filesystem::path output_dir = "runs/pendulum";

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Throws ConfigError on schema violations.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical JSON form without output_dir, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Built-in presets: pendulum, linear, forced_T, forced_NAT, each at full
/// scale and with a "_desk" suffix at reduced epochs.
std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

}  // namespace henon

#endif  // HENON_CONFIG_HPP

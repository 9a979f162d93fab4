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

#ifndef HENON_DATASETS_HPP
#define HENON_DATASETS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "henon/layers.hpp"
#include "henon/oracles.hpp"

namespace henon {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// How a training set is drawn: x_i uniform over `phase_box` (p coordinates
/// first, then q), t_i uniform over `t_range` for non-autonomous systems,
/// h_i uniform over `h_range`.
struct SampleSpec {
  std::size_t n_samples = 1;
  std::vector<Range> phase_box;
  Range h_range;
  std::optional<Range> t_range;
  std::uint64_t seed = 0;
  SystemSpec oracle;

  int d() const { return static_cast<int>(phase_box.size() / 2); }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// One tuple ([x_i, t_i, h_i], y_i); t_i rides in x.t.
struct Sample {
  PhaseState x;
  double h = 0.0;
  PhaseState y;
};

struct Dataset {
  std::vector<Sample> samples;
  SampleSpec spec;

  std::size_t size() const { return samples.size(); }
  bool non_autonomous() const { return spec.t_range.has_value(); }
};

struct TestTrajectory {
  PhaseState x0;
  double h = 0.0;
  int k = 0;
  /// Start time; present only for non-autonomous systems.
  std::optional<double> t0;
  SystemSpec system;
  /// k + 1 reference states, states[0] == x0.
  std::vector<PhaseState> states;

  bool non_autonomous() const { return t0.has_value(); }
  double time_at(int step) const { return t0.value_or(0.0) + step * h; }
};

/// Draws the samples in order (per sample: p, q, t, h) with Rng(seed) and
/// labels them with the spec's oracle.
Dataset generate(const SampleSpec& spec);

/// Reference states at x0, Phi(h, x0), Phi(h, Phi(h, x0)), ...; the forced
/// oscillator uses its closed form at t0 + i h directly.
TestTrajectory test_trajectory(const SystemSpec& system, const PhaseState& x0, double h, int k,
                               std::optional<double> t0 = std::nullopt);

/// Sidecar metadata path: same basename with a .json extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

nlohmann::json sample_spec_to_json(const SampleSpec& spec);
SampleSpec sample_spec_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const SystemSpec& spec);
SystemSpec system_from_json(const nlohmann::json& j);

/// CSV `p,q[,t],h,label_p,label_q` with 17 significant digits plus sidecar.
void save_dataset(const Dataset& data, const std::filesystem::path& path);
/// Throws ParseError (with line number) for malformed rows, FormatError for
/// an empty file, MissingInputError if the file is absent.
Dataset load_dataset(const std::filesystem::path& path);

/// CSV `step,t,p,q` plus sidecar.
void save_trajectory(const TestTrajectory& traj, const std::filesystem::path& path);
TestTrajectory load_trajectory(const std::filesystem::path& path);

}  // namespace henon

#endif  // HENON_DATASETS_HPP

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

#ifndef HENON_TRAINING_HPP
#define HENON_TRAINING_HPP

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "henon/checkpoint.hpp"
#include "henon/config.hpp"
#include "henon/datasets.hpp"
#include "henon/layers.hpp"
#include "henon/optimizer.hpp"

namespace henon {

struct LossAndGradient {
  double loss = 0.0;
  /// In flatten_parameters order.
  Vec gradient;
};

/// L = (1/N) sum_i ||psi(h_i, x_i) - y_i||^2 over the full batch. Per-sample
/// terms are combined by fixed-order pairwise summation.
LossAndGradient mse_loss(const HenonArchitecture& net, const Dataset& data);
double mse_value(const HenonArchitecture& net, const Dataset& data);

/// Throws std::invalid_argument on a dimension mismatch or a NAT net without t.
/// Autonomous nets ignore a time column.
void check_compatible(const HenonArchitecture& net, const Dataset& data);

/// Full-batch Adam on `net`. One epoch is one gradient step. Returns the loss
/// at the start of each epoch. Throws NumericalAbort on a non-finite loss.
std::vector<double> fit(HenonArchitecture& net, const Dataset& data, AdamState& optimizer,
                        int epochs,
                        const std::function<void(int epoch, const HenonArchitecture&,
                                                 const AdamState&)>& on_epoch = {});

struct TrainReport {
  std::vector<double> losses;
  double final_loss = 0.0;
  double wall_clock_seconds = 0.0;
  std::filesystem::path checkpoint_path;
  std::string config_hash;
};

struct TrainOptions {
  std::optional<int> epochs_override;
  std::optional<std::filesystem::path> resume_from;
  bool write_artifacts = true;
};

/// Generates data, initializes (or resumes) the network, trains, and writes
/// into cfg.output_dir: dataset.csv, trajectory.csv, checkpoint.json,
/// train_log.csv, train_report.json and timing.json.
TrainReport train(const ExperimentConfig& cfg, const TrainOptions& options = {});

/// Builds the run's network the same way train() does.
HenonArchitecture initial_network(const ExperimentConfig& cfg);
Dataset training_data(const ExperimentConfig& cfg);
TestTrajectory evaluation_trajectory(const ExperimentConfig& cfg);

}  // namespace henon

#endif  // HENON_TRAINING_HPP

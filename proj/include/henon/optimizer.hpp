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

#ifndef HENON_OPTIMIZER_HPP
#define HENON_OPTIMIZER_HPP

#include <cstdint>

#include <Eigen/Dense>

namespace henon {

/// Bias-corrected Adam. Moment buffers are sized on the first step.
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step_count = 0;
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
};

/// One Adam update of `params` in place.
void adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grads);

}  // namespace henon

#endif  // HENON_OPTIMIZER_HPP

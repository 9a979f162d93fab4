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

#ifndef HENON_POTENTIAL_NET_HPP
#define HENON_POTENTIAL_NET_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "henon/rng.hpp"

namespace henon {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Activation { Tanh, Sigmoid };

std::string to_string(Activation act);
Activation activation_from_string(std::string_view name);

/// Activation value and its first two derivatives at z.
struct ActivationJet {
  double value;
  double d1;
  double d2;
};

ActivationJet activation_jet(Activation act, double z);
/// The same jet recovered from a cached value sigma(z).
ActivationJet activation_jet_from_value(Activation act, double value);

/// Gradient with respect to the parameters (K, b, a) of a PotentialNet.
struct ParamGradient {
  Mat dK;
  Vec db;
  Vec da;

  static ParamGradient zeros(int width, int input_dim);
  ParamGradient& operator+=(const ParamGradient& other);
};

/// Scalar network with one hidden layer, V(x) = a^T sigma(K x + b).
///
/// K is width x input_dim. Every derivative used by the Henon maps is in
/// closed form: the input gradient K^T (a .* sigma'(z)) and, for training,
/// the reverse-mode rule for any loss that depends on V(x) and grad_x V(x).
class PotentialNet {
 public:
  PotentialNet(int input_dim, int width, Activation act = Activation::Tanh);
  PotentialNet(Mat K, Vec b, Vec a, Activation act = Activation::Tanh);

  /// Fan-based uniform initialization: K ~ U(+-sqrt(6/(n+m))), b = 0,
  /// a ~ U(+-sqrt(6/(m+1))). Draws K row-major, then a.
  static PotentialNet initialized(int input_dim, int width, Rng& rng,
                                  Activation act = Activation::Tanh);

  int input_dim() const { return static_cast<int>(K_.cols()); }
  int width() const { return static_cast<int>(K_.rows()); }
  Activation activation() const { return act_; }
  std::size_t parameter_count() const;

  const Mat& K() const { return K_; }
  const Vec& b() const { return b_; }
  const Vec& a() const { return a_; }
  Mat& K() { return K_; }
  Vec& b() { return b_; }
  Vec& a() { return a_; }

  double eval(const Eigen::Ref<const Vec>& x) const;
  Vec grad_x(const Eigen::Ref<const Vec>& x) const;

  /// Writes grad_x V(x) into `out` without allocating.
  void grad_x_into(const Eigen::Ref<const Vec>& x, Eigen::Ref<Vec> out) const;
  /// As above, also recording sigma(Kx + b) in `activations` for a later vjp.
  void grad_x_into(const Eigen::Ref<const Vec>& x, Eigen::Ref<Vec> out,
                   Eigen::Ref<Vec> activations) const;

  /// Parameter and input gradients of L = w_value * V(x) + w_grad^T grad_x V(x).
  std::pair<ParamGradient, Vec> vjp_params(const Eigen::Ref<const Vec>& x, double w_value,
                                           const Eigen::Ref<const Vec>& w_grad) const;

  /// Accumulating form of vjp_params: adds dL/dtheta into `acc` and writes
  /// dL/dx into `dx`. Used on the training hot path.
  void vjp_accumulate(const Eigen::Ref<const Vec>& x, double w_value,
                      const Eigen::Ref<const Vec>& w_grad, ParamGradient& acc,
                      Eigen::Ref<Vec> dx) const;
  /// vjp_accumulate with sigma(Kx + b) taken from a forward pass at the same x.
  void vjp_accumulate(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& activations,
                      double w_value, const Eigen::Ref<const Vec>& w_grad, ParamGradient& acc,
                      Eigen::Ref<Vec> dx) const;

 private:
  void check_input(Eigen::Index n, const char* what) const;

  Mat K_;
  Vec b_;
  Vec a_;
  Activation act_;
};

}  // namespace henon

#endif  // HENON_POTENTIAL_NET_HPP

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

#ifndef HENON_LAYERS_HPP
#define HENON_LAYERS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "henon/potential_net.hpp"

namespace henon {

/// Which Henon-like map a network is built from.
///   Original: (p, q) -> (grad V(p) - q, p + eta)
///   NaiveT:   (p, q) -> (h grad V(p) - q, p + eta)
///   T:        (p, q) -> (h grad V(p) - q + eta_p, p + eta_q)
///   NAT:      (t, p, q) -> (t + h/(4m), h grad_x V(t, p) - q + eta_p, p + eta_q)
enum class Variant { Original, NaiveT, T, NAT };

std::string to_string(Variant v);
Variant variant_from_string(std::string_view name);

/// True for every variant that takes the step size h as an input.
constexpr bool is_time_adaptive(Variant v) { return v != Variant::Original; }
constexpr bool has_eta_p(Variant v) { return v == Variant::T || v == Variant::NAT; }

/// A point (p, q) of phase space. `t` is carried only for non-autonomous
/// evaluation; autonomous maps pass it through untouched.
struct PhaseState {
  Vec p;
  Vec q;
  std::optional<double> t;

  PhaseState() = default;
  PhaseState(Vec p_, Vec q_, std::optional<double> t_ = std::nullopt)
      : p(std::move(p_)), q(std::move(q_)), t(t_) {}

  int dim() const { return static_cast<int>(p.size()); }

  /// (p^T, q^T)^T.
  Vec stacked() const;
  static PhaseState from_stacked(const Eigen::Ref<const Vec>& x,
                                 std::optional<double> t = std::nullopt);
};

/// Potential V_i and shifts of one Henon layer. For Original and NaiveT the
/// single shift lives in eta_q and eta_p is empty.
struct HenonLayerParams {
  PotentialNet potential;
  Vec eta_p;
  Vec eta_q;
};

class HenonArchitecture {
 public:
  HenonArchitecture(Variant variant, int d, std::vector<HenonLayerParams> layers);

  /// Potentials initialized per PotentialNet::initialized, shifts zero.
  static HenonArchitecture initialized(Variant variant, int d, int num_layers, int width, Rng& rng,
                                       Activation act = Activation::Tanh);

  Variant variant() const { return variant_; }
  int d() const { return d_; }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  /// Input dimension of every potential: d, or d + 1 for NAT.
  int potential_input_dim() const { return variant_ == Variant::NAT ? d_ + 1 : d_; }

  const std::vector<HenonLayerParams>& layers() const { return layers_; }
  std::vector<HenonLayerParams>& layers() { return layers_; }

 private:
  Variant variant_;
  int d_;
  std::vector<HenonLayerParams> layers_;
};

std::size_t parameter_count(const HenonArchitecture& net);

/// One application of the Henon-like map. `m_layers` enters only the NAT
/// time increment h / (4 m_layers).
PhaseState henon_map(const HenonLayerParams& layer, Variant variant, double h, const PhaseState& x,
                     int m_layers = 1);

/// The same map applied four times.
PhaseState henon_layer(const HenonLayerParams& layer, Variant variant, double h,
                       const PhaseState& x, int m_layers = 1);

/// All layers in order. For NAT the full network advances t by exactly h.
PhaseState forward(const HenonArchitecture& net, double h, const PhaseState& x);

struct LayerGradient {
  ParamGradient potential;
  Vec eta_p;
  Vec eta_q;
};

/// Gradients of c^T forward(h, x) for a cotangent c in R^{2d}.
struct NetGradient {
  std::vector<LayerGradient> layers;
  Vec input_cotangent;

  static NetGradient zeros(const HenonArchitecture& net);
};

NetGradient backward(const HenonArchitecture& net, double h, const PhaseState& x,
                     const Eigen::Ref<const Vec>& cotangent);

/// Intermediate states recorded by forward_with_tape. Column k of
/// `potential_inputs` is the argument of V at sub-map k.
class ForwardTape {
 public:
  void reset(const HenonArchitecture& net);

 private:
  friend PhaseState forward_with_tape(const HenonArchitecture&, double, const PhaseState&,
                                      ForwardTape&);
  friend void backward_accumulate(const HenonArchitecture&, double, const ForwardTape&,
                                  const Eigen::Ref<const Vec>&, NetGradient&);

  Mat potential_inputs;
  Mat activations;
  Vec grad_buf;
  mutable Vec w_grad;
  mutable Vec dx;
  mutable Vec cot_p;
  mutable Vec cot_q;
  mutable Vec tmp;
};

PhaseState forward_with_tape(const HenonArchitecture& net, double h, const PhaseState& x,
                             ForwardTape& tape);

/// Adds the gradients of cotangent^T forward(...) into `acc` using a tape from
/// forward_with_tape; acc.input_cotangent is overwritten.
void backward_accumulate(const HenonArchitecture& net, double h, const ForwardTape& tape,
                         const Eigen::Ref<const Vec>& cotangent, NetGradient& acc);

/// Parameters in a fixed order: per layer, K row-major, b, a, eta_p, eta_q.
Vec flatten_parameters(const HenonArchitecture& net);
void assign_parameters(HenonArchitecture& net, const Eigen::Ref<const Vec>& flat);
/// Gradient in the order of flatten_parameters.
Vec flatten_gradient(const NetGradient& grad);

/// Any step-parameterized map of phase space; x.t is consulted by
/// non-autonomous maps.
using PhaseMap = std::function<PhaseState(double h, const PhaseState& x)>;

PhaseMap as_phase_map(const HenonArchitecture& net);

inline constexpr double kDefaultFdStep = 1e-5;

/// Central-difference Jacobian in (p, q); time is held fixed.
Mat jacobian_fd(const PhaseMap& map, double h, const PhaseState& x, double step = kDefaultFdStep);
Mat jacobian_fd(const HenonArchitecture& net, double h, const PhaseState& x,
                double step = kDefaultFdStep);

/// Central difference of the map in h at h = 0, i.e. the vector field the
/// network realizes to first order in the step size.
Vec induced_vector_field(const PhaseMap& map, const PhaseState& x, double step = kDefaultFdStep);
Vec induced_vector_field(const HenonArchitecture& net, const PhaseState& x,
                         double step = kDefaultFdStep);

}  // namespace henon

#endif  // HENON_LAYERS_HPP

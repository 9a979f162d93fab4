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

#include "henon/layers.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace henon {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Original:
      return "Original";
    case Variant::NaiveT:
      return "NaiveT";
    case Variant::T:
      return "T";
    case Variant::NAT:
      return "NAT";
  }
  return "T";
}

Variant variant_from_string(std::string_view name) {
  if (name == "Original") return Variant::Original;
  if (name == "NaiveT") return Variant::NaiveT;
  if (name == "T") return Variant::T;
  if (name == "NAT") return Variant::NAT;
  throw std::invalid_argument("unknown variant '" + std::string(name) +
                              "' (expected Original, NaiveT, T or NAT)");
}

Vec PhaseState::stacked() const {
  Vec x(p.size() + q.size());
  x << p, q;
  return x;
}

PhaseState PhaseState::from_stacked(const Eigen::Ref<const Vec>& x, std::optional<double> t) {
  if (x.size() % 2 != 0 || x.size() == 0) {
    throw std::invalid_argument("PhaseState: stacked vector must have even, positive length");
  }
  const Eigen::Index d = x.size() / 2;
  return {x.head(d), x.tail(d), t};
}

namespace {

void check_state(const PhaseState& x, int d, Variant variant) {
  if (x.p.size() != d || x.q.size() != d) {
    throw std::invalid_argument("phase state has dimension (" + std::to_string(x.p.size()) + ", " +
                                std::to_string(x.q.size()) + "), expected " + std::to_string(d));
  }
  if (variant == Variant::NAT && !x.t.has_value()) {
    throw std::invalid_argument("NAT evaluation requires a time coordinate");
  }
}

void check_layer(const HenonLayerParams& layer, Variant variant, int d) {
  const int n_in = variant == Variant::NAT ? d + 1 : d;
  if (layer.potential.input_dim() != n_in) {
    throw std::invalid_argument("layer potential has input_dim " +
                                std::to_string(layer.potential.input_dim()) + ", expected " +
                                std::to_string(n_in));
  }
  if (layer.eta_q.size() != d) throw std::invalid_argument("eta_q must have length d");
  const Eigen::Index want_p = has_eta_p(variant) ? d : 0;
  if (layer.eta_p.size() != want_p) {
    throw std::invalid_argument("eta_p must have length " + std::to_string(want_p) + " for " +
                                to_string(variant));
  }
}

double step_scale(Variant variant, double h) { return variant == Variant::Original ? 1.0 : h; }

}  // namespace

HenonArchitecture::HenonArchitecture(Variant variant, int d, std::vector<HenonLayerParams> layers)
    : variant_(variant), d_(d), layers_(std::move(layers)) {
  if (d < 1) throw std::invalid_argument("HenonArchitecture: d must be >= 1");
  if (layers_.empty()) throw std::invalid_argument("HenonArchitecture: need at least one layer");
  for (const auto& layer : layers_) check_layer(layer, variant_, d_);
}

HenonArchitecture HenonArchitecture::initialized(Variant variant, int d, int num_layers, int width,
                                                 Rng& rng, Activation act) {
  if (num_layers < 1) throw std::invalid_argument("HenonArchitecture: need at least one layer");
  const int n_in = variant == Variant::NAT ? d + 1 : d;
  std::vector<HenonLayerParams> layers;
  layers.reserve(static_cast<std::size_t>(num_layers));
  for (int i = 0; i < num_layers; ++i) {
    layers.push_back({PotentialNet::initialized(n_in, width, rng, act),
                      Vec::Zero(has_eta_p(variant) ? d : 0), Vec::Zero(d)});
  }
  return HenonArchitecture(variant, d, std::move(layers));
}

std::size_t parameter_count(const HenonArchitecture& net) {
  std::size_t total = 0;
  for (const auto& layer : net.layers()) {
    total += layer.potential.parameter_count() + static_cast<std::size_t>(layer.eta_p.size()) +
             static_cast<std::size_t>(layer.eta_q.size());
  }
  return total;
}

PhaseState henon_map(const HenonLayerParams& layer, Variant variant, double h, const PhaseState& x,
                     int m_layers) {
  const int d = x.dim();
  check_state(x, d, variant);
  check_layer(layer, variant, d);
  if (m_layers < 1) throw std::invalid_argument("henon_map: m_layers must be positive");

  Vec grad;
  if (variant == Variant::NAT) {
    Vec input(d + 1);
    input << *x.t, x.p;
    grad = layer.potential.grad_x(input).tail(d);
  } else {
    grad = layer.potential.grad_x(x.p);
  }

  PhaseState out;
  out.p = step_scale(variant, h) * grad - x.q;
  if (has_eta_p(variant)) out.p += layer.eta_p;
  out.q = x.p + layer.eta_q;
  out.t = x.t;
  if (variant == Variant::NAT) *out.t += h / (4.0 * m_layers);
  return out;
}

PhaseState henon_layer(const HenonLayerParams& layer, Variant variant, double h,
                       const PhaseState& x, int m_layers) {
  PhaseState y = x;
  for (int k = 0; k < 4; ++k) y = henon_map(layer, variant, h, y, m_layers);
  return y;
}

PhaseState forward(const HenonArchitecture& net, double h, const PhaseState& x) {
  ForwardTape tape;
  return forward_with_tape(net, h, x, tape);
}

NetGradient NetGradient::zeros(const HenonArchitecture& net) {
  NetGradient g;
  g.layers.reserve(net.layers().size());
  for (const auto& layer : net.layers()) {
    g.layers.push_back({ParamGradient::zeros(layer.potential.width(), layer.potential.input_dim()),
                        Vec::Zero(layer.eta_p.size()), Vec::Zero(layer.eta_q.size())});
  }
  g.input_cotangent = Vec::Zero(2 * net.d());
  return g;
}

void ForwardTape::reset(const HenonArchitecture& net) {
  const int n_in = net.potential_input_dim();
  const int d = net.d();
  potential_inputs.resize(n_in, 4 * net.num_layers());
  int width = 0;
  for (const auto& layer : net.layers()) width = std::max(width, layer.potential.width());
  activations.resize(width, 4 * net.num_layers());
  grad_buf.resize(n_in);
  w_grad.resize(n_in);
  dx.resize(n_in);
  cot_p.resize(d);
  cot_q.resize(d);
  tmp.resize(d);
}

PhaseState forward_with_tape(const HenonArchitecture& net, double h, const PhaseState& x,
                             ForwardTape& tape) {
  const Variant variant = net.variant();
  const int d = net.d();
  check_state(x, d, variant);
  tape.reset(net);

  const int m = net.num_layers();
  const double scale = step_scale(variant, h);
  const double dt = h / (4.0 * m);
  const bool nat = variant == Variant::NAT;

  PhaseState y = x;
  int col = 0;
  for (const auto& layer : net.layers()) {
    for (int k = 0; k < 4; ++k, ++col) {
      auto input = tape.potential_inputs.col(col);
      if (nat) input(0) = *y.t;
      input.tail(d) = y.p;
      layer.potential.grad_x_into(input, tape.grad_buf,
                                  tape.activations.col(col).head(layer.potential.width()));

      tape.tmp = y.p;
      y.p = scale * tape.grad_buf.tail(d) - y.q;
      if (has_eta_p(variant)) y.p += layer.eta_p;
      y.q = tape.tmp + layer.eta_q;
      if (nat) *y.t += dt;
    }
  }
  return y;
}

void backward_accumulate(const HenonArchitecture& net, double h, const ForwardTape& tape,
                         const Eigen::Ref<const Vec>& cotangent, NetGradient& acc) {
  const Variant variant = net.variant();
  const int d = net.d();
  if (cotangent.size() != 2 * d) {
    throw std::invalid_argument("backward: cotangent must have length 2d");
  }
  if (tape.potential_inputs.cols() != 4 * net.num_layers()) {
    throw std::invalid_argument("backward: tape does not match network");
  }
  const double scale = step_scale(variant, h);

  tape.cot_p = cotangent.head(d);
  tape.cot_q = cotangent.tail(d);
  tape.w_grad.setZero();

  for (int l = net.num_layers() - 1; l >= 0; --l) {
    const auto& layer = net.layers()[static_cast<std::size_t>(l)];
    auto& g = acc.layers[static_cast<std::size_t>(l)];
    for (int k = 3; k >= 0; --k) {
      if (has_eta_p(variant)) g.eta_p += tape.cot_p;
      g.eta_q += tape.cot_q;

      tape.w_grad.tail(d) = scale * tape.cot_p;
      const int col = 4 * l + k;
      layer.potential.vjp_accumulate(tape.potential_inputs.col(col),
                                     tape.activations.col(col).head(layer.potential.width()), 0.0,
                                     tape.w_grad, g.potential, tape.dx);
      // p_out depends on p through grad V, q_out = p + eta_q; q enters only as -q.
      tape.tmp = tape.cot_p;
      tape.cot_p = tape.cot_q + tape.dx.tail(d);
      tape.cot_q = -tape.tmp;
    }
  }
  acc.input_cotangent.resize(2 * d);
  acc.input_cotangent << tape.cot_p, tape.cot_q;
}

NetGradient backward(const HenonArchitecture& net, double h, const PhaseState& x,
                     const Eigen::Ref<const Vec>& cotangent) {
  ForwardTape tape;
  forward_with_tape(net, h, x, tape);
  NetGradient grad = NetGradient::zeros(net);
  backward_accumulate(net, h, tape, cotangent, grad);
  return grad;
}

Vec flatten_parameters(const HenonArchitecture& net) {
  Vec flat(static_cast<Eigen::Index>(parameter_count(net)));
  Eigen::Index i = 0;
  for (const auto& layer : net.layers()) {
    const auto& pot = layer.potential;
    for (int r = 0; r < pot.width(); ++r) {
      for (int c = 0; c < pot.input_dim(); ++c) flat(i++) = pot.K()(r, c);
    }
    flat.segment(i, pot.width()) = pot.b();
    i += pot.width();
    flat.segment(i, pot.width()) = pot.a();
    i += pot.width();
    flat.segment(i, layer.eta_p.size()) = layer.eta_p;
    i += layer.eta_p.size();
    flat.segment(i, layer.eta_q.size()) = layer.eta_q;
    i += layer.eta_q.size();
  }
  return flat;
}

void assign_parameters(HenonArchitecture& net, const Eigen::Ref<const Vec>& flat) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count(net))) {
    throw std::invalid_argument("assign_parameters: expected " +
                                std::to_string(parameter_count(net)) + " values, got " +
                                std::to_string(flat.size()));
  }
  Eigen::Index i = 0;
  for (auto& layer : net.layers()) {
    auto& pot = layer.potential;
    for (int r = 0; r < pot.width(); ++r) {
      for (int c = 0; c < pot.input_dim(); ++c) pot.K()(r, c) = flat(i++);
    }
    pot.b() = flat.segment(i, pot.width());
    i += pot.width();
    pot.a() = flat.segment(i, pot.width());
    i += pot.width();
    layer.eta_p = flat.segment(i, layer.eta_p.size());
    i += layer.eta_p.size();
    layer.eta_q = flat.segment(i, layer.eta_q.size());
    i += layer.eta_q.size();
  }
}

Vec flatten_gradient(const NetGradient& grad) {
  Eigen::Index total = 0;
  for (const auto& g : grad.layers) {
    total += g.potential.dK.size() + g.potential.db.size() + g.potential.da.size() +
             g.eta_p.size() + g.eta_q.size();
  }
  Vec flat(total);
  Eigen::Index i = 0;
  for (const auto& g : grad.layers) {
    for (Eigen::Index r = 0; r < g.potential.dK.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.potential.dK.cols(); ++c) flat(i++) = g.potential.dK(r, c);
    }
    flat.segment(i, g.potential.db.size()) = g.potential.db;
    i += g.potential.db.size();
    flat.segment(i, g.potential.da.size()) = g.potential.da;
    i += g.potential.da.size();
    flat.segment(i, g.eta_p.size()) = g.eta_p;
    i += g.eta_p.size();
    flat.segment(i, g.eta_q.size()) = g.eta_q;
    i += g.eta_q.size();
  }
  return flat;
}

PhaseMap as_phase_map(const HenonArchitecture& net) {
  return [&net](double h, const PhaseState& x) { return forward(net, h, x); };
}

Mat jacobian_fd(const PhaseMap& map, double h, const PhaseState& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("jacobian_fd: step must be positive");
  const int d = x.dim();
  const Vec x0 = x.stacked();
  Mat jac(2 * d, 2 * d);
  for (int j = 0; j < 2 * d; ++j) {
    Vec plus = x0;
    Vec minus = x0;
    plus(j) += step;
    minus(j) -= step;
    const Vec f_plus = map(h, PhaseState::from_stacked(plus, x.t)).stacked();
    const Vec f_minus = map(h, PhaseState::from_stacked(minus, x.t)).stacked();
    jac.col(j) = (f_plus - f_minus) / (2.0 * step);
  }
  return jac;
}

Mat jacobian_fd(const HenonArchitecture& net, double h, const PhaseState& x, double step) {
  return jacobian_fd(as_phase_map(net), h, x, step);
}

Vec induced_vector_field(const PhaseMap& map, const PhaseState& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("induced_vector_field: step must be positive");
  const Vec f_plus = map(step, x).stacked();
  const Vec f_minus = map(-step, x).stacked();
  return (f_plus - f_minus) / (2.0 * step);
}

Vec induced_vector_field(const HenonArchitecture& net, const PhaseState& x, double step) {
  if (!is_time_adaptive(net.variant())) {
    throw std::invalid_argument("induced_vector_field: Original HenonNets take no step size");
  }
  return induced_vector_field(as_phase_map(net), x, step);
}

}  // namespace henon

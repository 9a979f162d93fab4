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

#include "henon/potential_net.hpp"

#include <cmath>
#include <stdexcept>

namespace henon {

std::string to_string(Activation act) {
  switch (act) {
    case Activation::Tanh:
      return "tanh";
    case Activation::Sigmoid:
      return "sigmoid";
  }
  return "tanh";
}

Activation activation_from_string(std::string_view name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

ActivationJet activation_jet(Activation act, double z) {
  if (act == Activation::Sigmoid) {
    const double s = 1.0 / (1.0 + std::exp(-z));
    const double d1 = s * (1.0 - s);
    return {s, d1, d1 * (1.0 - 2.0 * s)};
  }
  const double t = std::tanh(z);
  const double d1 = 1.0 - t * t;
  return {t, d1, -2.0 * t * d1};
}

ActivationJet activation_jet_from_value(Activation act, double value) {
  if (act == Activation::Sigmoid) {
    const double d1 = value * (1.0 - value);
    return {value, d1, d1 * (1.0 - 2.0 * value)};
  }
  const double d1 = 1.0 - value * value;
  return {value, d1, -2.0 * value * d1};
}

ParamGradient ParamGradient::zeros(int width, int input_dim) {
  return {Mat::Zero(width, input_dim), Vec::Zero(width), Vec::Zero(width)};
}

ParamGradient& ParamGradient::operator+=(const ParamGradient& other) {
  dK += other.dK;
  db += other.db;
  da += other.da;
  return *this;
}

PotentialNet::PotentialNet(int input_dim, int width, Activation act)
    : K_(Mat::Zero(width, input_dim)), b_(Vec::Zero(width)), a_(Vec::Zero(width)), act_(act) {
  if (input_dim < 1 || width < 1) {
    throw std::invalid_argument("PotentialNet: input_dim and width must be positive");
  }
}

PotentialNet::PotentialNet(Mat K, Vec b, Vec a, Activation act)
    : K_(std::move(K)), b_(std::move(b)), a_(std::move(a)), act_(act) {
  if (K_.rows() < 1 || K_.cols() < 1) {
    throw std::invalid_argument("PotentialNet: K must be non-empty");
  }
  if (b_.size() != K_.rows() || a_.size() != K_.rows()) {
    throw std::invalid_argument("PotentialNet: b and a must have length equal to K's row count");
  }
}

PotentialNet PotentialNet::initialized(int input_dim, int width, Rng& rng, Activation act) {
  PotentialNet net(input_dim, width, act);
  const double k_lim = std::sqrt(6.0 / (input_dim + width));
  const double a_lim = std::sqrt(6.0 / (width + 1));
  for (int j = 0; j < width; ++j) {
    for (int i = 0; i < input_dim; ++i) net.K_(j, i) = rng.uniform(-k_lim, k_lim);
  }
  for (int j = 0; j < width; ++j) net.a_(j) = rng.uniform(-a_lim, a_lim);
  return net;
}

std::size_t PotentialNet::parameter_count() const {
  const auto m = static_cast<std::size_t>(width());
  const auto n = static_cast<std::size_t>(input_dim());
  return m * n + 2 * m;
}

void PotentialNet::check_input(Eigen::Index n, const char* what) const {
  if (n != K_.cols()) {
    throw std::invalid_argument(std::string("PotentialNet: ") + what + " has length " +
                                std::to_string(n) + ", expected " + std::to_string(K_.cols()));
  }
}

double PotentialNet::eval(const Eigen::Ref<const Vec>& x) const {
  check_input(x.size(), "x");
  double v = 0.0;
  for (int j = 0; j < width(); ++j) {
    const double z = K_.row(j).dot(x) + b_(j);
    v += a_(j) * activation_jet(act_, z).value;
  }
  return v;
}

Vec PotentialNet::grad_x(const Eigen::Ref<const Vec>& x) const {
  Vec out(input_dim());
  grad_x_into(x, out);
  return out;
}

void PotentialNet::grad_x_into(const Eigen::Ref<const Vec>& x, Eigen::Ref<Vec> out) const {
  check_input(x.size(), "x");
  check_input(out.size(), "output");
  out.setZero();
  for (int j = 0; j < width(); ++j) {
    const double z = K_.row(j).dot(x) + b_(j);
    out.noalias() += (a_(j) * activation_jet(act_, z).d1) * K_.row(j).transpose();
  }
}

void PotentialNet::grad_x_into(const Eigen::Ref<const Vec>& x, Eigen::Ref<Vec> out,
                               Eigen::Ref<Vec> activations) const {
  check_input(x.size(), "x");
  check_input(out.size(), "output");
  if (activations.size() != width()) {
    throw std::invalid_argument("PotentialNet: activations must have length width");
  }
  out.setZero();
  for (int j = 0; j < width(); ++j) {
    const ActivationJet s = activation_jet(act_, K_.row(j).dot(x) + b_(j));
    activations(j) = s.value;
    out.noalias() += (a_(j) * s.d1) * K_.row(j).transpose();
  }
}

std::pair<ParamGradient, Vec> PotentialNet::vjp_params(const Eigen::Ref<const Vec>& x,
                                                       double w_value,
                                                       const Eigen::Ref<const Vec>& w_grad) const {
  auto grad = ParamGradient::zeros(width(), input_dim());
  Vec dx(input_dim());
  vjp_accumulate(x, w_value, w_grad, grad, dx);
  return {std::move(grad), std::move(dx)};
}

// With z = Kx + b, s = sigma(z) and u = K w_grad:
//   L     = w_value a.s + sum_j a_j sigma'(z_j) u_j
//   dL/da = w_value s + sigma'(z) .* u
//   c     = dL/dz = w_value a .* sigma'(z) + a .* sigma''(z) .* u
//   dL/db = c,  dL/dK = c x^T + (a .* sigma'(z)) w_grad^T,  dL/dx = K^T c
void PotentialNet::vjp_accumulate(const Eigen::Ref<const Vec>& x, double w_value,
                                  const Eigen::Ref<const Vec>& w_grad, ParamGradient& acc,
                                  Eigen::Ref<Vec> dx) const {
  check_input(x.size(), "x");
  Vec activations(width());
  for (int j = 0; j < width(); ++j) activations(j) = activation_jet(act_, K_.row(j).dot(x) + b_(j)).value;
  vjp_accumulate(x, activations, w_value, w_grad, acc, dx);
}

void PotentialNet::vjp_accumulate(const Eigen::Ref<const Vec>& x,
                                  const Eigen::Ref<const Vec>& activations, double w_value,
                                  const Eigen::Ref<const Vec>& w_grad, ParamGradient& acc,
                                  Eigen::Ref<Vec> dx) const {
  check_input(x.size(), "x");
  if (activations.size() != width()) {
    throw std::invalid_argument("PotentialNet: activations must have length width");
  }
  check_input(w_grad.size(), "w_grad");
  check_input(dx.size(), "dx");
  if (acc.dK.rows() != K_.rows() || acc.dK.cols() != K_.cols() || acc.db.size() != b_.size() ||
      acc.da.size() != a_.size()) {
    throw std::invalid_argument("PotentialNet: gradient accumulator shape mismatch");
  }
  dx.setZero();
  for (int j = 0; j < width(); ++j) {
    const double u = K_.row(j).dot(w_grad);
    const ActivationJet s = activation_jet_from_value(act_, activations(j));
    const double c = a_(j) * (w_value * s.d1 + s.d2 * u);
    acc.da(j) += w_value * s.value + s.d1 * u;
    acc.db(j) += c;
    acc.dK.row(j).noalias() += c * x.transpose() + (a_(j) * s.d1) * w_grad.transpose();
    dx.noalias() += c * K_.row(j).transpose();
  }
}

}  // namespace henon

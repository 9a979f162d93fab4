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

#include "henon/oracles.hpp"

#include <cmath>
#include <vector>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace henon {

SeparableSystem SeparableSystem::pendulum() {
  SeparableSystem sys;
  sys.d = 1;
  sys.grad_K = [](const Vec& p) -> Vec { return p; };
  sys.grad_V = [](const Vec& q) -> Vec { return q.array().sin().matrix(); };
  sys.hamiltonian = [](const Vec& p, const Vec& q) {
    return 0.5 * p.squaredNorm() - q.array().cos().sum();
  };
  return sys;
}

SeparableSystem SeparableSystem::harmonic(double omega) {
  SeparableSystem sys;
  sys.d = 1;
  const double w2 = omega * omega;
  sys.grad_K = [](const Vec& p) -> Vec { return p; };
  sys.grad_V = [w2](const Vec& q) -> Vec { return w2 * q; };
  sys.hamiltonian = [w2](const Vec& p, const Vec& q) {
    return 0.5 * p.squaredNorm() + 0.5 * w2 * q.squaredNorm();
  };
  return sys;
}

PhaseState stormer_verlet_step(const SeparableSystem& sys, double h, const PhaseState& x) {
  PhaseState out = x;
  out.p -= 0.5 * h * sys.grad_V(x.q);
  out.q += h * sys.grad_K(out.p);
  out.p -= 0.5 * h * sys.grad_V(out.q);
  return out;
}

const std::array<double, 7>& order6_composition_weights() {
  static const std::array<double, 7> weights = [] {
    constexpr double w1 = 0.78451361047755726381949763;
    constexpr double w2 = 0.23557321335935813368479318;
    constexpr double w3 = -1.17767998417887100694641568;
    const double w4 = 1.0 - 2.0 * (w1 + w2 + w3);
    return std::array<double, 7>{w1, w2, w3, w4, w3, w2, w1};
  }();
  return weights;
}

namespace {

template <typename Step>
PhaseState compose_order6(double h, const PhaseState& x, int substeps, Step&& step) {
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  const double tau = h / substeps;
  PhaseState y = x;
  for (int s = 0; s < substeps; ++s) {
    for (double w : order6_composition_weights()) y = step(w * tau, y);
  }
  return y;
}

}  // namespace

PhaseState stormer_verlet_6(const SeparableSystem& sys, double h, const PhaseState& x,
                            int substeps) {
  return compose_order6(h, x, substeps,
                        [&sys](double tau, const PhaseState& y) { return stormer_verlet_step(sys, tau, y); });
}

LinearSystem LinearSystem::coupled(double coupling) {
  LinearSystem sys;
  sys.A.resize(2, 2);
  sys.A << 1.0, coupling, coupling, 1.0;
  return sys;
}

Mat inverse_structure_matrix(int d) {
  Mat jinv = Mat::Zero(2 * d, 2 * d);
  jinv.topRightCorner(d, d) = -Mat::Identity(d, d);
  jinv.bottomLeftCorner(d, d) = Mat::Identity(d, d);
  return jinv;
}

Vec LinearSystem::vector_field(const Vec& x) const { return inverse_structure_matrix(d()) * (A * x); }

Mat LinearSystem::flow_matrix(double h) const {
  const Mat generator = h * inverse_structure_matrix(d()) * A;
  return generator.exp();
}

PhaseState linear_flow(const LinearSystem& sys, double h, const PhaseState& x) {
  return PhaseState::from_stacked(sys.flow_matrix(h) * x.stacked(), x.t);
}

// For H = x^T A x / 2 with blocks A = [[App, Apq], [Aqp, Aqq]]:
//   (I + h/2 Aqp) p_half = p - h/2 Aqq q
//   (I - h/2 Apq) q1     = q + h/2 (2 App p_half + Apq q)
//   p1 = p_half - h/2 (Aqp p_half + Aqq q1)
PhaseState linear_stormer_verlet_step(const LinearSystem& sys, double h, const PhaseState& x) {
  const int d = sys.d();
  const Mat App = sys.A.topLeftCorner(d, d);
  const Mat Apq = sys.A.topRightCorner(d, d);
  const Mat Aqp = sys.A.bottomLeftCorner(d, d);
  const Mat Aqq = sys.A.bottomRightCorner(d, d);
  const Mat I = Mat::Identity(d, d);
  const Vec p_half = (I + 0.5 * h * Aqp).partialPivLu().solve(x.p - 0.5 * h * Aqq * x.q);
  const Vec q1 = (I - 0.5 * h * Apq).partialPivLu().solve(x.q + 0.5 * h * (2.0 * App * p_half + Apq * x.q));
  const Vec p1 = p_half - 0.5 * h * (Aqp * p_half + Aqq * q1);
  return {p1, q1, x.t};
}

PhaseState linear_stormer_verlet_6(const LinearSystem& sys, double h, const PhaseState& x,
                                   int substeps) {
  return compose_order6(h, x, substeps, [&sys](double tau, const PhaseState& y) {
    return linear_stormer_verlet_step(sys, tau, y);
  });
}

void ForcedOscillator::validate() const {
  if (omega == omega0) {
    throw std::invalid_argument("forced oscillator at resonance (omega == omega0) has no closed form");
  }
  if (!(omega0 > 0.0)) throw std::invalid_argument("forced oscillator needs omega0 > 0");
}

Vec ForcedOscillator::vector_field(double t, const Vec& x) const {
  Vec f(2);
  f << -omega0 * omega0 * x(1) + F0 * std::sin(omega * t), x(0);
  return f;
}

PhaseState forced_oscillator_solution(const ForcedOscillator& sys, double t, double p0, double q0) {
  sys.validate();
  const double w0 = sys.omega0;
  const double w = sys.omega;
  const double den = w0 * w0 - w * w;
  const double p = (p0 - w * sys.F0 / den) * std::cos(w0 * t) - q0 * w0 * std::sin(w0 * t) +
                   w * sys.F0 / den * std::cos(w * t);
  const double q = q0 * std::cos(w0 * t) + (p0 / w0 - w * sys.F0 / (w0 * den)) * std::sin(w0 * t) +
                   sys.F0 / den * std::sin(w * t);
  return {Vec::Constant(1, p), Vec::Constant(1, q), t};
}

// Particular solution q_p = F0/D sin(w t), p_p = w F0/D cos(w t) with
// D = w0^2 - w^2; the homogeneous remainder rotates with frequency w0.
PhaseState forced_oscillator_flow(const ForcedOscillator& sys, double h, const PhaseState& x) {
  sys.validate();
  if (!x.t) throw std::invalid_argument("forced oscillator flow needs a start time");
  if (x.dim() != 1) throw std::invalid_argument("forced oscillator is one-dimensional");
  const double w0 = sys.omega0;
  const double w = sys.omega;
  const double den = w0 * w0 - w * w;
  const double t0 = *x.t;
  const double t1 = t0 + h;
  const double ph = x.p(0) - w * sys.F0 / den * std::cos(w * t0);
  const double qh = x.q(0) - sys.F0 / den * std::sin(w * t0);
  const double c = std::cos(w0 * h);
  const double s = std::sin(w0 * h);
  const double p = ph * c - qh * w0 * s + w * sys.F0 / den * std::cos(w * t1);
  const double q = qh * c + ph / w0 * s + sys.F0 / den * std::sin(w * t1);
  return {Vec::Constant(1, p), Vec::Constant(1, q), t1};
}

double SystemSpec::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void validate_system(const SystemSpec& spec) {
  static const std::map<std::string, std::vector<std::string>> known = {
      {"pendulum", {"substeps"}},
      {"linear", {"coupling", "stormer_verlet", "substeps"}},
      {"forced_oscillator", {"omega0", "omega", "F0"}},
  };
  const auto it = known.find(spec.tag);
  if (it == known.end()) {
    throw std::invalid_argument("unknown system '" + spec.tag +
                                "' (expected pendulum, linear or forced_oscillator)");
  }
  for (const auto& [key, value] : spec.params) {
    bool ok = false;
    for (const auto& name : it->second) ok = ok || name == key;
    if (!ok) throw std::invalid_argument("system '" + spec.tag + "' has no parameter '" + key + "'");
    if (!std::isfinite(value)) throw std::invalid_argument("system parameter '" + key + "' is not finite");
  }
  if (spec.param("substeps", 10) < 1) throw std::invalid_argument("substeps must be >= 1");
  if (spec.tag == "forced_oscillator") {
    ForcedOscillator{spec.param("omega0", 1.0), spec.param("omega", 2.0), spec.param("F0", 1.0)}
        .validate();
  }
}

PhaseMap make_oracle(const SystemSpec& spec) {
  validate_system(spec);
  const int substeps = static_cast<int>(spec.param("substeps", 10));
  if (spec.tag == "pendulum") {
    return [sys = SeparableSystem::pendulum(), substeps](double h, const PhaseState& x) {
      return stormer_verlet_6(sys, h, x, substeps);
    };
  }
  if (spec.tag == "linear") {
    const auto sys = LinearSystem::coupled(spec.param("coupling", 0.4));
    if (spec.param("stormer_verlet", 0.0) != 0.0) {
      return [sys, substeps](double h, const PhaseState& x) {
        return linear_stormer_verlet_6(sys, h, x, substeps);
      };
    }
    return [sys](double h, const PhaseState& x) { return linear_flow(sys, h, x); };
  }
  const ForcedOscillator sys{spec.param("omega0", 1.0), spec.param("omega", 2.0),
                             spec.param("F0", 1.0)};
  return [sys](double h, const PhaseState& x) { return forced_oscillator_flow(sys, h, x); };
}

}  // namespace henon

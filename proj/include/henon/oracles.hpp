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

#ifndef HENON_ORACLES_HPP
#define HENON_ORACLES_HPP

#include <array>
#include <functional>
#include <map>
#include <string>

#include "henon/layers.hpp"

namespace henon {

/// H(p, q) = K(p) + V(q), described through its two gradients.
struct SeparableSystem {
  int d = 1;
  std::function<Vec(const Vec&)> grad_K;
  std::function<Vec(const Vec&)> grad_V;
  std::function<double(const Vec&, const Vec&)> hamiltonian;

  /// H = p^2/2 - cos q.
  static SeparableSystem pendulum();
  /// H = p^2/2 + omega^2 q^2/2.
  static SeparableSystem harmonic(double omega = 1.0);
};

/// Leapfrog: half kick, drift, half kick. Negative h runs it backwards.
PhaseState stormer_verlet_step(const SeparableSystem& sys, double h, const PhaseState& x);

/// Weights of the 7-stage symmetric composition of leapfrog (Yoshida's
/// order-6 solution A); palindromic and summing to 1.
const std::array<double, 7>& order6_composition_weights();

/// `substeps` macro-steps of size h/substeps, each the order-6 composition.
PhaseState stormer_verlet_6(const SeparableSystem& sys, double h, const PhaseState& x,
                            int substeps);

/// H(x) = x^T A x / 2 with symmetric A of size 2d.
struct LinearSystem {
  Mat A;

  /// H = p^2/2 + coupling * p q + q^2/2.
  static LinearSystem coupled(double coupling);

  int d() const { return static_cast<int>(A.rows() / 2); }
  double hamiltonian(const Vec& x) const { return 0.5 * x.dot(A * x); }
  /// J^{-1} A x.
  Vec vector_field(const Vec& x) const;
  /// exp(h J^{-1} A).
  Mat flow_matrix(double h) const;
};

/// J^{-1} for the canonical structure matrix J = [[0, I], [-I, 0]].
Mat inverse_structure_matrix(int d);

PhaseState linear_flow(const LinearSystem& sys, double h, const PhaseState& x);

/// Generalized (implicit) Stormer-Verlet step, solved exactly for a
/// quadratic Hamiltonian.
PhaseState linear_stormer_verlet_step(const LinearSystem& sys, double h, const PhaseState& x);

/// The order-6 composition pipeline applied to the linear system.
PhaseState linear_stormer_verlet_6(const LinearSystem& sys, double h, const PhaseState& x,
                                   int substeps);

/// H(p, q, t) = p^2/2 + omega0^2 q^2/2 - F0 sin(omega t) q.
struct ForcedOscillator {
  double omega0 = 1.0;
  double omega = 2.0;
  double F0 = 1.0;

  /// Throws std::invalid_argument at resonance (omega == omega0).
  void validate() const;
  /// (dp/dt, dq/dt) at time t.
  Vec vector_field(double t, const Vec& x) const;
};

/// Closed-form solution at time t for p(0) = p0, q(0) = q0.
PhaseState forced_oscillator_solution(const ForcedOscillator& sys, double t, double p0, double q0);

/// Exact flow from (x at time *x.t) over a step h; the result carries t + h.
PhaseState forced_oscillator_flow(const ForcedOscillator& sys, double h, const PhaseState& x);

/// A ground-truth system named by tag: "pendulum", "linear" or
/// "forced_oscillator", with numeric parameter overrides.
struct SystemSpec {
  std::string tag = "pendulum";
  std::map<std::string, double> params;

  double param(const std::string& key, double fallback) const;
  bool non_autonomous() const { return tag == "forced_oscillator"; }
  int d() const { return 1; }
};

/// Reference flow Phi(h, x) of the named system.
///   pendulum: order-6 composition, "substeps" (default 10) steps of h/substeps.
///   linear: exact exponential; "stormer_verlet" = 1 selects the order-6
///     composition of the implicit scheme with "substeps" steps instead.
///   forced_oscillator: closed form, requires x.t.
PhaseMap make_oracle(const SystemSpec& spec);

/// Throws std::invalid_argument for unknown tags or invalid parameters.
void validate_system(const SystemSpec& spec);

}  // namespace henon

#endif  // HENON_ORACLES_HPP

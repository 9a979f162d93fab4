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

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "henon/diagnostics.hpp"
#include "henon/oracles.hpp"

namespace henon {
namespace {

PhaseState state(double p, double q, std::optional<double> t = std::nullopt) {
  return PhaseState(Vec::Constant(1, p), Vec::Constant(1, q), t);
}

PhaseState iterate(const PhaseMap& map, double h, int n, PhaseState x) {
  for (int i = 0; i < n; ++i) x = map(h, x);
  return x;
}

// Global error at T=1 of the harmonic oscillator from (0, 1); exact (-sin 1, cos 1).
double harmonic_error(const PhaseMap& step, double h) {
  const int n = static_cast<int>(std::lround(1.0 / h));
  const PhaseState y = iterate(step, h, n, state(0.0, 1.0));
  return std::hypot(y.p(0) + std::sin(1.0), y.q(0) - std::cos(1.0));
}

TEST(Oracles, LeapfrogHandValues) {
  const PhaseState y = stormer_verlet_step(SeparableSystem::harmonic(), 0.1, state(0.0, 1.0));
  EXPECT_NEAR(y.q(0), 0.995, 1e-15);
  EXPECT_NEAR(y.p(0), -0.09975, 1e-15);
}

TEST(Oracles, LeapfrogZeroStepAndReversibility) {
  const auto sys = SeparableSystem::pendulum();
  const PhaseState x = state(0.7, -0.4);
  EXPECT_EQ(stormer_verlet_step(sys, 0.0, x).stacked(), x.stacked());
  const PhaseState back = stormer_verlet_step(sys, -0.13, stormer_verlet_step(sys, 0.13, x));
  EXPECT_LE((back.stacked() - x.stacked()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Oracles, CompositionWeightsArePalindromicAndConsistent) {
  const auto& w = order6_composition_weights();
  double sum = 0.0, cubes = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_EQ(w[i], w[w.size() - 1 - i]);
    sum += w[i];
    cubes += w[i] * w[i] * w[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_NEAR(cubes, 0.0, 1e-14);
}

TEST(Oracles, ConvergenceOrders) {
  const auto sys = SeparableSystem::harmonic();
  const PhaseMap sv2 = [&](double h, const PhaseState& x) { return stormer_verlet_step(sys, h, x); };
  const PhaseMap sv6 = [&](double h, const PhaseState& x) { return stormer_verlet_6(sys, h, x, 1); };
  const double hs[] = {0.2, 0.1, 0.05, 0.025};
  for (int i = 0; i + 1 < 4; ++i) {
    EXPECT_GE(std::log2(harmonic_error(sv2, hs[i]) / harmonic_error(sv2, hs[i + 1])), 1.9);
    EXPECT_GE(std::log2(harmonic_error(sv6, hs[i]) / harmonic_error(sv6, hs[i + 1])), 5.5);
  }
}

TEST(Oracles, Order6ZeroStepAndSubstepValidation) {
  const auto sys = SeparableSystem::pendulum();
  const PhaseState x = state(0.2, 0.9);
  EXPECT_EQ(stormer_verlet_6(sys, 0.0, x, 10).stacked(), x.stacked());
  EXPECT_THROW(stormer_verlet_6(sys, 0.1, x, 0), std::invalid_argument);
}

TEST(Oracles, PendulumEnergyDrift) {
  const auto sys = SeparableSystem::pendulum();
  const PhaseState x = state(1.0, 0.0);
  const PhaseState y = stormer_verlet_6(sys, 0.1, x, 10);
  EXPECT_LE(std::abs(sys.hamiltonian(y.p, y.q) - sys.hamiltonian(x.p, x.q)), 1e-10);
}

TEST(Oracles, SeparableGradientsMatchHamiltonian) {
  for (const auto& sys : {SeparableSystem::pendulum(), SeparableSystem::harmonic(1.7)}) {
    const Vec p = Vec::Constant(1, 0.3), q = Vec::Constant(1, -1.1);
    const double s = 1e-6;
    const double dp = (sys.hamiltonian(p.array() + s, q) - sys.hamiltonian(p.array() - s, q)) / (2 * s);
    const double dq = (sys.hamiltonian(p, q.array() + s) - sys.hamiltonian(p, q.array() - s)) / (2 * s);
    EXPECT_NEAR(sys.grad_K(p)(0), dp, 1e-6);
    EXPECT_NEAR(sys.grad_V(q)(0), dq, 1e-6);
  }
}

Mat series_exp(const Mat& M) {
  Mat term = Mat::Identity(M.rows(), M.cols());
  Mat sum = term;
  for (int k = 1; k < 60; ++k) {
    term = term * M / k;
    sum += term;
  }
  return sum;
}

TEST(Oracles, LinearFlowIsRotationForIdentityA) {
  LinearSystem sys{Mat::Identity(2, 2)};
  const PhaseState y = linear_flow(sys, std::numbers::pi / 2, state(1.0, 0.0));
  EXPECT_NEAR(y.p(0), 0.0, 1e-14);
  EXPECT_NEAR(y.q(0), 1.0, 1e-14);
  EXPECT_EQ(linear_flow(sys, 0.0, state(0.3, 0.4)).stacked(), state(0.3, 0.4).stacked());
}

TEST(Oracles, LinearFlowMatchesSeries) {
  const auto sys = LinearSystem::coupled(0.4);
  EXPECT_EQ(sys.A(0, 1), 0.4);
  EXPECT_EQ(sys.A(1, 0), 0.4);
  const Mat expected = series_exp(0.7 * inverse_structure_matrix(1) * sys.A);
  EXPECT_LE((sys.flow_matrix(0.7) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Oracles, LinearFlowIsSymplectic) {
  const auto sys = LinearSystem::coupled(0.4);
  EXPECT_LE(symplectic_residual(sys.flow_matrix(0.37)), 1e-10);
  EXPECT_LE(symplectic_residual(sys.flow_matrix(3.0)), 1e-10);
}

TEST(Oracles, LinearStormerVerletConvergesToExactFlow) {
  const auto sys = LinearSystem::coupled(0.4);
  const PhaseState x = state(0.5, -1.0);
  const Vec exact = linear_flow(sys, 0.4, x).stacked();
  EXPECT_LE((linear_stormer_verlet_6(sys, 0.4, x, 10).stacked() - exact).cwiseAbs().maxCoeff(), 1e-10);
  const PhaseMap step = [&](double h, const PhaseState& s) { return linear_stormer_verlet_step(sys, h, s); };
  EXPECT_LE(symplectic_residual(jacobian_fd(step, 0.3, x)), 1e-9);
}

TEST(Oracles, ForcedOscillatorInitialConditions) {
  const ForcedOscillator sys;
  const PhaseState y = forced_oscillator_solution(sys, 0.0, -0.2, -0.5);
  EXPECT_NEAR(y.p(0), -0.2, 1e-15);
  EXPECT_NEAR(y.q(0), -0.5, 1e-15);
}

TEST(Oracles, ForcedOscillatorUnforcedLimit) {
  const ForcedOscillator sys{1.3, 2.0, 0.0};
  const double t = 2.1, p0 = 0.4, q0 = -0.9, w = 1.3;
  const PhaseState y = forced_oscillator_solution(sys, t, p0, q0);
  EXPECT_NEAR(y.p(0), p0 * std::cos(w * t) - q0 * w * std::sin(w * t), 1e-14);
  EXPECT_NEAR(y.q(0), q0 * std::cos(w * t) + p0 / w * std::sin(w * t), 1e-14);
}

// Classical RK4 with a small fixed step as an independent integrator.
Vec rk4(const ForcedOscillator& sys, Vec x, double t_end, int n) {
  const double dt = t_end / n;
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec k1 = sys.vector_field(t, x);
    const Vec k2 = sys.vector_field(t + dt / 2, x + dt / 2 * k1);
    const Vec k3 = sys.vector_field(t + dt / 2, x + dt / 2 * k2);
    const Vec k4 = sys.vector_field(t + dt, x + dt * k3);
    x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += dt;
  }
  return x;
}

TEST(Oracles, ForcedOscillatorMatchesNumericalIntegration) {
  const ForcedOscillator sys;
  Vec x0(2);
  x0 << -0.2, -0.5;
  const Vec ref = rk4(sys, x0, 0.7, 7000);
  const PhaseState y = forced_oscillator_solution(sys, 0.7, -0.2, -0.5);
  EXPECT_LE((y.stacked() - ref).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Oracles, ForcedOscillatorSatisfiesOde) {
  const ForcedOscillator sys;
  const double s = 1e-5;
  for (double t : {0.3, 2.0, 7.5, 15.9}) {
    const Vec plus = forced_oscillator_solution(sys, t + s, -0.2, -0.5).stacked();
    const Vec minus = forced_oscillator_solution(sys, t - s, -0.2, -0.5).stacked();
    const Vec x = forced_oscillator_solution(sys, t, -0.2, -0.5).stacked();
    const Vec residual = (plus - minus) / (2 * s) - sys.vector_field(t, x);
    EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-5) << "t=" << t;
  }
}

TEST(Oracles, ForcedFlowAgreesWithClosedForm) {
  const ForcedOscillator sys;
  const PhaseState a = forced_oscillator_solution(sys, 3.1, -0.2, -0.5);
  PhaseState at = a;
  at.t = 3.1;
  const PhaseState b = forced_oscillator_flow(sys, 0.25, at);
  const PhaseState c = forced_oscillator_solution(sys, 3.35, -0.2, -0.5);
  EXPECT_LE((b.stacked() - c.stacked()).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_DOUBLE_EQ(*b.t, 3.35);
  EXPECT_THROW(forced_oscillator_flow(sys, 0.1, state(0.0, 0.0)), std::invalid_argument);
}

TEST(Oracles, ForcedFlowIsSymplectic) {
  const ForcedOscillator sys;
  const PhaseMap map = [&](double h, const PhaseState& x) { return forced_oscillator_flow(sys, h, x); };
  EXPECT_LE(symplectic_residual(jacobian_fd(map, 0.3, state(0.4, -0.2, 5.0))), 1e-6);
}

TEST(Oracles, ResonanceRejected) {
  const ForcedOscillator sys{1.5, 1.5, 1.0};
  EXPECT_THROW(sys.validate(), std::invalid_argument);
  EXPECT_THROW(forced_oscillator_solution(sys, 1.0, 0.0, 0.0), std::invalid_argument);
}

TEST(Oracles, OracleStepsAreSymplectic) {
  const auto pend = SeparableSystem::pendulum();
  const PhaseMap sv6 = [&](double h, const PhaseState& x) { return stormer_verlet_6(pend, h, x, 10); };
  EXPECT_LE(symplectic_residual(jacobian_fd(sv6, 0.4, state(1.0, 0.5))), 1e-6);
}

TEST(Oracles, MakeOracleDispatch) {
  SystemSpec pend;
  EXPECT_EQ(make_oracle(pend)(0.3, state(1.0, 0.0)).stacked(),
            stormer_verlet_6(SeparableSystem::pendulum(), 0.3, state(1.0, 0.0), 10).stacked());
  SystemSpec lin{"linear", {{"coupling", 0.4}}};
  EXPECT_EQ(make_oracle(lin)(0.3, state(1.0, 0.0)).stacked(),
            linear_flow(LinearSystem::coupled(0.4), 0.3, state(1.0, 0.0)).stacked());
  SystemSpec lin_sv{"linear", {{"coupling", 0.4}, {"stormer_verlet", 1}}};
  EXPECT_LE((make_oracle(lin_sv)(0.3, state(1.0, 0.0)).stacked() -
             linear_flow(LinearSystem::coupled(0.4), 0.3, state(1.0, 0.0)).stacked()).cwiseAbs().maxCoeff(),
            1e-10);
  SystemSpec forced{"forced_oscillator", {}};
  EXPECT_TRUE(forced.non_autonomous());
  EXPECT_NO_THROW(make_oracle(forced)(0.3, state(1.0, 0.0, 0.0)));
}

TEST(Oracles, SystemValidation) {
  EXPECT_THROW(validate_system({"duffing", {}}), std::invalid_argument);
  EXPECT_THROW(validate_system({"pendulum", {{"substeps", 0}}}), std::invalid_argument);
  EXPECT_THROW(validate_system({"pendulum", {{"omega", 2}}}), std::invalid_argument);
  EXPECT_THROW(validate_system({"forced_oscillator", {{"omega0", 2}, {"omega", 2}}}), std::invalid_argument);
}

}  // namespace
}  // namespace henon

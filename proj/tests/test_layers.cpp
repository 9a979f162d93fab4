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
#include <stdexcept>

#include <gtest/gtest.h>

#include "henon/diagnostics.hpp"
#include "henon/layers.hpp"

namespace henon {
namespace {

PhaseState state(double p, double q, std::optional<double> t = std::nullopt) {
  return PhaseState(Vec::Constant(1, p), Vec::Constant(1, q), t);
}

HenonLayerParams zero_layer(Variant v, int d) {
  const int n = v == Variant::NAT ? d + 1 : d;
  return {PotentialNet(n, 2), has_eta_p(v) ? Vec::Zero(d) : Vec(), Vec::Zero(d)};
}

HenonArchitecture random_net(Variant v, int d, int layers, int width, std::uint64_t seed) {
  Rng rng(seed);
  return random_architecture(v, d, layers, width, rng);
}

TEST(Layers, OriginalZeroPotentialMap) {
  const PhaseState y = henon_map(zero_layer(Variant::Original, 1), Variant::Original, 0.0, state(1, 2));
  EXPECT_EQ(y.p(0), -2.0);
  EXPECT_EQ(y.q(0), 1.0);
}

TEST(Layers, OriginalZeroPotentialLayerIsIdentity) {
  const PhaseState x = state(0.3, -1.7);
  const PhaseState y = henon_layer(zero_layer(Variant::Original, 1), Variant::Original, 0.0, x);
  EXPECT_EQ(y.p(0), 0.3);
  EXPECT_EQ(y.q(0), -1.7);
}

TEST(Layers, TMapWithLinearGradient) {
  // grad V(p) = p exactly is not a tanh net; check the map formula with the
  // net's own gradient plugged in.
  HenonLayerParams layer{PotentialNet(Mat::Constant(1, 1, 0.8), Vec::Constant(1, 0.1), Vec::Constant(1, 1.3)),
                         Vec::Constant(1, 0.1), Vec::Constant(1, -0.2)};
  const double g = layer.potential.grad_x(Vec::Constant(1, 1.0))(0);
  const PhaseState y = henon_map(layer, Variant::T, 0.5, state(1, 2));
  EXPECT_NEAR(y.p(0), 0.5 * g - 2 + 0.1, 1e-15);
  EXPECT_NEAR(y.q(0), 0.8, 1e-15);
}

TEST(Layers, NaiveTAndOriginalMaps) {
  HenonLayerParams layer{PotentialNet(Mat::Constant(1, 1, 0.8), Vec::Constant(1, 0.1), Vec::Constant(1, 1.3)),
                         Vec(), Vec::Constant(1, 0.4)};
  const double g = layer.potential.grad_x(Vec::Constant(1, 1.0))(0);
  const PhaseState naive = henon_map(layer, Variant::NaiveT, 0.5, state(1, 2));
  EXPECT_NEAR(naive.p(0), 0.5 * g - 2, 1e-15);
  EXPECT_NEAR(naive.q(0), 1.4, 1e-15);
  const PhaseState orig = henon_map(layer, Variant::Original, 0.5, state(1, 2));
  EXPECT_NEAR(orig.p(0), g - 2, 1e-15);
}

TEST(Layers, NatTimeAdvance) {
  const HenonArchitecture net = random_net(Variant::NAT, 1, 3, 4, 9);
  const PhaseState y = henon_map(net.layers()[0], Variant::NAT, 0.6, state(0.2, 0.1, 1.0), 3);
  EXPECT_NEAR(*y.t - 1.0, 0.05, 1e-15);
  const PhaseState z = forward(net, 0.6, state(0.2, 0.1, 1.0));
  EXPECT_LE(std::abs(*z.t - 1.6), 1e-12);
}

TEST(Layers, MissingTimeForNatThrows) {
  const HenonArchitecture net = random_net(Variant::NAT, 1, 2, 4, 1);
  EXPECT_THROW(forward(net, 0.1, state(0.1, 0.2)), std::invalid_argument);
}

TEST(Layers, DimensionMismatchThrows) {
  const HenonArchitecture net = random_net(Variant::T, 2, 2, 4, 1);
  EXPECT_THROW(forward(net, 0.1, state(0.1, 0.2)), std::invalid_argument);
  HenonLayerParams bad = zero_layer(Variant::T, 1);
  bad.eta_p = Vec();
  EXPECT_THROW(HenonArchitecture(Variant::T, 1, {bad}), std::invalid_argument);
}

TEST(Layers, ZeroStepIdentityForAllTimeAdaptiveVariants) {
  for (Variant v : {Variant::NaiveT, Variant::T, Variant::NAT}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const HenonArchitecture net = random_net(v, 1 + static_cast<int>(seed % 2), 3, 6, seed);
      Rng rng(seed + 50);
      Vec x(2 * net.d());
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1.5, 1.5);
      const std::optional<double> t = v == Variant::NAT ? std::optional<double>(2.5) : std::nullopt;
      const PhaseState y = forward(net, 0.0, PhaseState::from_stacked(x, t));
      EXPECT_LE((y.stacked() - x).cwiseAbs().maxCoeff(), 1e-12) << to_string(v);
      if (t) EXPECT_EQ(*y.t, 2.5);
    }
  }
}

TEST(Layers, SingleLayerNetworkEqualsLayer) {
  const HenonArchitecture net = random_net(Variant::T, 1, 1, 5, 4);
  const PhaseState x = state(0.4, -0.1);
  const Vec a = forward(net, 0.3, x).stacked();
  const Vec b = henon_layer(net.layers()[0], Variant::T, 0.3, x).stacked();
  EXPECT_EQ(a, b);
}

TEST(Layers, ForwardIsCompositionOfLayers) {
  const HenonArchitecture net = random_net(Variant::T, 1, 3, 5, 5);
  PhaseState x = state(0.4, -0.1);
  const Vec y = forward(net, 0.3, x).stacked();
  for (const auto& layer : net.layers()) x = henon_layer(layer, Variant::T, 0.3, x);
  EXPECT_LE((y - x.stacked()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Layers, ConcatenatedLayersCompose) {
  const HenonArchitecture a = random_net(Variant::NaiveT, 2, 2, 4, 6);
  const HenonArchitecture b = random_net(Variant::NaiveT, 2, 3, 4, 7);
  auto all = a.layers();
  all.insert(all.end(), b.layers().begin(), b.layers().end());
  const HenonArchitecture ab(Variant::NaiveT, 2, all);
  PhaseState x(Vec::Constant(2, 0.3), Vec::Constant(2, -0.6));
  const Vec direct = forward(ab, 0.2, x).stacked();
  const Vec composed = forward(b, 0.2, forward(a, 0.2, x)).stacked();
  EXPECT_LE((direct - composed).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Layers, PresetShapeParameterCounts) {
  Rng rng(1);
  EXPECT_EQ(parameter_count(HenonArchitecture::initialized(Variant::T, 1, 5, 30, rng)), 460u);
  EXPECT_EQ(parameter_count(HenonArchitecture::initialized(Variant::T, 1, 6, 20, rng)), 372u);
  EXPECT_EQ(parameter_count(HenonArchitecture::initialized(Variant::NAT, 1, 6, 20, rng)), 492u);
  EXPECT_EQ(parameter_count(HenonArchitecture::initialized(Variant::NaiveT, 1, 5, 30, rng)), 5u * 91u);
  EXPECT_EQ(parameter_count(HenonArchitecture::initialized(Variant::Original, 2, 2, 3, rng)), 2u * 14u);
}

TEST(Layers, InitializedShiftsAreZero) {
  Rng rng(2);
  const HenonArchitecture net = HenonArchitecture::initialized(Variant::T, 2, 3, 4, rng);
  for (const auto& layer : net.layers()) {
    EXPECT_EQ(layer.eta_p.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(layer.eta_q.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Layers, FlattenAssignRoundTrip) {
  HenonArchitecture net = random_net(Variant::NAT, 1, 2, 3, 8);
  const Vec flat = flatten_parameters(net);
  EXPECT_EQ(static_cast<std::size_t>(flat.size()), parameter_count(net));
  HenonArchitecture other = random_net(Variant::NAT, 1, 2, 3, 9);
  assign_parameters(other, flat);
  EXPECT_EQ(flatten_parameters(other), flat);
  EXPECT_THROW(assign_parameters(other, Vec::Zero(3)), std::invalid_argument);
}

double directional(const HenonArchitecture& net, double h, const PhaseState& x, const Vec& cot) {
  return cot.dot(forward(net, h, x).stacked());
}

void expect_backward_matches_fd(Variant v, int d, std::uint64_t seed) {
  HenonArchitecture net = random_net(v, d, 2, 4, seed);
  Rng rng(seed + 1);
  Vec x0(2 * d), cot(2 * d);
  for (int i = 0; i < 2 * d; ++i) x0(i) = rng.uniform(-1, 1);
  for (int i = 0; i < 2 * d; ++i) cot(i) = rng.uniform(-1, 1);
  const std::optional<double> t = v == Variant::NAT ? std::optional<double>(0.7) : std::nullopt;
  const PhaseState x = PhaseState::from_stacked(x0, t);
  const double h = 0.35;
  const NetGradient g = backward(net, h, x, cot);
  const Vec analytic = flatten_gradient(g);
  const Vec theta = flatten_parameters(net);
  const double step = 1e-6;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Vec tp = theta, tm = theta;
    tp(i) += step;
    tm(i) -= step;
    assign_parameters(net, tp);
    const double fp = directional(net, h, x, cot);
    assign_parameters(net, tm);
    const double fm = directional(net, h, x, cot);
    const double fd = (fp - fm) / (2 * step);
    EXPECT_LE(std::abs(analytic(i) - fd) / (1.0 + std::abs(fd)), 1e-6) << to_string(v) << " param " << i;
  }
  assign_parameters(net, theta);
  for (int i = 0; i < 2 * d; ++i) {
    Vec xp = x0, xm = x0;
    xp(i) += step;
    xm(i) -= step;
    const double fd = (directional(net, h, PhaseState::from_stacked(xp, t), cot) -
                       directional(net, h, PhaseState::from_stacked(xm, t), cot)) / (2 * step);
    EXPECT_LE(std::abs(g.input_cotangent(i) - fd) / (1.0 + std::abs(fd)), 1e-6) << "x" << i;
  }
}

TEST(Layers, BackwardMatchesFiniteDifferencesT) { expect_backward_matches_fd(Variant::T, 1, 31); }
TEST(Layers, BackwardMatchesFiniteDifferencesNaiveT) { expect_backward_matches_fd(Variant::NaiveT, 2, 32); }
TEST(Layers, BackwardMatchesFiniteDifferencesNAT) { expect_backward_matches_fd(Variant::NAT, 1, 33); }
TEST(Layers, BackwardMatchesFiniteDifferencesOriginal) { expect_backward_matches_fd(Variant::Original, 1, 34); }

TEST(Layers, ZeroPotentialShiftGradients) {
  HenonArchitecture net = random_net(Variant::T, 1, 1, 3, 35);
  net.layers()[0].potential.a().setZero();
  Vec cot(2);
  cot << 0.7, -0.4;
  // Four maps (p,q) -> (-q + ep, p + eq) compose to the identity for any
  // shifts, so both shift gradients vanish exactly.
  const NetGradient g = backward(net, 0.2, state(0.1, 0.3), cot);
  EXPECT_NEAR(g.layers[0].eta_p(0), 0.0, 1e-15);
  EXPECT_NEAR(g.layers[0].eta_q(0), 0.0, 1e-15);
  EXPECT_NEAR(g.input_cotangent(0), 0.7, 1e-15);
  EXPECT_NEAR(g.input_cotangent(1), -0.4, 1e-15);
}

TEST(Layers, ShiftGradientsMatchFiniteDifferences) {
  const HenonArchitecture net = random_net(Variant::T, 1, 2, 3, 35);
  Vec cot(2);
  cot << 0.7, -0.4;
  const NetGradient g = backward(net, 0.2, state(0.1, 0.3), cot);
  const double step = 1e-6;
  for (int layer = 0; layer < 2; ++layer) {
    for (int which = 0; which < 2; ++which) {
      HenonArchitecture plus = net, minus = net;
      auto& lp = plus.layers()[static_cast<std::size_t>(layer)];
      auto& lm = minus.layers()[static_cast<std::size_t>(layer)];
      (which == 0 ? lp.eta_p : lp.eta_q)(0) += step;
      (which == 0 ? lm.eta_p : lm.eta_q)(0) -= step;
      const double fd = (directional(plus, 0.2, state(0.1, 0.3), cot) -
                         directional(minus, 0.2, state(0.1, 0.3), cot)) / (2 * step);
      const auto& lg = g.layers[static_cast<std::size_t>(layer)];
      EXPECT_NEAR(which == 0 ? lg.eta_p(0) : lg.eta_q(0), fd, 1e-9);
    }
  }
}

TEST(Layers, ZeroCotangentGivesZeroGradient) {
  const HenonArchitecture net = random_net(Variant::T, 2, 2, 4, 36);
  const NetGradient g = backward(net, 0.3, PhaseState(Vec::Ones(2), Vec::Ones(2)), Vec::Zero(4));
  EXPECT_EQ(flatten_gradient(g).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.input_cotangent.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Layers, TapeForwardMatchesForward) {
  const HenonArchitecture net = random_net(Variant::NAT, 2, 3, 5, 37);
  ForwardTape tape;
  tape.reset(net);
  const PhaseState x(Vec::Constant(2, 0.2), Vec::Constant(2, -0.5), 3.0);
  const PhaseState a = forward(net, 0.25, x);
  const PhaseState b = forward_with_tape(net, 0.25, x, tape);
  EXPECT_EQ(a.stacked(), b.stacked());
  EXPECT_EQ(*a.t, *b.t);
}

TEST(Layers, JacobianOfSingleTMap) {
  // One T map whose potential has V''(0) = 1, so at p=0 the Jacobian is [[h, -1], [1, 0]].
  const double k = 1e-2, b = -0.5;
  const double a = 1.0 / (k * k * activation_jet(Activation::Tanh, b).d2);
  HenonLayerParams layer{PotentialNet(Mat::Constant(1, 1, k), Vec::Constant(1, b), Vec::Constant(1, a)),
                         Vec::Constant(1, 0.1), Vec::Constant(1, -0.2)};
  const PhaseMap map = [&](double h, const PhaseState& x) { return henon_map(layer, Variant::T, h, x); };
  const Mat D = jacobian_fd(map, 0.5, state(0.0, 0.3));
  EXPECT_NEAR(D(0, 0), 0.5, 1e-6);
  EXPECT_NEAR(D(0, 1), -1.0, 1e-9);
  EXPECT_NEAR(D(1, 0), 1.0, 1e-9);
  EXPECT_NEAR(D(1, 1), 0.0, 1e-9);
  EXPECT_NEAR(D.determinant(), 1.0, 1e-9);
}

TEST(Layers, JacobianAtZeroStepIsIdentity) {
  const HenonArchitecture net = random_net(Variant::T, 2, 3, 5, 38);
  const Mat D = jacobian_fd(net, 0.0, PhaseState(Vec::Constant(2, 0.3), Vec::Constant(2, 0.1)));
  EXPECT_LE((D - Mat::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Layers, SeededNetworksAreSymplectic) {
  for (Variant v : {Variant::Original, Variant::NaiveT, Variant::T, Variant::NAT}) {
    for (int d : {1, 2}) {
      const HenonArchitecture net = random_net(v, d, 3, 6, 40 + static_cast<std::uint64_t>(d));
      const std::optional<double> t = v == Variant::NAT ? std::optional<double>(1.0) : std::nullopt;
      const PhaseState x(Vec::Constant(d, 0.4), Vec::Constant(d, -0.8), t);
      EXPECT_LE(symplectic_residual(jacobian_fd(net, 0.37, x)), 1e-6) << to_string(v) << " d=" << d;
    }
  }
}

TEST(Layers, InducedFieldOfZeroPotentialIsZero) {
  HenonArchitecture net = random_net(Variant::T, 1, 2, 3, 41);
  for (auto& layer : net.layers()) layer.potential.a().setZero();
  EXPECT_LE(induced_vector_field(net, state(0.5, 0.2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Layers, InducedFieldOfOriginalThrows) {
  const HenonArchitecture net = random_net(Variant::Original, 1, 2, 3, 42);
  EXPECT_THROW(induced_vector_field(net, state(0.5, 0.2)), std::invalid_argument);
}

TEST(Layers, NaiveTInducedFieldShape) {
  // One layer, zero shift, g = grad V: f = (g(q) - g(-q), g(-p) - g(p)).
  HenonArchitecture net = random_net(Variant::NaiveT, 1, 1, 4, 43);
  net.layers()[0].eta_q.setZero();
  const PotentialNet& V = net.layers()[0].potential;
  auto g = [&](double x) { return V.grad_x(Vec::Constant(1, x))(0); };
  const Vec f = induced_vector_field(net, state(0.6, -0.3));
  EXPECT_NEAR(f(0), g(-0.3) - g(0.3), 1e-8);
  EXPECT_NEAR(f(1), g(-0.6) - g(0.6), 1e-8);
}

TEST(Layers, VariantNames) {
  for (Variant v : {Variant::Original, Variant::NaiveT, Variant::T, Variant::NAT}) {
    EXPECT_EQ(variant_from_string(to_string(v)), v);
  }
  EXPECT_THROW(variant_from_string("SympNet"), std::invalid_argument);
}

}  // namespace
}  // namespace henon

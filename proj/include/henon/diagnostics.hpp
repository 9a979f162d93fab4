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

#ifndef HENON_DIAGNOSTICS_HPP
#define HENON_DIAGNOSTICS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "henon/datasets.hpp"
#include "henon/layers.hpp"
#include "henon/oracles.hpp"

namespace henon {

enum class DiagnosticStatus { Pass, Fail, NotApplicable };
std::string to_string(DiagnosticStatus s);

struct DiagnosticCase {
  std::size_t index = 0;
  double h = 0.0;
  std::optional<double> t;
  Vec x;
  double residual = 0.0;
};

struct DiagnosticReport {
  std::string name;
  double max_residual = 0.0;
  double threshold = 0.0;
  DiagnosticStatus status = DiagnosticStatus::Pass;
  std::vector<DiagnosticCase> cases;

  bool passed() const { return status == DiagnosticStatus::Pass; }
};

/// A map under certification together with the inputs it accepts.
struct MapUnderTest {
  PhaseMap map;
  int d = 1;
  bool time_adaptive = true;
  bool non_autonomous = false;
};

/// Wraps a network; the returned object refers to `net`, which must outlive it.
MapUnderTest describe(const HenonArchitecture& net);

/// Produces the map for one case; used to certify a fresh network per case.
using MapFactory = std::function<MapUnderTest(Rng& rng)>;

/// Where certification cases are drawn from: h, every phase coordinate and t
/// independently uniform.
struct CaseBox {
  Range h{0.0, 0.5};
  Range x{-1.5, 1.5};
  Range t{0.0, 16.0};
};

/// Canonical structure matrix [[0, I], [-I, 0]].
Mat structure_matrix(int d);
/// max |D^T J D - J|.
double symplectic_residual(const Mat& jacobian);

inline constexpr double kSymplecticThreshold = 1e-6;
inline constexpr double kIdentityThreshold = 1e-12;
inline constexpr double kSeparableThreshold = 1e-4;

/// Residual of D^T J D = J with D the central-difference Jacobian.
DiagnosticReport certify_symplectic(const MapUnderTest& m, int n_cases, std::uint64_t seed,
                                    const CaseBox& box = {}, double fd_step = kDefaultFdStep);
DiagnosticReport certify_symplectic(const MapFactory& make, int n_cases, std::uint64_t seed,
                                    const CaseBox& box = {}, double fd_step = kDefaultFdStep);

/// max |psi(0, x) - x|; NotApplicable for maps without a step input.
DiagnosticReport certify_identity_at_zero(const MapUnderTest& m, int n_cases, std::uint64_t seed,
                                          const CaseBox& box = {});
DiagnosticReport certify_identity_at_zero(const MapFactory& make, int n_cases, std::uint64_t seed,
                                          const CaseBox& box = {});

/// Cross-dependence of the induced field f = d/dh psi(0, x): the largest of
/// |df_p/dp| and |df_q/dq|. Finite-difference error model: O(h_step^2)
/// + O(eps / h_step) in f, divided by x_step for the cross derivative.
struct SeparabilitySteps {
  double h_step = 1e-5;
  double x_step = 1e-4;
};

DiagnosticReport certify_separable_field(const MapUnderTest& m, int n_cases, std::uint64_t seed,
                                         const CaseBox& box = {}, SeparabilitySteps steps = {});
DiagnosticReport certify_separable_field(const MapFactory& make, int n_cases, std::uint64_t seed,
                                         const CaseBox& box = {}, SeparabilitySteps steps = {});

/// Network with initialized potentials plus random biases and shifts drawn
/// from U(-0.5, 0.5), so every parameter class is exercised.
HenonArchitecture random_architecture(Variant variant, int d, int num_layers, int width, Rng& rng);

/// g_tau(p, q) = (p - tau grad V(q), q + tau grad K(p - tau grad V(q))).
PhaseState symplectic_euler_step(const SeparableSystem& sys, double tau, const PhaseState& x);

/// The same step realized as four step-scaled Henon-like maps
/// (p, q) -> (tau grad V_i(p) - q, p) with V_1 = 0, V_2(x) = -V(-x),
/// V_3(x) = -K(-x), V_4 = 0.
PhaseState henon_composition_step(const SeparableSystem& sys, double tau, const PhaseState& x);

struct CompositionRow {
  int m = 0;
  double error = 0.0;
  /// error(previous m) / error(m); absent for the first row.
  std::optional<double> ratio;
};

/// For each m, m applications of henon_composition_step with tau = h/m,
/// compared (max norm) to stormer_verlet_6 with `reference_substeps`.
std::vector<CompositionRow> constructive_composition_error(const SeparableSystem& sys, double h,
                                                           const PhaseState& x,
                                                           const std::vector<int>& m_list,
                                                           int reference_substeps = 100);

/// Least-squares floor for fitting a separable field (f_p(q), f_q(p)) to
/// J^{-1} A x over a cell-centred grid with grid_n points per coordinate.
/// Returns the mean over grid points of the squared 2-norm residual.
double separable_floor(const LinearSystem& sys, const std::vector<Range>& phase_box, int grid_n);

struct RolloutRow {
  int step = 0;
  double t = 0.0;
  double rel_err = 0.0;
  /// True when the reference state is zero and rel_err holds the absolute error.
  bool absolute = false;
};

/// Iterates the model with the trajectory's fixed h (threading t for
/// non-autonomous trajectories) and compares with states[1..k].
std::vector<RolloutRow> rollout_error(const PhaseMap& model, const TestTrajectory& traj);
/// Throws std::invalid_argument for a NAT network on an autonomous trajectory.
std::vector<RolloutRow> rollout_error(const HenonArchitecture& net, const TestTrajectory& traj);

double max_rel_error(const std::vector<RolloutRow>& rows);

void write_report_csv(const std::vector<DiagnosticReport>& reports, const std::filesystem::path& path);
void write_rollout_csv(const std::vector<RolloutRow>& rows, const std::filesystem::path& path);
void write_composition_csv(const std::vector<CompositionRow>& rows, const std::filesystem::path& path);
void print_summary(const std::vector<DiagnosticReport>& reports, std::ostream& out);

}  // namespace henon

#endif  // HENON_DIAGNOSTICS_HPP

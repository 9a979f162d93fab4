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

#include "henon/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

namespace henon {

std::string to_string(DiagnosticStatus s) {
  switch (s) {
    case DiagnosticStatus::Pass:
      return "pass";
    case DiagnosticStatus::Fail:
      return "fail";
    case DiagnosticStatus::NotApplicable:
      return "not applicable";
  }
  return "fail";
}

MapUnderTest describe(const HenonArchitecture& net) {
  return {as_phase_map(net), net.d(), is_time_adaptive(net.variant()),
          net.variant() == Variant::NAT};
}

Mat structure_matrix(int d) {
  Mat J = Mat::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d) = Mat::Identity(d, d);
  J.bottomLeftCorner(d, d) = -Mat::Identity(d, d);
  return J;
}

double symplectic_residual(const Mat& jacobian) {
  const int d = static_cast<int>(jacobian.rows() / 2);
  const Mat J = structure_matrix(d);
  return (jacobian.transpose() * J * jacobian - J).cwiseAbs().maxCoeff();
}

namespace {

DiagnosticCase draw_case(Rng& rng, const MapUnderTest& m, const CaseBox& box, std::size_t index) {
  DiagnosticCase c;
  c.index = index;
  c.h = m.time_adaptive ? rng.uniform(box.h.lo, box.h.hi) : 0.0;
  c.x.resize(2 * m.d);
  for (int i = 0; i < 2 * m.d; ++i) c.x(i) = rng.uniform(box.x.lo, box.x.hi);
  if (m.non_autonomous) c.t = rng.uniform(box.t.lo, box.t.hi);
  return c;
}

using CaseFn = std::function<double(const MapUnderTest&, DiagnosticCase&)>;

DiagnosticReport run_cases(const std::string& name, double threshold, int n_cases,
                           std::uint64_t seed, const MapFactory& make, const CaseBox& box,
                           const CaseFn& residual) {
  if (n_cases < 1) throw std::invalid_argument(name + ": n_cases must be >= 1");
  DiagnosticReport report;
  report.name = name;
  report.threshold = threshold;
  Rng rng(seed);
  for (int i = 0; i < n_cases; ++i) {
    const MapUnderTest m = make(rng);
    DiagnosticCase c = draw_case(rng, m, box, static_cast<std::size_t>(i));
    c.residual = residual(m, c);
    report.cases.push_back(c);
  }
  report.max_residual = 0.0;
  bool finite = true;
  for (const auto& c : report.cases) {
    finite = finite && std::isfinite(c.residual);
    report.max_residual = std::max(report.max_residual, c.residual);
  }
  if (!finite) report.max_residual = std::numeric_limits<double>::infinity();
  report.status = report.max_residual <= threshold ? DiagnosticStatus::Pass : DiagnosticStatus::Fail;
  return report;
}

MapFactory fixed(const MapUnderTest& m) {
  return [m](Rng&) { return m; };
}

double symplectic_case(const MapUnderTest& m, DiagnosticCase& c, double fd_step) {
  const PhaseState x = PhaseState::from_stacked(c.x, c.t);
  return symplectic_residual(jacobian_fd(m.map, c.h, x, fd_step));
}

double identity_case(const MapUnderTest& m, DiagnosticCase& c) {
  c.h = 0.0;
  const PhaseState x = PhaseState::from_stacked(c.x, c.t);
  const PhaseState y = m.map(0.0, x);
  double r = (y.stacked() - c.x).cwiseAbs().maxCoeff();
  if (m.non_autonomous) r = std::max(r, std::abs(y.t.value_or(NAN) - *c.t));
  return r;
}

double separable_case(const MapUnderTest& m, DiagnosticCase& c, SeparabilitySteps steps) {
  c.h = 0.0;
  const int d = m.d;
  double worst = 0.0;
  for (int j = 0; j < 2 * d; ++j) {
    Vec plus = c.x;
    Vec minus = c.x;
    plus(j) += steps.x_step;
    minus(j) -= steps.x_step;
    const Vec f_plus = induced_vector_field(m.map, PhaseState::from_stacked(plus, c.t), steps.h_step);
    const Vec f_minus =
        induced_vector_field(m.map, PhaseState::from_stacked(minus, c.t), steps.h_step);
    const Vec df = (f_plus - f_minus) / (2.0 * steps.x_step);
    // p-coordinates must not move f_p, q-coordinates must not move f_q.
    const Vec cross = j < d ? Vec(df.head(d)) : Vec(df.tail(d));
    worst = std::max(worst, cross.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

DiagnosticReport certify_symplectic(const MapFactory& make, int n_cases, std::uint64_t seed,
                                    const CaseBox& box, double fd_step) {
  return run_cases("symplectic", kSymplecticThreshold, n_cases, seed, make, box,
                   [fd_step](const MapUnderTest& m, DiagnosticCase& c) {
                     return symplectic_case(m, c, fd_step);
                   });
}

DiagnosticReport certify_symplectic(const MapUnderTest& m, int n_cases, std::uint64_t seed,
                                    const CaseBox& box, double fd_step) {
  return certify_symplectic(fixed(m), n_cases, seed, box, fd_step);
}

DiagnosticReport certify_identity_at_zero(const MapFactory& make, int n_cases, std::uint64_t seed,
                                          const CaseBox& box) {
  Rng probe(seed);
  if (!make(probe).time_adaptive) {
    DiagnosticReport report;
    report.name = "identity_at_zero";
    report.threshold = kIdentityThreshold;
    report.status = DiagnosticStatus::NotApplicable;
    return report;
  }
  return run_cases("identity_at_zero", kIdentityThreshold, n_cases, seed, make, box, identity_case);
}

DiagnosticReport certify_identity_at_zero(const MapUnderTest& m, int n_cases, std::uint64_t seed,
                                          const CaseBox& box) {
  return certify_identity_at_zero(fixed(m), n_cases, seed, box);
}

DiagnosticReport certify_separable_field(const MapFactory& make, int n_cases, std::uint64_t seed,
                                         const CaseBox& box, SeparabilitySteps steps) {
  Rng probe(seed);
  if (!make(probe).time_adaptive) {
    DiagnosticReport report;
    report.name = "separable_field";
    report.threshold = kSeparableThreshold;
    report.status = DiagnosticStatus::NotApplicable;
    return report;
  }
  return run_cases("separable_field", kSeparableThreshold, n_cases, seed, make, box,
                   [steps](const MapUnderTest& m, DiagnosticCase& c) {
                     return separable_case(m, c, steps);
                   });
}

DiagnosticReport certify_separable_field(const MapUnderTest& m, int n_cases, std::uint64_t seed,
                                         const CaseBox& box, SeparabilitySteps steps) {
  return certify_separable_field(fixed(m), n_cases, seed, box, steps);
}

HenonArchitecture random_architecture(Variant variant, int d, int num_layers, int width, Rng& rng) {
  HenonArchitecture net = HenonArchitecture::initialized(variant, d, num_layers, width, rng);
  for (auto& layer : net.layers()) {
    for (Eigen::Index j = 0; j < layer.potential.b().size(); ++j) {
      layer.potential.b()(j) = rng.uniform(-0.5, 0.5);
    }
    for (Eigen::Index j = 0; j < layer.eta_p.size(); ++j) layer.eta_p(j) = rng.uniform(-0.5, 0.5);
    for (Eigen::Index j = 0; j < layer.eta_q.size(); ++j) layer.eta_q(j) = rng.uniform(-0.5, 0.5);
  }
  return net;
}

PhaseState symplectic_euler_step(const SeparableSystem& sys, double tau, const PhaseState& x) {
  PhaseState y = x;
  y.p = x.p - tau * sys.grad_V(x.q);
  y.q = x.q + tau * sys.grad_K(y.p);
  return y;
}

PhaseState henon_composition_step(const SeparableSystem& sys, double tau, const PhaseState& x) {
  using Grad = std::function<Vec(const Vec&)>;
  const Grad zero = [](const Vec& v) -> Vec { return Vec::Zero(v.size()); };
  const Grad grad_v2 = [&sys](const Vec& v) -> Vec { return sys.grad_V(-v); };
  const Grad grad_v3 = [&sys](const Vec& v) -> Vec { return sys.grad_K(-v); };
  PhaseState y = x;
  for (const Grad* g : {&zero, &grad_v2, &grad_v3, &zero}) {
    Vec p_next = tau * (*g)(y.p) - y.q;
    y.q = y.p;
    y.p = std::move(p_next);
  }
  return y;
}

std::vector<CompositionRow> constructive_composition_error(const SeparableSystem& sys, double h,
                                                           const PhaseState& x,
                                                           const std::vector<int>& m_list,
                                                           int reference_substeps) {
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    if (m_list[i] < 1 || (i > 0 && m_list[i] <= m_list[i - 1])) {
      throw std::invalid_argument("m_list must be ascending positive integers");
    }
  }
  const Vec reference = stormer_verlet_6(sys, h, x, reference_substeps).stacked();
  std::vector<CompositionRow> rows;
  for (int m : m_list) {
    PhaseState y = x;
    const double tau = h / m;
    for (int i = 0; i < m; ++i) y = henon_composition_step(sys, tau, y);
    CompositionRow row;
    row.m = m;
    row.error = (y.stacked() - reference).cwiseAbs().maxCoeff();
    if (!rows.empty()) row.ratio = rows.back().error / row.error;
    rows.push_back(row);
  }
  return rows;
}

// The best f_p(q) in least squares is the mean of the true f_p over the
// p-coordinates at fixed q (and symmetrically for f_q), so the floor is the
// within-group variance summed over components.
double separable_floor(const LinearSystem& sys, const std::vector<Range>& phase_box, int grid_n) {
  const int d = sys.d();
  if (static_cast<int>(phase_box.size()) != 2 * d) {
    throw std::invalid_argument("separable_floor: phase_box must have 2d ranges");
  }
  if (grid_n < 1) throw std::invalid_argument("separable_floor: grid_n must be >= 1");
  const int dims = 2 * d;
  long long n_points = 1;
  for (int i = 0; i < dims; ++i) n_points *= grid_n;

  auto coordinate = [&](int dim, int idx) {
    const Range& r = phase_box[static_cast<std::size_t>(dim)];
    return r.lo + (r.hi - r.lo) * (idx + 0.5) / grid_n;
  };
  auto decode = [&](long long flat, std::vector<int>& idx) {
    for (int i = 0; i < dims; ++i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(flat % grid_n);
      flat /= grid_n;
    }
  };
  // Group key: the multi-index of the q-block (for f_p) or of the p-block (for f_q).
  auto key = [&](const std::vector<int>& idx, int first) {
    long long k = 0;
    for (int i = first + d - 1; i >= first; --i) k = k * grid_n + idx[static_cast<std::size_t>(i)];
    return k;
  };

  const Mat jinv_a = inverse_structure_matrix(d) * sys.A;
  std::map<long long, Vec> sum_fp_by_q;
  std::map<long long, Vec> sum_fq_by_p;
  std::map<long long, long long> count_by_q;
  std::map<long long, long long> count_by_p;
  std::vector<int> idx(static_cast<std::size_t>(dims));
  Vec x(dims);

  auto field_at = [&](long long flat) {
    decode(flat, idx);
    for (int i = 0; i < dims; ++i) x(i) = coordinate(i, idx[static_cast<std::size_t>(i)]);
    return Vec(jinv_a * x);
  };

  for (long long flat = 0; flat < n_points; ++flat) {
    const Vec f = field_at(flat);
    const long long kq = key(idx, d);
    const long long kp = key(idx, 0);
    auto [itq, newq] = sum_fp_by_q.try_emplace(kq, Vec::Zero(d));
    itq->second += f.head(d);
    count_by_q[kq] += 1;
    auto [itp, newp] = sum_fq_by_p.try_emplace(kp, Vec::Zero(d));
    itp->second += f.tail(d);
    count_by_p[kp] += 1;
  }

  double total = 0.0;
  for (long long flat = 0; flat < n_points; ++flat) {
    const Vec f = field_at(flat);
    const long long kq = key(idx, d);
    const long long kp = key(idx, 0);
    const Vec fit_p = sum_fp_by_q[kq] / static_cast<double>(count_by_q[kq]);
    const Vec fit_q = sum_fq_by_p[kp] / static_cast<double>(count_by_p[kp]);
    total += (f.head(d) - fit_p).squaredNorm() + (f.tail(d) - fit_q).squaredNorm();
  }
  return total / static_cast<double>(n_points);
}

std::vector<RolloutRow> rollout_error(const PhaseMap& model, const TestTrajectory& traj) {
  if (traj.states.size() != static_cast<std::size_t>(traj.k) + 1) {
    throw std::invalid_argument("trajectory must hold k + 1 states");
  }
  std::vector<RolloutRow> rows;
  PhaseState state = traj.states.front();
  if (traj.t0) state.t = *traj.t0;
  for (int i = 1; i <= traj.k; ++i) {
    state = model(traj.h, state);
    if (traj.t0) state.t = traj.time_at(i);
    const PhaseState& ref = traj.states[static_cast<std::size_t>(i)];
    const double err = (state.p - ref.p).squaredNorm() + (state.q - ref.q).squaredNorm();
    const double norm = std::sqrt(ref.p.squaredNorm() + ref.q.squaredNorm());
    RolloutRow row;
    row.step = i;
    row.t = traj.time_at(i);
    row.absolute = norm == 0.0;
    row.rel_err = row.absolute ? std::sqrt(err) : std::sqrt(err) / norm;
    rows.push_back(row);
  }
  return rows;
}

std::vector<RolloutRow> rollout_error(const HenonArchitecture& net, const TestTrajectory& traj) {
  if (net.variant() == Variant::NAT && !traj.non_autonomous()) {
    throw std::invalid_argument("NAT network needs a non-autonomous trajectory");
  }
  if (traj.x0.dim() != net.d()) throw std::invalid_argument("trajectory dimension mismatch");
  return rollout_error(as_phase_map(net), traj);
}

double max_rel_error(const std::vector<RolloutRow>& rows) {
  double worst = 0.0;
  for (const auto& r : rows) {
    if (!std::isfinite(r.rel_err)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, r.rel_err);
  }
  return worst;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_report_csv(const std::vector<DiagnosticReport>& reports, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "diagnostic,status,max_residual,threshold,n_cases\n";
  for (const auto& r : reports) {
    out << r.name << ',' << to_string(r.status) << ',' << g17(r.max_residual) << ','
        << g17(r.threshold) << ',' << r.cases.size() << '\n';
  }
  auto cases_path = path;
  cases_path.replace_filename(path.stem().string() + "_cases.csv");
  auto cases = open_out(cases_path);
  cases << "diagnostic,case,h,t,residual\n";
  for (const auto& r : reports) {
    for (const auto& c : r.cases) {
      cases << r.name << ',' << c.index << ',' << g17(c.h) << ',' << (c.t ? g17(*c.t) : "") << ','
            << g17(c.residual) << '\n';
    }
  }
}

void write_rollout_csv(const std::vector<RolloutRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "step,t,rel_err\n";
  for (const auto& r : rows) out << r.step << ',' << g17(r.t) << ',' << g17(r.rel_err) << '\n';
}

void write_composition_csv(const std::vector<CompositionRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "m,error,ratio\n";
  for (const auto& r : rows) {
    out << r.m << ',' << g17(r.error) << ',' << (r.ratio ? g17(*r.ratio) : "") << '\n';
  }
}

void print_summary(const std::vector<DiagnosticReport>& reports, std::ostream& out) {
  out << "== diagnostics ==\n";
  for (const auto& r : reports) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-18s %-15s max_residual=%.3e threshold=%.1e cases=%zu\n",
                  r.name.c_str(), to_string(r.status).c_str(), r.max_residual, r.threshold,
                  r.cases.size());
    out << line;
  }
}

}  // namespace henon

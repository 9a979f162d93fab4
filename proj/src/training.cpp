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

#include "henon/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "henon/errors.hpp"

namespace henon {

void adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grads) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam_step: parameter and gradient sizes differ");
  }
  if (state.first_moment.size() == 0 && state.step_count == 0) {
    state.first_moment = Eigen::VectorXd::Zero(params.size());
    state.second_moment = Eigen::VectorXd::Zero(params.size());
  }
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    throw std::invalid_argument("adam_step: moment buffers do not match the parameters");
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double g = grads(i);
    state.first_moment(i) = state.beta1 * state.first_moment(i) + (1.0 - state.beta1) * g;
    state.second_moment(i) = state.beta2 * state.second_moment(i) + (1.0 - state.beta2) * g * g;
    const double m_hat = state.first_moment(i) / bc1;
    const double v_hat = state.second_moment(i) / bc2;
    params(i) -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

void check_compatible(const HenonArchitecture& net, const Dataset& data) {
  const bool nat = net.variant() == Variant::NAT;
  for (const auto& s : data.samples) {
    if (s.x.dim() != net.d() || s.y.dim() != net.d()) {
      throw std::invalid_argument("dataset dimension does not match the network");
    }
    if (nat && !s.x.t) throw std::invalid_argument("NAT network needs samples with a time column");
  }
}

namespace {

// Sum of columns [lo, hi) by recursive halving; the split points depend only
// on the range, so the result is independent of evaluation order.
Vec pairwise_column_sum(const Mat& cols, Eigen::Index lo, Eigen::Index hi) {
  if (hi - lo == 1) return cols.col(lo);
  const Eigen::Index mid = lo + (hi - lo) / 2;
  return pairwise_column_sum(cols, lo, mid) + pairwise_column_sum(cols, mid, hi);
}

double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

void zero(NetGradient& g) {
  for (auto& l : g.layers) {
    l.potential.dK.setZero();
    l.potential.db.setZero();
    l.potential.da.setZero();
    l.eta_p.setZero();
    l.eta_q.setZero();
  }
}

}  // namespace

LossAndGradient mse_loss(const HenonArchitecture& net, const Dataset& data) {
  check_compatible(net, data);
  if (data.samples.empty()) throw std::invalid_argument("mse_loss: empty dataset");
  const auto n = data.samples.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto n_params = static_cast<Eigen::Index>(parameter_count(net));

  ForwardTape tape;
  NetGradient grad = NetGradient::zeros(net);
  Mat per_sample(n_params, static_cast<Eigen::Index>(n));
  std::vector<double> terms(n);
  Vec residual(2 * net.d());

  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = data.samples[i];
    const PhaseState out = forward_with_tape(net, s.h, s.x, tape);
    residual << out.p - s.y.p, out.q - s.y.q;
    terms[i] = residual.squaredNorm();
    zero(grad);
    backward_accumulate(net, s.h, tape, (2.0 * inv_n) * residual, grad);
    per_sample.col(static_cast<Eigen::Index>(i)) = flatten_gradient(grad);
  }
  return {pairwise_sum(terms, 0, n) * inv_n,
          pairwise_column_sum(per_sample, 0, static_cast<Eigen::Index>(n))};
}

double mse_value(const HenonArchitecture& net, const Dataset& data) {
  check_compatible(net, data);
  if (data.samples.empty()) throw std::invalid_argument("mse_value: empty dataset");
  std::vector<double> terms;
  terms.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    const PhaseState out = forward(net, s.h, s.x);
    terms.push_back((out.p - s.y.p).squaredNorm() + (out.q - s.y.q).squaredNorm());
  }
  return pairwise_sum(terms, 0, terms.size()) / static_cast<double>(terms.size());
}

std::vector<double> fit(HenonArchitecture& net, const Dataset& data, AdamState& optimizer,
                        int epochs,
                        const std::function<void(int, const HenonArchitecture&, const AdamState&)>&
                            on_epoch) {
  std::vector<double> losses;
  losses.reserve(static_cast<std::size_t>(std::max(epochs, 0)));
  Vec params = flatten_parameters(net);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const LossAndGradient lg = mse_loss(net, data);
    if (!std::isfinite(lg.loss) || !lg.gradient.allFinite()) {
      throw NumericalAbort("non-finite loss at epoch " + std::to_string(epoch) +
                           " (parameter norm " + std::to_string(params.norm()) + ")");
    }
    losses.push_back(lg.loss);
    adam_step(optimizer, params, lg.gradient);
    assign_parameters(net, params);
    if (on_epoch) on_epoch(epoch + 1, net, optimizer);
  }
  return losses;
}

HenonArchitecture initial_network(const ExperimentConfig& cfg) {
  Rng rng(cfg.init_seed);
  return HenonArchitecture::initialized(cfg.architecture.variant, cfg.sampling.d(),
                                        cfg.architecture.layers, cfg.architecture.width, rng,
                                        cfg.architecture.activation);
}

Dataset training_data(const ExperimentConfig& cfg) {
  Dataset data = generate(cfg.sampling);
  return data;
}

TestTrajectory evaluation_trajectory(const ExperimentConfig& cfg) {
  const int d = cfg.sampling.d();
  Vec x0 = Eigen::Map<const Vec>(cfg.test.x0.data(), static_cast<Eigen::Index>(cfg.test.x0.size()));
  return test_trajectory(cfg.sampling.oracle, PhaseState::from_stacked(x0.head(2 * d)), cfg.test.h,
                         cfg.test.k, cfg.test.t0);
}

namespace {

void write_loss_log(const std::filesystem::path& path, const std::vector<double>& losses,
                    std::int64_t first_epoch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < losses.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g\n",
                  static_cast<long long>(first_epoch + static_cast<std::int64_t>(i)), losses[i]);
    out << buf;
  }
}

}  // namespace

TrainReport train(const ExperimentConfig& cfg, const TrainOptions& options) {
  cfg.validate();
  const int epochs = options.epochs_override.value_or(cfg.optimizer.epochs);
  if (epochs < 0) throw ConfigError("epochs: must be >= 0");

  const Dataset data = training_data(cfg);
  HenonArchitecture net = initial_network(cfg);
  AdamState optimizer;
  optimizer.learning_rate = cfg.optimizer.learning_rate;
  optimizer.beta1 = cfg.optimizer.beta1;
  optimizer.beta2 = cfg.optimizer.beta2;
  optimizer.epsilon = cfg.optimizer.epsilon;

  if (options.resume_from) {
    Checkpoint ck = load_checkpoint(*options.resume_from);
    if (ck.net.variant() != net.variant() || parameter_count(ck.net) != parameter_count(net)) {
      throw ConfigError("resume: checkpoint architecture does not match the config");
    }
    net = std::move(ck.net);
    if (ck.optimizer) {
      optimizer = *ck.optimizer;
      optimizer.learning_rate = cfg.optimizer.learning_rate;
    }
  }
  check_compatible(net, data);

  const std::filesystem::path dir = cfg.output_dir;
  if (options.write_artifacts) {
    std::filesystem::create_directories(dir);
    save_dataset(data, dir / "dataset.csv");
    save_trajectory(evaluation_trajectory(cfg), dir / "trajectory.csv");
    write_json_file(dir / "config.json", config_to_json(cfg));
  }

  const auto start_step = optimizer.step_count;
  const auto t_start = std::chrono::steady_clock::now();
  auto on_epoch = [&](int epoch, const HenonArchitecture& current, const AdamState& opt) {
    if (options.write_artifacts && cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0) {
      save_checkpoint(dir / ("checkpoint_epoch_" + std::to_string(opt.step_count) + ".json"),
                      current, opt);
    }
  };
  TrainReport report;
  report.losses = fit(net, data, optimizer, epochs, on_epoch);
  report.final_loss = mse_value(net, data);
  if (!std::isfinite(report.final_loss)) {
    throw NumericalAbort("non-finite loss after training (parameter norm " +
                         std::to_string(flatten_parameters(net).norm()) + ")");
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  report.config_hash = config_hash(cfg);

  if (options.write_artifacts) {
    report.checkpoint_path = dir / "checkpoint.json";
    save_checkpoint(report.checkpoint_path, net, optimizer);
    write_loss_log(dir / "train_log.csv", report.losses, start_step);
    write_json_file(dir / "train_report.json",
                    {{"config_hash", report.config_hash},
                     {"name", cfg.name},
                     {"variant", to_string(net.variant())},
                     {"parameters", parameter_count(net)},
                     {"epochs", report.losses.size()},
                     {"step_count", optimizer.step_count},
                     {"initial_loss", report.losses.empty() ? report.final_loss : report.losses.front()},
                     {"final_loss", report.final_loss},
                     {"checkpoint", "checkpoint.json"}});
    write_json_file(dir / "timing.json", {{"wall_clock_seconds", report.wall_clock_seconds}});
  }
  return report;
}

}  // namespace henon

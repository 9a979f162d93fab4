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
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "henon/checkpoint.hpp"
#include "henon/diagnostics.hpp"
#include "henon/errors.hpp"
#include "henon/training.hpp"

namespace henon {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "henon_test_training" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset small_dataset(std::size_t n, std::uint64_t seed, bool with_t = false) {
  SampleSpec spec;
  spec.n_samples = n;
  spec.phase_box = {{-1.4, 1.4}, {-1.5, 1.5}};
  spec.h_range = {0.2, 0.5};
  spec.seed = seed;
  if (with_t) {
    spec.oracle = {"forced_oscillator", {}};
    spec.t_range = Range{0.0, 16.0};
  }
  return generate(spec);
}

HenonArchitecture random_net(Variant v, int layers, int width, std::uint64_t seed) {
  Rng rng(seed);
  return random_architecture(v, 1, layers, width, rng);
}

void expect_loss_gradient_matches_fd(HenonArchitecture net, const Dataset& data) {
  const LossAndGradient lg = mse_loss(net, data);
  EXPECT_DOUBLE_EQ(lg.loss, mse_value(net, data));
  const Vec theta = flatten_parameters(net);
  ASSERT_EQ(lg.gradient.size(), theta.size());
  const double step = 1e-6;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Vec tp = theta, tm = theta;
    tp(i) += step;
    tm(i) -= step;
    assign_parameters(net, tp);
    const double fp = mse_value(net, data);
    assign_parameters(net, tm);
    const double fm = mse_value(net, data);
    const double fd = (fp - fm) / (2 * step);
    worst = std::max(worst, std::abs(lg.gradient(i) - fd) / (1.0 + std::abs(fd)));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Training, LossGradientMatchesFiniteDifferences) {
  expect_loss_gradient_matches_fd(random_net(Variant::T, 2, 4, 1), small_dataset(12, 2));
  expect_loss_gradient_matches_fd(random_net(Variant::NaiveT, 2, 4, 3), small_dataset(7, 4));
  expect_loss_gradient_matches_fd(random_net(Variant::NAT, 2, 4, 5), small_dataset(9, 6, true));
}

TEST(Training, SingleSampleLossByHand) {
  const HenonArchitecture net = random_net(Variant::T, 1, 3, 7);
  const Dataset data = small_dataset(1, 8);
  const Sample& s = data.samples[0];
  const double expected = (forward(net, s.h, s.x).stacked() - s.y.stacked()).squaredNorm();
  EXPECT_DOUBLE_EQ(mse_value(net, data), expected);
  expect_loss_gradient_matches_fd(net, data);
}

TEST(Training, ZeroStepDataGivesZeroLossAndGradient) {
  SampleSpec spec;
  spec.n_samples = 10;
  spec.phase_box = {{-1, 1}, {-1, 1}};
  spec.h_range = {0.0, 0.0};
  spec.seed = 9;
  const Dataset data = generate(spec);
  const LossAndGradient lg = mse_loss(random_net(Variant::T, 3, 5, 10), data);
  EXPECT_LE(lg.loss, 1e-28);
  EXPECT_LE(lg.gradient.cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Training, DuplicatingSamplesKeepsLoss) {
  const HenonArchitecture net = random_net(Variant::T, 2, 4, 11);
  Dataset data = small_dataset(10, 12);
  const LossAndGradient once = mse_loss(net, data);
  const std::vector<Sample> copy = data.samples;
  data.samples.insert(data.samples.end(), copy.begin(), copy.end());
  const LossAndGradient twice = mse_loss(net, data);
  EXPECT_NEAR(twice.loss, once.loss, 1e-15 * once.loss);
  EXPECT_LE((twice.gradient - once.gradient).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Training, VariantCompatibility) {
  EXPECT_THROW(mse_loss(random_net(Variant::NAT, 1, 3, 1), small_dataset(3, 1)), std::invalid_argument);
  // Autonomous nets ignore the time column.
  EXPECT_NO_THROW(mse_loss(random_net(Variant::T, 1, 3, 1), small_dataset(3, 1, true)));
}

TEST(Adam, FirstStepIsSignOfGradient) {
  // Exact first step is -lr g / (|g| + eps); within 1e-6 lr of -lr sign(g) once |g| >= 1e-2.
  for (double g : {3.7, -0.05, 1e-2, -250.0, 1e-5}) {
    AdamState st;
    st.learning_rate = 1e-3;
    Vec theta = Vec::Constant(1, 0.5);
    adam_step(st, theta, Vec::Constant(1, g));
    const double delta = theta(0) - 0.5;
    EXPECT_NEAR(delta, -st.learning_rate * g / (std::abs(g) + st.epsilon), 1e-15);
    if (std::abs(g) >= 1e-2) {
      EXPECT_LE(std::abs(delta + st.learning_rate * (g > 0 ? 1 : -1)), 1e-6 * st.learning_rate) << g;
    }
    EXPECT_EQ(st.step_count, 1);
  }
}

TEST(Adam, ZeroGradientLeavesParameters) {
  AdamState st;
  Vec theta = Vec::LinSpaced(4, -1, 1);
  const Vec before = theta;
  for (int i = 0; i < 25; ++i) adam_step(st, theta, Vec::Zero(4));
  EXPECT_EQ(theta, before);
  EXPECT_EQ(st.step_count, 25);
}

TEST(Adam, ScriptedTraceMatchesReferenceTable) {
  // Produced once by an independent scalar script (lr 0.1, default betas).
  const double grads[] = {1.0, -1.0, 0.5, 2.0, -0.25};
  const double theta_ref[] = {-0.09999999900000002, -0.0947368411578948, -0.11220939437527767,
                              -0.16730024292156645, -0.208200291961266};
  const double m_ref[] = {0.09999999999999998, -0.009999999999999995, 0.040999999999999995,
                          0.23689999999999994, 0.18820999999999996};
  const double v_ref[] = {0.0010000000000000009, 0.0019990000000000016, 0.002247001000000002,
                          0.006244753999000006, 0.006301009245001005};
  AdamState st;
  st.learning_rate = 0.1;
  Vec theta = Vec::Zero(1);
  for (int i = 0; i < 5; ++i) {
    adam_step(st, theta, Vec::Constant(1, grads[i]));
    EXPECT_NEAR(theta(0), theta_ref[i], 1e-12) << "step " << i + 1;
    EXPECT_NEAR(st.first_moment(0), m_ref[i], 1e-15);
    EXPECT_NEAR(st.second_moment(0), v_ref[i], 1e-15);
  }
}

TEST(Adam, SizeMismatchThrows) {
  AdamState st;
  Vec theta = Vec::Zero(3);
  EXPECT_THROW(adam_step(st, theta, Vec::Zero(2)), std::invalid_argument);
}

TEST(Training, FitIsDeterministicAndDecreases) {
  const Dataset data = small_dataset(20, 13);
  HenonArchitecture a = random_net(Variant::T, 2, 6, 14), b = a;
  AdamState oa, ob;
  const auto la = fit(a, data, oa, 100);
  const auto lb = fit(b, data, ob, 100);
  ASSERT_EQ(la.size(), 100u);
  EXPECT_EQ(la, lb);
  EXPECT_EQ(flatten_parameters(a), flatten_parameters(b));
  EXPECT_LT(la.back(), la.front());
  for (double l : la) EXPECT_GE(l, 0.0);
}

TEST(Training, NonFiniteLossAborts) {
  Dataset data = small_dataset(4, 15);
  data.samples[2].y.p(0) = std::numeric_limits<double>::quiet_NaN();
  HenonArchitecture net = random_net(Variant::T, 1, 3, 16);
  AdamState opt;
  try {
    fit(net, data, opt, 5);
    FAIL() << "expected NumericalAbort";
  } catch (const NumericalAbort& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

ExperimentConfig tiny_config(const fs::path& dir) {
  ExperimentConfig cfg = preset("pendulum_desk");
  cfg.optimizer.epochs = 30;
  cfg.output_dir = dir;
  return cfg;
}

TEST(Training, ZeroEpochsCheckpointEqualsInitialization) {
  const fs::path dir = scratch("zero");
  ExperimentConfig cfg = tiny_config(dir);
  TrainOptions opt;
  opt.epochs_override = 0;
  const TrainReport r = train(cfg, opt);
  EXPECT_TRUE(r.losses.empty());
  const Checkpoint ck = load_checkpoint(r.checkpoint_path);
  EXPECT_EQ(flatten_parameters(ck.net), flatten_parameters(initial_network(cfg)));
  EXPECT_EQ(slurp(dir / "train_log.csv"), "epoch,loss\n");
}

TEST(Training, ArtifactsAndLogLength) {
  const fs::path dir = scratch("artifacts");
  const TrainReport r = train(tiny_config(dir));
  EXPECT_EQ(r.losses.size(), 30u);
  for (const char* f : {"dataset.csv", "dataset.json", "trajectory.csv", "trajectory.json", "config.json",
                        "checkpoint.json", "train_log.csv", "train_report.json", "timing.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const std::string log = slurp(dir / "train_log.csv");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 31);
  EXPECT_EQ(r.config_hash.size(), 16u);
}

TEST(Training, RepeatedRunsAreBitwiseIdentical) {
  const fs::path a = scratch("repeat_a"), b = scratch("repeat_b");
  ExperimentConfig ca = tiny_config(a), cb = tiny_config(b);
  cb.output_dir = b;
  train(ca);
  train(cb);
  for (const char* f : {"train_log.csv", "checkpoint.json", "dataset.csv", "trajectory.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(slurp(a / "train_report.json"), slurp(b / "train_report.json"));
}

TEST(Training, ResumeContinuesBitwise) {
  const fs::path full = scratch("resume_full"), part = scratch("resume_part");
  ExperimentConfig cfg = tiny_config(full);
  train(cfg);
  ExperimentConfig first = tiny_config(part);
  TrainOptions o1;
  o1.epochs_override = 12;
  train(first, o1);
  TrainOptions o2;
  o2.epochs_override = 18;
  o2.resume_from = part / "checkpoint.json";
  const TrainReport r2 = train(first, o2);
  const Checkpoint a = load_checkpoint(full / "checkpoint.json");
  const Checkpoint b = load_checkpoint(part / "checkpoint.json");
  ASSERT_TRUE(b.optimizer.has_value());
  EXPECT_EQ(b.optimizer->step_count, 30);
  EXPECT_EQ(flatten_parameters(a.net), flatten_parameters(b.net));
  const std::string log = slurp(part / "train_log.csv");
  EXPECT_EQ(log.substr(11, 3), "12,");
  EXPECT_EQ(r2.losses.size(), 18u);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  for (Variant v : {Variant::Original, Variant::NaiveT, Variant::T, Variant::NAT}) {
    const HenonArchitecture net = random_net(v, 3, 5, 17);
    AdamState opt;
    Vec theta = flatten_parameters(net);
    adam_step(opt, theta, Vec::LinSpaced(theta.size(), -1, 1));
    const fs::path path = scratch("ckpt") / (to_string(v) + ".json");
    save_checkpoint(path, net, opt);
    const Checkpoint back = load_checkpoint(path);
    EXPECT_EQ(back.net.variant(), v);
    EXPECT_EQ(flatten_parameters(back.net), flatten_parameters(net));
    ASSERT_TRUE(back.optimizer.has_value());
    EXPECT_EQ(back.optimizer->first_moment, opt.first_moment);
    EXPECT_EQ(back.optimizer->second_moment, opt.second_moment);
    EXPECT_EQ(back.optimizer->step_count, 1);
  }
}

TEST(Checkpoint, FieldNames) {
  const HenonArchitecture net = random_net(Variant::T, 1, 2, 18);
  const nlohmann::json j = architecture_to_json(net);
  EXPECT_EQ(j.at("variant"), "T");
  EXPECT_EQ(j.at("d"), 1);
  const auto& layer = j.at("layers").at(0);
  for (const char* key : {"input_dim", "width", "activation", "K", "b", "a", "eta_p", "eta_q"}) {
    EXPECT_TRUE(layer.contains(key)) << key;
  }
  EXPECT_TRUE(layer.at("K").at(0).is_array());
}

TEST(Checkpoint, MalformedInputs) {
  const fs::path dir = scratch("bad_ckpt");
  fs::create_directories(dir);
  EXPECT_THROW(load_checkpoint(dir / "missing.json"), MissingInputError);
  {
    std::ofstream out(dir / "garbage.json");
    out << "{not json";
  }
  EXPECT_THROW(load_checkpoint(dir / "garbage.json"), FormatError);
  {
    std::ofstream out(dir / "wrong.json");
    out << R"({"variant": "T", "d": 1, "layers": [{"input_dim": 1, "width": 1, "K": [[1]], "b": [0], "a": [1, 2], "eta_p": [0], "eta_q": [0], "activation": "tanh"}]})";
  }
  EXPECT_THROW(load_checkpoint(dir / "wrong.json"), FormatError);
}

}  // namespace
}  // namespace henon

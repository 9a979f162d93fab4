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

#include "henon/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "henon/checkpoint.hpp"
#include "henon/config.hpp"
#include "henon/datasets.hpp"
#include "henon/diagnostics.hpp"
#include "henon/errors.hpp"
#include "henon/training.hpp"

namespace henon {

namespace fs = std::filesystem;

LoadedModel load_model(const fs::path& path) {
  const nlohmann::json j = read_json_file(path);
  const std::string kind = j.value("kind", std::string("network"));
  LoadedModel model;
  try {
    if (kind == "oracle") {
      const SystemSpec sys = system_from_json(j.at("system"));
      model.map = make_oracle(sys);
      model.d = sys.d();
      model.non_autonomous = sys.non_autonomous();
      model.description = "oracle:" + sys.tag;
      return model;
    }
    if (kind == "corrupted") {
      const double scale = j.at("q_scale").get<double>();
      auto net = std::make_shared<HenonArchitecture>(architecture_from_json(j.at("network")));
      model.map = [net, scale](double h, const PhaseState& x) {
        PhaseState y = forward(*net, h, x);
        y.q *= scale;
        return y;
      };
      model.d = net->d();
      model.time_adaptive = is_time_adaptive(net->variant());
      model.non_autonomous = net->variant() == Variant::NAT;
      model.description = "corrupted:" + to_string(net->variant());
      return model;
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (kind != "network" && j.contains("kind")) {
    throw FormatError(path.string() + ": unknown checkpoint kind '" + kind + "'");
  }
  auto net = std::make_shared<HenonArchitecture>(load_checkpoint(path).net);
  model.map = [net](double h, const PhaseState& x) { return forward(*net, h, x); };
  model.d = net->d();
  model.time_adaptive = is_time_adaptive(net->variant());
  model.non_autonomous = net->variant() == Variant::NAT;
  model.description = to_string(net->variant()) + " x" + std::to_string(net->num_layers()) +
                      " layers, " + std::to_string(parameter_count(*net)) + " parameters";
  return model;
}

namespace {

struct ConfigSource {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_config_options(CLI::App* cmd, ConfigSource& src) {
  cmd->add_option("--config", src.config_path, "experiment config (JSON)");
  cmd->add_option("--preset", src.preset_name, "built-in preset instead of --config");
  cmd->add_option("--seed", src.seed, "overrides init_seed");
  cmd->add_option("--out", src.out, "output directory (overrides output_dir)");
}

ExperimentConfig resolve_config(const ConfigSource& src) {
  if (src.config_path.empty() == src.preset_name.empty()) {
    throw ConfigError("exactly one of --config or --preset is required");
  }
  ExperimentConfig cfg = src.config_path.empty() ? preset(src.preset_name) : load_config(src.config_path);
  if (src.seed) cfg.init_seed = *src.seed;
  if (!src.out.empty()) cfg.output_dir = src.out;
  cfg.validate();
  return cfg;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError(what + ": not an integer: '" + s + "'");
  return v;
}

void check_trajectory(const LoadedModel& model, const TestTrajectory& traj) {
  if (model.d != traj.x0.dim()) {
    throw ConfigError("model dimension " + std::to_string(model.d) +
                      " does not match trajectory dimension " + std::to_string(traj.x0.dim()));
  }
  if (model.non_autonomous && !traj.non_autonomous()) {
    throw ConfigError("non-autonomous model needs a trajectory with a start time");
  }
}

int cmd_gen_data(const ConfigSource& src, std::ostream& out) {
  const ExperimentConfig cfg = resolve_config(src);
  const fs::path dir = cfg.output_dir;
  const Dataset data = training_data(cfg);
  save_dataset(data, dir / "dataset.csv");
  save_trajectory(evaluation_trajectory(cfg), dir / "trajectory.csv");
  write_json_file(dir / "config.json", config_to_json(cfg));
  out << "wrote " << data.size() << " samples to " << (dir / "dataset.csv").string() << '\n'
      << "wrote " << (cfg.test.k + 1) << " trajectory states to " << (dir / "trajectory.csv").string()
      << '\n';
  return kExitOk;
}

int cmd_train(const ConfigSource& src, std::optional<int> epochs, const std::string& resume,
              std::ostream& out) {
  const ExperimentConfig cfg = resolve_config(src);
  TrainOptions options;
  options.epochs_override = epochs;
  if (!resume.empty()) options.resume_from = resume;
  const TrainReport report = train(cfg, options);
  const fs::path dir = cfg.output_dir;
  const Checkpoint ck = load_checkpoint(report.checkpoint_path);
  const auto rows = rollout_error(ck.net, evaluation_trajectory(cfg));
  write_rollout_csv(rows, dir / "rollout.csv");
  out << "trained " << cfg.name << " (" << to_string(ck.net.variant()) << ", "
      << parameter_count(ck.net) << " parameters) for " << report.losses.size() << " epochs\n"
      << "  final loss    " << fmt("%.6e", report.final_loss) << '\n'
      << "  max rel. err  " << fmt("%.6e", max_rel_error(rows)) << '\n'
      << "  wall clock    " << fmt("%.2f s", report.wall_clock_seconds) << '\n'
      << "  artifacts in  " << dir.string() << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& trajectory, const std::string& out_path,
             std::ostream& out) {
  const LoadedModel model = load_model(checkpoint);
  const TestTrajectory traj = load_trajectory(trajectory);
  check_trajectory(model, traj);
  const auto rows = rollout_error(model.map, traj);
  const fs::path target = out_path.empty() ? fs::path(checkpoint).parent_path() / "rollout.csv" : fs::path(out_path);
  write_rollout_csv(rows, target);
  const auto flagged = std::count_if(rows.begin(), rows.end(), [](const RolloutRow& r) { return r.absolute; });
  out << model.description << ": max rel. err " << fmt("%.6e", max_rel_error(rows)) << " over "
      << rows.size() << " steps";
  if (flagged > 0) out << " (" << flagged << " steps use absolute error)";
  out << "\nwrote " << target.string() << '\n';
  return kExitOk;
}

struct DiagnoseArgs {
  std::string checkpoint;
  std::string fresh;
  std::uint64_t seed = 1;
  int cases = 100;
  bool composition = false;
  std::string out;
};

int cmd_diagnose(const DiagnoseArgs& args, std::ostream& out) {
  if (args.checkpoint.empty() == args.fresh.empty()) {
    throw ConfigError("diagnose: give a checkpoint or --fresh variant:layers:width:d");
  }
  if (args.cases < 1) throw ConfigError("--cases: must be >= 1");
  MapFactory factory;
  fs::path dir;
  if (!args.fresh.empty()) {
    const auto parts = split(args.fresh, ':');
    if (parts.size() != 4) throw ConfigError("--fresh: expected variant:layers:width:d");
    Variant variant;
    try {
      variant = variant_from_string(parts[0]);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--fresh: ") + e.what());
    }
    const int layers = parse_int(parts[1], "--fresh layers");
    const int width = parse_int(parts[2], "--fresh width");
    const int d = parse_int(parts[3], "--fresh d");
    if (layers < 1 || width < 1 || d < 1) throw ConfigError("--fresh: layers, width and d must be >= 1");
    auto holder = std::make_shared<std::optional<HenonArchitecture>>();
    factory = [=](Rng& rng) {
      holder->emplace(random_architecture(variant, d, layers, width, rng));
      return describe(**holder);
    };
    dir = args.out.empty() ? fs::path("diagnostics") : fs::path(args.out);
    out << "fresh " << to_string(variant) << " networks, " << layers << " layers, width " << width
        << ", d=" << d << '\n';
  } else {
    auto model = std::make_shared<LoadedModel>(load_model(args.checkpoint));
    factory = [model](Rng&) {
      return MapUnderTest{model->map, model->d, model->time_adaptive, model->non_autonomous};
    };
    dir = args.out.empty() ? fs::path(args.checkpoint).parent_path() : fs::path(args.out);
    out << model->description << '\n';
  }

  std::vector<DiagnosticReport> reports;
  reports.push_back(certify_symplectic(factory, args.cases, args.seed));
  reports.push_back(certify_identity_at_zero(factory, args.cases, args.seed));
  reports.push_back(certify_separable_field(factory, args.cases, args.seed));
  bool ok = std::none_of(reports.begin(), reports.end(),
                         [](const DiagnosticReport& r) { return r.status == DiagnosticStatus::Fail; });
  write_report_csv(reports, dir / "diagnostics.csv");
  print_summary(reports, out);

  if (args.composition) {
    PhaseState x;
    x.p = Vec::Constant(1, 1.0);
    x.q = Vec::Zero(1);
    const auto rows = constructive_composition_error(SeparableSystem::pendulum(), 0.5, x, {16, 32, 64, 128});
    write_composition_csv(rows, dir / "composition.csv");
    out << "== constructive composition (pendulum, h=0.5, x=(1,0)) ==\n";
    bool rate_ok = true;
    for (const auto& r : rows) {
      out << "  m=" << r.m << "  error=" << fmt("%.6e", r.error);
      if (r.ratio) {
        out << "  ratio=" << fmt("%.4f", *r.ratio);
        rate_ok = rate_ok && *r.ratio >= 1.6 && *r.ratio <= 2.4;
      }
      out << '\n';
    }
    out << "  rate " << (rate_ok ? "pass" : "fail") << '\n';
    ok = ok && rate_ok;
  }
  out << "wrote " << (dir / "diagnostics.csv").string() << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

// Metrics gathered from one run directory; absent entries are gaps.
struct RunSummary {
  std::optional<double> final_loss;
  std::optional<double> max_rel_err;
  std::optional<std::string> variant;
  std::optional<long long> epochs;
  std::vector<std::pair<std::string, std::string>> diagnostics;
  std::vector<std::string> gaps;
};

std::optional<double> max_rel_err_from_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  std::getline(in, line);
  double worst = 0.0;
  bool any = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 3) throw ParseError(path.string(), lineno, "expected step,t,rel_err");
    double v = 0.0;
    const auto& c = cols[2];
    const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
    if (ec != std::errc() || ptr != c.data() + c.size()) {
      if (c == "inf" || c == "nan" || c == "-nan") {
        v = std::numeric_limits<double>::infinity();
      } else {
        throw ParseError(path.string(), lineno, "bad rel_err '" + c + "'");
      }
    }
    worst = std::max(worst, std::isfinite(v) ? v : std::numeric_limits<double>::infinity());
    any = true;
  }
  return any ? std::optional<double>(worst) : std::nullopt;
}

RunSummary summarize_run(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw MissingInputError("no such run directory: " + dir.string());
  RunSummary s;
  const fs::path report = dir / "train_report.json";
  if (fs::exists(report)) {
    const auto j = read_json_file(report);
    if (j.contains("final_loss")) s.final_loss = j.at("final_loss").get<double>();
    if (j.contains("variant")) s.variant = j.at("variant").get<std::string>();
    if (j.contains("epochs")) s.epochs = j.at("epochs").get<long long>();
  } else {
    s.gaps.push_back("train_report.json (final loss)");
  }
  const fs::path rollout = dir / "rollout.csv";
  if (fs::exists(rollout)) {
    s.max_rel_err = max_rel_err_from_csv(rollout);
  } else if (fs::exists(dir / "checkpoint.json") && fs::exists(dir / "trajectory.csv")) {
    const LoadedModel model = load_model(dir / "checkpoint.json");
    const TestTrajectory traj = load_trajectory(dir / "trajectory.csv");
    check_trajectory(model, traj);
    const auto rows = rollout_error(model.map, traj);
    write_rollout_csv(rows, rollout);
    s.max_rel_err = max_rel_error(rows);
  }
  if (!s.max_rel_err) s.gaps.push_back("rollout.csv (max rel. err)");
  const fs::path diag = dir / "diagnostics.csv";
  std::ifstream in(diag);
  if (in) {
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      const auto cols = split(line, ',');
      if (cols.size() >= 2) s.diagnostics.emplace_back(cols[0], cols[1]);
    }
  } else {
    s.gaps.push_back("diagnostics.csv (run `henon diagnose " + (dir / "checkpoint.json").string() + "`)");
  }
  return s;
}

std::string show(const std::optional<double>& v) { return v ? fmt("%.6e", *v) : "missing"; }

int cmd_report(const std::string& dir_arg, const std::vector<std::string>& compare,
               const std::string& out_path, std::ostream& out) {
  if (!compare.empty()) {
    if (compare.size() != 2) throw ConfigError("--compare takes two run directories");
    const RunSummary a = summarize_run(compare[0]);
    const RunSummary b = summarize_run(compare[1]);
    std::ostringstream csv;
    csv << "metric,a,b,ratio_b_over_a\n";
    auto row = [&](const char* name, const std::optional<double>& va, const std::optional<double>& vb) {
      csv << name << ',' << (va ? fmt("%.17g", *va) : "") << ',' << (vb ? fmt("%.17g", *vb) : "") << ',';
      if (va && vb) csv << fmt("%.17g", *vb / *va);
      csv << '\n';
    };
    row("final_loss", a.final_loss, b.final_loss);
    row("max_rel_err", a.max_rel_err, b.max_rel_err);
    out << "a = " << compare[0] << "\nb = " << compare[1] << '\n' << csv.str();
    if (!out_path.empty()) {
      const fs::path target(out_path);
      if (target.has_parent_path()) fs::create_directories(target.parent_path());
      std::ofstream f(target, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + target.string());
      f << csv.str();
    }
    if (!a.max_rel_err || !b.max_rel_err || !a.final_loss || !b.final_loss) {
      out << "incomplete comparison: a run is missing metrics\n";
      return kExitMissingInput;
    }
    return kExitOk;
  }

  if (dir_arg.empty()) throw ConfigError("report: give a run directory or --compare a b");
  const fs::path dir(dir_arg);
  const RunSummary s = summarize_run(dir);
  out << "== report: " << dir.string() << " ==\n"
      << "  variant       " << s.variant.value_or("missing") << '\n'
      << "  epochs        " << (s.epochs ? std::to_string(*s.epochs) : "missing") << '\n'
      << "  final loss    " << show(s.final_loss) << '\n'
      << "  max rel. err  " << show(s.max_rel_err) << '\n';
  for (const auto& [name, status] : s.diagnostics) out << "  " << name << "  " << status << '\n';
  for (const auto& gap : s.gaps) out << "  gap: " << gap << '\n';

  const fs::path target = out_path.empty() ? dir / "summary.csv" : fs::path(out_path);
  std::ofstream f(target, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + target.string());
  f << "key,value\n";
  f << "variant," << s.variant.value_or("") << '\n';
  f << "epochs," << (s.epochs ? std::to_string(*s.epochs) : "") << '\n';
  f << "final_loss," << (s.final_loss ? fmt("%.17g", *s.final_loss) : "") << '\n';
  f << "max_rel_err," << (s.max_rel_err ? fmt("%.17g", *s.max_rel_err) : "") << '\n';
  for (const auto& [name, status] : s.diagnostics) f << name << ',' << status << '\n';
  for (const auto& gap : s.gaps) f << "gap," << gap << '\n';
  return kExitOk;
}

int cmd_preset(const std::string& name, const std::string& out_path, std::ostream& out) {
  if (name.empty()) {
    for (const auto& n : preset_names()) out << n << '\n';
    return kExitOk;
  }
  const ExperimentConfig cfg = preset(name);
  if (out_path.empty()) {
    out << config_to_json(cfg).dump(2) << '\n';
  } else {
    write_json_file(out_path, config_to_json(cfg));
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Henon network experiments", "henon"};
  app.require_subcommand(1);

  ConfigSource gen_src;
  auto* gen = app.add_subcommand("gen-data", "write the training set and test trajectory");
  add_config_options(gen, gen_src);

  ConfigSource train_src;
  std::optional<int> epochs;
  std::string resume;
  auto* tr = app.add_subcommand("train", "train a network and write its artifacts");
  add_config_options(tr, train_src);
  tr->add_option("--epochs", epochs, "override the configured epoch count");
  tr->add_option("--resume", resume, "continue from a checkpoint with optimizer state");

  std::string eval_ckpt, eval_traj, eval_out;
  auto* ev = app.add_subcommand("eval", "rollout error of a checkpoint on a trajectory");
  ev->add_option("checkpoint", eval_ckpt)->required();
  ev->add_option("trajectory", eval_traj)->required();
  ev->add_option("--out", eval_out, "CSV path (default: rollout.csv next to the checkpoint)");

  DiagnoseArgs diag;
  auto* dg = app.add_subcommand("diagnose", "structural checks on a checkpoint or fresh networks");
  dg->add_option("checkpoint", diag.checkpoint);
  dg->add_option("--fresh", diag.fresh, "variant:layers:width:d");
  dg->add_option("--seed", diag.seed);
  dg->add_option("--cases", diag.cases);
  dg->add_flag("--composition", diag.composition, "also run the constructive composition check");
  dg->add_option("--out", diag.out, "output directory");

  std::string report_dir, report_out;
  std::vector<std::string> compare;
  auto* rp = app.add_subcommand("report", "summarize a run directory");
  rp->add_option("dir", report_dir);
  rp->add_option("--compare", compare, "two run directories")->expected(2);
  rp->add_option("--out", report_out, "CSV path");

  std::string preset_name, preset_out;
  auto* pr = app.add_subcommand("preset", "list presets or print one as JSON");
  pr->add_option("name", preset_name);
  pr->add_option("--out", preset_out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(gen_src, out);
    if (tr->parsed()) return cmd_train(train_src, epochs, resume, out);
    if (ev->parsed()) return cmd_eval(eval_ckpt, eval_traj, eval_out, out);
    if (dg->parsed()) return cmd_diagnose(diag, out);
    if (rp->parsed()) return cmd_report(report_dir, compare, report_out, out);
    if (pr->parsed()) return cmd_preset(preset_name, preset_out, out);
  } catch (const MissingInputError& e) {
    err << "error: missing input: " << e.what() << '\n';
    return kExitMissingInput;
  } catch (const NumericalAbort& e) {
    err << "error: numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace henon

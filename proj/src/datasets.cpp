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

#include "henon/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "henon/checkpoint.hpp"
#include "henon/errors.hpp"
#include "henon/rng.hpp"

namespace henon {

using nlohmann::json;

void SampleSpec::validate() const {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (phase_box.empty() || phase_box.size() % 2 != 0) {
    throw std::invalid_argument("phase_box must list 2d coordinate ranges");
  }
  auto check = [](const Range& r, const std::string& name) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) {
      throw std::invalid_argument(name + " must be finite");
    }
    if (r.lo > r.hi) throw std::invalid_argument(name + " has lo > hi");
  };
  for (std::size_t i = 0; i < phase_box.size(); ++i) {
    check(phase_box[i], "phase_box[" + std::to_string(i) + "]");
  }
  check(h_range, "h_range");
  if (t_range) check(*t_range, "t_range");
  validate_system(oracle);
  if (oracle.non_autonomous() != t_range.has_value()) {
    throw std::invalid_argument(oracle.non_autonomous()
                                    ? "t_range is required for a non-autonomous system"
                                    : "t_range is only allowed for a non-autonomous system");
  }
  if (d() != oracle.d()) throw std::invalid_argument("phase_box dimension does not match the system");
}

Dataset generate(const SampleSpec& spec) {
  spec.validate();
  const int d = spec.d();
  const PhaseMap oracle = make_oracle(spec.oracle);
  Rng rng(spec.seed);
  Dataset data;
  data.spec = spec;
  data.samples.reserve(spec.n_samples);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    Sample s;
    s.x.p.resize(d);
    s.x.q.resize(d);
    for (int c = 0; c < d; ++c) s.x.p(c) = rng.uniform(spec.phase_box[c].lo, spec.phase_box[c].hi);
    for (int c = 0; c < d; ++c) {
      s.x.q(c) = rng.uniform(spec.phase_box[d + c].lo, spec.phase_box[d + c].hi);
    }
    if (spec.t_range) s.x.t = rng.uniform(spec.t_range->lo, spec.t_range->hi);
    s.h = rng.uniform(spec.h_range.lo, spec.h_range.hi);
    PhaseState y = oracle(s.h, s.x);
    s.y = PhaseState(std::move(y.p), std::move(y.q));
    data.samples.push_back(std::move(s));
  }
  return data;
}

TestTrajectory test_trajectory(const SystemSpec& system, const PhaseState& x0, double h, int k,
                               std::optional<double> t0) {
  if (k < 1) throw std::invalid_argument("test trajectory needs k >= 1");
  validate_system(system);
  TestTrajectory traj;
  traj.x0 = x0;
  traj.h = h;
  traj.k = k;
  traj.system = system;
  if (system.non_autonomous()) {
    traj.t0 = t0.value_or(0.0);
    traj.x0.t = traj.t0;
  } else {
    traj.x0.t.reset();
  }
  traj.states.reserve(static_cast<std::size_t>(k) + 1);
  traj.states.push_back(traj.x0);
  if (system.tag == "forced_oscillator") {
    const ForcedOscillator sys{system.param("omega0", 1.0), system.param("omega", 2.0),
                               system.param("F0", 1.0)};
    for (int i = 1; i <= k; ++i) {
      if (*traj.t0 == 0.0) {
        traj.states.push_back(forced_oscillator_solution(sys, i * h, x0.p(0), x0.q(0)));
      } else {
        traj.states.push_back(forced_oscillator_flow(sys, i * h, traj.x0));
      }
    }
  } else {
    const PhaseMap oracle = make_oracle(system);
    for (int i = 1; i <= k; ++i) traj.states.push_back(oracle(h, traj.states.back()));
  }
  return traj;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

json system_to_json(const SystemSpec& spec) {
  json params = json::object();
  for (const auto& [k, v] : spec.params) params[k] = v;
  return {{"tag", spec.tag}, {"params", params}};
}

SystemSpec system_from_json(const json& j) {
  SystemSpec spec;
  if (!j.is_object() || !j.contains("tag") || !j.at("tag").is_string()) {
    throw FormatError("system: field 'tag' must be a string");
  }
  spec.tag = j.at("tag").get<std::string>();
  if (j.contains("params")) {
    const json& params = j.at("params");
    if (!params.is_object()) throw FormatError("system: field 'params' must be an object");
    for (const auto& [k, v] : params.items()) {
      if (v.is_boolean()) {
        spec.params[k] = v.get<bool>() ? 1.0 : 0.0;
      } else if (v.is_number()) {
        spec.params[k] = v.get<double>();
      } else {
        throw FormatError("system: parameter '" + k + "' must be a number");
      }
    }
  }
  return spec;
}

namespace {

json range_to_json(const Range& r) { return json::array({r.lo, r.hi}); }

Range range_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FormatError("field '" + field + "' must be [lo, hi]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

const json& require(const json& j, const char* field, const std::string& ctx) {
  if (!j.is_object() || !j.contains(field)) {
    throw FormatError(ctx + ": missing field '" + field + "'");
  }
  return j.at(field);
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> coordinate_names(const std::string& prefix, int d) {
  std::vector<std::string> names;
  if (d == 1) return {prefix};
  for (int i = 1; i <= d; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out;
}

std::vector<std::string> dataset_columns(int d, bool with_t) {
  std::vector<std::string> cols = coordinate_names("p", d);
  for (auto& c : coordinate_names("q", d)) cols.push_back(c);
  if (with_t) cols.push_back("t");
  cols.push_back("h");
  for (auto& c : coordinate_names("label_p", d)) cols.push_back(c);
  for (auto& c : coordinate_names("label_q", d)) cols.push_back(c);
  return cols;
}

std::vector<std::string> trajectory_columns(int d) {
  std::vector<std::string> cols{"step", "t"};
  for (auto& c : coordinate_names("p", d)) cols.push_back(c);
  for (auto& c : coordinate_names("q", d)) cols.push_back(c);
  return cols;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::string& file, std::size_t line) {
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || !std::isfinite(x)) {
    throw ParseError(file, line, "'" + s + "' is not a finite number");
  }
  return x;
}

/// Header plus numeric rows of a CSV file with exactly the expected columns.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open " + path.string());
  const std::string file = path.string();
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw FormatError(file + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split(line) != expected_header) {
    throw ParseError(file, lineno, "expected header '" + join(expected_header) + "'");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != expected_header.size()) {
      throw ParseError(file, lineno, "expected " + std::to_string(expected_header.size()) +
                                         " columns, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, file, lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(file + ": no data rows");
  return rows;
}

std::string first_line(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

json sample_spec_to_json(const SampleSpec& spec) {
  json box = json::array();
  for (const auto& r : spec.phase_box) box.push_back(range_to_json(r));
  return {{"n_samples", spec.n_samples},
          {"phase_box", box},
          {"h_range", range_to_json(spec.h_range)},
          {"t_range", spec.t_range ? range_to_json(*spec.t_range) : json(nullptr)},
          {"seed", spec.seed},
          {"oracle", system_to_json(spec.oracle)}};
}

SampleSpec sample_spec_from_json(const json& j) {
  const std::string ctx = "sampling";
  SampleSpec spec;
  const json& n = require(j, "n_samples", ctx);
  if (!n.is_number_integer() || n.get<long long>() < 1) {
    throw FormatError("field 'n_samples' must be a positive integer");
  }
  spec.n_samples = n.get<std::size_t>();
  const json& box = require(j, "phase_box", ctx);
  if (!box.is_array()) throw FormatError("field 'phase_box' must be an array of [lo, hi]");
  for (std::size_t i = 0; i < box.size(); ++i) {
    spec.phase_box.push_back(range_from_json(box[i], "phase_box[" + std::to_string(i) + "]"));
  }
  spec.h_range = range_from_json(require(j, "h_range", ctx), "h_range");
  if (j.contains("t_range") && !j.at("t_range").is_null()) {
    spec.t_range = range_from_json(j.at("t_range"), "t_range");
  }
  const json& seed = require(j, "seed", ctx);
  if (!seed.is_number_unsigned()) throw FormatError("field 'seed' must be a non-negative integer");
  spec.seed = seed.get<std::uint64_t>();
  spec.oracle = system_from_json(require(j, "oracle", ctx));
  return spec;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  const int d = data.spec.d() > 0 ? data.spec.d() : (data.samples.empty() ? 1 : data.samples[0].x.dim());
  const bool with_t = data.non_autonomous();
  std::string text = join(dataset_columns(d, with_t)) + "\n";
  for (const auto& s : data.samples) {
    std::vector<std::string> row;
    for (int c = 0; c < d; ++c) row.push_back(fmt17(s.x.p(c)));
    for (int c = 0; c < d; ++c) row.push_back(fmt17(s.x.q(c)));
    if (with_t) row.push_back(fmt17(s.x.t.value_or(0.0)));
    row.push_back(fmt17(s.h));
    for (int c = 0; c < d; ++c) row.push_back(fmt17(s.y.p(c)));
    for (int c = 0; c < d; ++c) row.push_back(fmt17(s.y.q(c)));
    text += join(row) + "\n";
  }
  write_text(path, text);
  json meta = {{"kind", "dataset"}, {"d", d}, {"spec", sample_spec_to_json(data.spec)}};
  write_json_file(sidecar_path(path), meta);
}

Dataset load_dataset(const std::filesystem::path& path) {
  Dataset data;
  const auto meta_path = sidecar_path(path);
  int d = 1;
  bool with_t = false;
  if (std::filesystem::exists(meta_path)) {
    const json meta = read_json_file(meta_path);
    data.spec = sample_spec_from_json(require(meta, "spec", meta_path.string()));
    d = data.spec.d();
    with_t = data.spec.t_range.has_value();
  } else {
    const auto header = split(first_line(path));
    with_t = std::find(header.begin(), header.end(), "t") != header.end();
    const std::size_t coord_cols = header.size() - (with_t ? 2 : 1);
    d = static_cast<int>(std::max<std::size_t>(1, coord_cols / 4));
    data.spec.phase_box.assign(static_cast<std::size_t>(2 * d), Range{});
    if (with_t) {
      data.spec.t_range = Range{};
      data.spec.oracle.tag = "forced_oscillator";
    }
  }
  const auto rows = read_csv(path, dataset_columns(d, with_t));
  data.spec.n_samples = rows.size();
  for (const auto& row : rows) {
    Sample s;
    std::size_t c = 0;
    s.x.p.resize(d);
    s.x.q.resize(d);
    s.y.p.resize(d);
    s.y.q.resize(d);
    for (int i = 0; i < d; ++i) s.x.p(i) = row[c++];
    for (int i = 0; i < d; ++i) s.x.q(i) = row[c++];
    if (with_t) s.x.t = row[c++];
    s.h = row[c++];
    for (int i = 0; i < d; ++i) s.y.p(i) = row[c++];
    for (int i = 0; i < d; ++i) s.y.q(i) = row[c++];
    data.samples.push_back(std::move(s));
  }
  return data;
}

void save_trajectory(const TestTrajectory& traj, const std::filesystem::path& path) {
  const int d = traj.x0.dim();
  std::string text = join(trajectory_columns(d)) + "\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), fmt17(traj.time_at(static_cast<int>(i)))};
    for (int c = 0; c < d; ++c) row.push_back(fmt17(traj.states[i].p(c)));
    for (int c = 0; c < d; ++c) row.push_back(fmt17(traj.states[i].q(c)));
    text += join(row) + "\n";
  }
  write_text(path, text);
  json meta = {{"kind", "trajectory"},
               {"d", d},
               {"h", traj.h},
               {"k", traj.k},
               {"t0", traj.t0 ? json(*traj.t0) : json(nullptr)},
               {"system", system_to_json(traj.system)}};
  write_json_file(sidecar_path(path), meta);
}

TestTrajectory load_trajectory(const std::filesystem::path& path) {
  const auto meta_path = sidecar_path(path);
  if (!std::filesystem::exists(meta_path)) {
    throw MissingInputError("trajectory metadata " + meta_path.string() + " not found");
  }
  const json meta = read_json_file(meta_path);
  const std::string ctx = meta_path.string();
  TestTrajectory traj;
  const json& jd = require(meta, "d", ctx);
  const json& jk = require(meta, "k", ctx);
  const json& jh = require(meta, "h", ctx);
  if (!jd.is_number_integer() || jd.get<int>() < 1 || !jk.is_number_integer() ||
      jk.get<int>() < 1 || !jh.is_number()) {
    throw FormatError(ctx + ": fields 'd', 'k', 'h' are malformed");
  }
  const int d = jd.get<int>();
  traj.k = jk.get<int>();
  traj.h = jh.get<double>();
  const json& jt0 = require(meta, "t0", ctx);
  if (!jt0.is_null()) {
    if (!jt0.is_number()) throw FormatError(ctx + ": field 't0' must be a number or null");
    traj.t0 = jt0.get<double>();
  }
  traj.system = system_from_json(require(meta, "system", ctx));

  const auto rows = read_csv(path, trajectory_columns(d));
  if (rows.size() != static_cast<std::size_t>(traj.k) + 1) {
    throw FormatError(path.string() + ": expected " + std::to_string(traj.k + 1) + " states, found " +
                      std::to_string(rows.size()));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row[0] != static_cast<double>(i)) {
      throw ParseError(path.string(), i + 2, "step column out of sequence");
    }
    PhaseState s;
    s.p.resize(d);
    s.q.resize(d);
    for (int c = 0; c < d; ++c) s.p(c) = row[2 + c];
    for (int c = 0; c < d; ++c) s.q(c) = row[2 + d + c];
    if (traj.t0) s.t = row[1];
    traj.states.push_back(std::move(s));
  }
  traj.x0 = traj.states.front();
  return traj;
}

}  // namespace henon

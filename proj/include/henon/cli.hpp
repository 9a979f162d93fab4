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

#ifndef HENON_CLI_HPP
#define HENON_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "henon/layers.hpp"

namespace henon {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitMissingInput = 4,
};

/// Runs `henon <args...>` (args excludes the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Anything `eval` and `diagnose` accept as a checkpoint: a trained network,
/// an oracle adapter {"kind": "oracle", "system": {...}}, or a corrupted-map
/// test fixture {"kind": "corrupted", "q_scale": s, "network": {...}}.
struct LoadedModel {
  PhaseMap map;
  int d = 1;
  bool time_adaptive = true;
  bool non_autonomous = false;
  std::string description;
};

LoadedModel load_model(const std::filesystem::path& path);

}  // namespace henon

#endif  // HENON_CLI_HPP

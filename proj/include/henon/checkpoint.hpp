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

#ifndef HENON_CHECKPOINT_HPP
#define HENON_CHECKPOINT_HPP

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "henon/errors.hpp"
#include "henon/layers.hpp"
#include "henon/optimizer.hpp"

namespace henon {

nlohmann::json potential_to_json(const PotentialNet& net);
PotentialNet potential_from_json(const nlohmann::json& j);

nlohmann::json architecture_to_json(const HenonArchitecture& net);
HenonArchitecture architecture_from_json(const nlohmann::json& j);

nlohmann::json adam_to_json(const AdamState& state);
AdamState adam_from_json(const nlohmann::json& j);

struct Checkpoint {
  HenonArchitecture net;
  std::optional<AdamState> optimizer;
};

void save_checkpoint(const std::filesystem::path& path, const HenonArchitecture& net,
                     const std::optional<AdamState>& optimizer = std::nullopt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace henon

#endif  // HENON_CHECKPOINT_HPP

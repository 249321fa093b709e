// Copyright 2026 The sdbmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sdbmc/pipeline.hpp"

namespace sdbmc {

struct ConfigKey {
    std::string name;
    std::string description;
};

/// Every PipelineConfig key, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Sets one key from text. Unknown keys and unparsable values throw InvalidConfig.
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);
/// Current value of a key as text (round-trips through set_config_value).
std::string get_config_value(const PipelineConfig& config, const std::string& key);
std::map<std::string, std::string> config_snapshot(const PipelineConfig& config);

/// `key = value` lines; '#' starts a comment; blank lines are skipped.
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
std::string format_config(const PipelineConfig& config);

}  // namespace sdbmc

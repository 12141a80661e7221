/* Copyright 2026 The spinbath Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinbath/ensemble.hpp"

namespace spinbath::cli {

/// Flat "section.key" -> value view of a key = value config file.
using ConfigValues = std::map<std::string, std::string>;

/// Reads an INI-style file. Throws DataError with the path on I/O or syntax errors.
ConfigValues read_config_file(const std::filesystem::path& path);

/// Everything a command needs to reproduce its outputs.
struct RunConfig {
  std::vector<double> concentrations;  // ppm
  std::size_t n_realizations = 2000;
  std::uint64_t master_seed = 1;
  BoxPolicy box;
  BathOptions bath;
  BathModel model;
  DistributionFitOptions fit;
  std::size_t bootstrap_resamples = 200;
  double confidence = 0.95;
  std::filesystem::path out = "spinbath-out";
  unsigned workers = 1;

  SweepOptions sweep_options() const;
  /// Canonical key = value text; read_config_file on it yields the same config.
  std::string to_ini() const;
  nlohmann::json to_json() const;
};

/// Applies "section.key" values onto `config`. Unknown keys are rejected.
void apply_config(RunConfig& config, const ConfigValues& values);

/// Parses "1,3,10" into a list; throws InvalidArgument on bad items.
std::vector<double> parse_double_list(const std::string& text);

/// "target:500" or "fixed:20" (nm).
BoxPolicy parse_box_policy(const std::string& text);
std::string to_string(const BoxPolicy& box);

/// --workers, else config, else SPINBATH_WORKERS, else 1.
unsigned resolve_worker_count(std::optional<unsigned> flag, std::optional<unsigned> config);

/// Warns for concentrations outside the studied 0.01-1000 ppm span and
/// rejects nonpositive numeric fields.
void validate(const RunConfig& config);

}  // namespace spinbath::cli

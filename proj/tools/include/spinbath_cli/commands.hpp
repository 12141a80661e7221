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

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spinbath_cli/manifest.hpp"
#include "spinbath_cli/run_config.hpp"

namespace spinbath::cli {

struct GenBathArgs {
  std::string format = "json";  // json | csv
};

struct SweepArgs {
  std::vector<double> exclusion_fractions;  // non-empty selects the sensitivity sweep
  bool keep_samples = false;
};

struct DecayArgs {
  std::optional<std::filesystem::path> params_file;
  std::optional<double> select_ppm;
  std::optional<double> delta;   // rad/s; Delta_ens, or Delta_single with `single`
  std::optional<double> tau_c;   // s
  std::optional<double> lambda;  // s
  std::string sequence = "ramsey";
  bool single = false;
  std::size_t monte_carlo = 0;
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::size_t points = 200;
  bool log_grid = false;
};

struct FitArgs {
  std::optional<std::filesystem::path> curve;
  std::optional<std::filesystem::path> samples;
  bool include_offset = false;
  std::string report_name = "fit_report.json";
};

struct ReportArgs {
  std::optional<std::filesystem::path> run_dir;
  std::string format = "both";  // json | md | both
  double a_factor = 2.0;
  double b_factor = 3.0;
  double ratio_min = 5.0;
  double ratio_max = 50.0;
};

/// Shared state of one invocation.
struct Invocation {
  RunConfig config;
  RunManifest manifest;
  std::ostream* out = nullptr;
};

void cmd_gen_bath(Invocation& inv, const GenBathArgs& args);
void cmd_sweep(Invocation& inv, const SweepArgs& args);
void cmd_decay(Invocation& inv, const DecayArgs& args);
void cmd_fit(Invocation& inv, const FitArgs& args);
void cmd_report(Invocation& inv, const ReportArgs& args);

/// Figure recipe for the T vs [N] plot of a sweep CSV.
nlohmann::json scaling_figure_recipe(const std::string& csv_name);

}  // namespace spinbath::cli

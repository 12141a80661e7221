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

#include "spinbath_cli/app.hpp"

#include <filesystem>
#include <optional>

#include "CLI11.hpp"

#include "spinbath/errors.hpp"
#include "spinbath_cli/commands.hpp"

namespace spinbath::cli {

namespace {

struct CommonFlags {
  std::optional<std::string> config_file;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
};

struct BathFlags {
  std::optional<std::string> ppm;
  std::optional<std::size_t> n;
  std::optional<std::string> box;
  std::optional<std::string> placement;
  std::optional<int> axis;
  std::optional<double> exclusion_fraction;
  std::optional<std::string> pairs;
  std::optional<std::string> convention;
  std::optional<std::string> delta_estimator;
  std::optional<std::string> tau_estimator;
  std::optional<std::size_t> bootstrap;
  std::optional<double> confidence;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_file, "key = value config file; flags override it");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--workers", f.workers, "worker threads (fallback: SPINBATH_WORKERS)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output directory");
}

void add_bath(CLI::App* cmd, BathFlags& f, bool model_flags) {
  cmd->add_option("--ppm", f.ppm, "concentration(s) in ppm, comma separated");
  cmd->add_option("--n", f.n, "realizations per concentration");
  cmd->add_option("--box", f.box, "box policy target:<spins> or fixed:<half-width nm>");
  cmd->add_option("--placement", f.placement, "lattice or continuum");
  cmd->add_option("--axis", f.axis, "quantization axis index 0..3");
  if (!model_flags) return;
  cmd->add_option("--exclusion-fraction", f.exclusion_fraction, "weak-pair exclusion threshold");
  cmd->add_option("--flip-flop-pairs", f.pairs, "antiparallel or all");
  cmd->add_option("--convention", f.convention, "dipolar convention: reference or textbook");
  cmd->add_option("--delta-estimator", f.delta_estimator, "mle, median or histogram");
  cmd->add_option("--tau-estimator", f.tau_estimator, "mle or histogram");
  cmd->add_option("--bootstrap", f.bootstrap, "bootstrap resamples for confidence bands");
  cmd->add_option("--confidence", f.confidence, "confidence level of the bands");
}

RunConfig resolve(const CommonFlags& common, const BathFlags& bath) {
  RunConfig config;
  std::optional<unsigned> config_workers;
  if (common.config_file) {
    auto values = read_config_file(*common.config_file);
    if (auto it = values.find("run.workers"); it != values.end()) {
      config_workers = static_cast<unsigned>(std::stoul(it->second));
      values.erase(it);
    }
    apply_config(config, values);
  }
  ConfigValues flags;
  if (bath.ppm) flags["bath.concentrations"] = *bath.ppm;
  if (bath.box) flags["bath.box"] = *bath.box;
  if (bath.placement) flags["bath.placement"] = *bath.placement;
  if (bath.pairs) flags["model.flip_flop_pairs"] = *bath.pairs;
  if (bath.convention) flags["model.convention"] = *bath.convention;
  if (bath.delta_estimator) flags["fit.delta_estimator"] = *bath.delta_estimator;
  if (bath.tau_estimator) flags["fit.tau_estimator"] = *bath.tau_estimator;
  apply_config(config, flags);
  if (bath.n) config.n_realizations = *bath.n;
  if (bath.axis) config.bath.quantization_axis_index = *bath.axis;
  if (bath.exclusion_fraction) config.model.exclusion_fraction = *bath.exclusion_fraction;
  if (bath.bootstrap) config.bootstrap_resamples = *bath.bootstrap;
  if (bath.confidence) config.confidence = *bath.confidence;
  if (common.seed) config.master_seed = *common.seed;
  if (common.out) config.out = *common.out;
  config.workers = resolve_worker_count(common.workers, config_workers);
  validate(config);
  return config;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"spinbath: NV-ensemble decoherence in a nitrogen spin bath"};
  app.name(args.empty() ? "spinbath" : args.front());
  app.require_subcommand(1);

  CommonFlags common;
  BathFlags bath;
  GenBathArgs gen;
  SweepArgs sweep;
  DecayArgs decay;
  FitArgs fit;
  ReportArgs report;
  std::string exclusion_list;

  auto* gen_cmd = app.add_subcommand("gen-bath", "generate bath configurations");
  add_common(gen_cmd, common);
  add_bath(gen_cmd, bath, false);
  gen_cmd->add_option("--format", gen.format, "json or csv");

  auto* sweep_cmd = app.add_subcommand("sweep", "concentration sweep of T2* and T2");
  add_common(sweep_cmd, common);
  add_bath(sweep_cmd, bath, true);
  sweep_cmd->add_option("--exclusion-fractions", exclusion_list,
                        "comma-separated thresholds for a sensitivity sweep");
  sweep_cmd->add_flag("--keep-samples", sweep.keep_samples, "write per-realization summaries");

  auto* decay_cmd = app.add_subcommand("decay", "ensemble or single-NV decay curve");
  add_common(decay_cmd, common);
  decay_cmd->add_option("--params", decay.params_file, "sweep.json or parameter JSON");
  decay_cmd->add_option("--select-ppm", decay.select_ppm, "sweep point to use from --params");
  decay_cmd->add_option("--delta", decay.delta, "Delta (rad/s)");
  decay_cmd->add_option("--tau-c", decay.tau_c, "correlation time (s)");
  decay_cmd->add_option("--lambda", decay.lambda, "inverse-Gaussian shape (s)");
  decay_cmd->add_option("--sequence", decay.sequence, "ramsey or echo");
  decay_cmd->add_flag("--single", decay.single, "single NV instead of the ensemble");
  decay_cmd->add_option("--mc", decay.monte_carlo, "Monte Carlo trajectories (single NV)");
  decay_cmd->add_option("--t-min", decay.t_min, "first time (s)");
  decay_cmd->add_option("--t-max", decay.t_max, "last time (s)");
  decay_cmd->add_option("--points", decay.points, "grid size");
  decay_cmd->add_flag("--log-grid", decay.log_grid, "log-spaced grid");

  auto* fit_cmd = app.add_subcommand("fit", "stretched-exponential or scaling fit");
  add_common(fit_cmd, common);
  fit_cmd->add_option("--curve", fit.curve, "decay curve CSV");
  fit_cmd->add_option("--samples", fit.samples, "sample table CSV");
  fit_cmd->add_flag("--offset", fit.include_offset, "fit 1/T = rate [N] + 1/T_other");
  fit_cmd->add_option("--report", fit.report_name, "report file name");

  auto* report_cmd = app.add_subcommand("report", "consolidated report of a run directory");
  add_common(report_cmd, common);
  report_cmd->add_option("--run-dir", report.run_dir, "run directory (default: --out)");
  report_cmd->add_option("--format", report.format, "json, md or both");
  report_cmd->add_option("--a-factor", report.a_factor, "tolerance factor on 1/A");
  report_cmd->add_option("--b-factor", report.b_factor, "tolerance factor on 1/B");
  report_cmd->add_option("--ratio-min", report.ratio_min, "lower bound on T2/T2*");
  report_cmd->add_option("--ratio-max", report.ratio_max, "upper bound on T2/T2*");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "spinbath: " << e.what() << '\n';
    return kUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    Invocation inv;
    inv.out = &out;
    if (active == report_cmd && report.run_dir && !common.out) common.out = report.run_dir->string();
    inv.config = resolve(common, bath);
    if (!exclusion_list.empty()) sweep.exclusion_fractions = parse_double_list(exclusion_list);
    inv.manifest.command = active->get_name();
    inv.manifest.argv = args;
    inv.manifest.config = inv.config.to_json();
    inv.manifest.config["workers"] = inv.config.workers;
    inv.manifest.config_ini = inv.config.to_ini();
    inv.manifest.created_utc = utc_timestamp();

    if (active == gen_cmd) cmd_gen_bath(inv, gen);
    if (active == sweep_cmd) cmd_sweep(inv, sweep);
    if (active == decay_cmd) cmd_decay(inv, decay);
    if (active == fit_cmd) cmd_fit(inv, fit);
    if (active == report_cmd) cmd_report(inv, report);

    const auto dir = inv.config.out;
    inv.manifest.emit(dir, inv.manifest.command + ".conf", inv.manifest.config_ini);
    inv.manifest.write(dir);
    return kSuccess;
  } catch (const InvalidArgument& e) {
    err << "spinbath " << active->get_name() << ": usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "spinbath " << active->get_name() << ": data error: " << e.what() << '\n';
    return kDataError;
  } catch (const DegenerateConfiguration& e) {
    err << "spinbath " << active->get_name() << ": data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "spinbath " << active->get_name() << ": data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    err << "spinbath " << active->get_name() << ": numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "spinbath " << active->get_name() << ": numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace spinbath::cli

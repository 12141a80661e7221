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

#include "spinbath_cli/run_config.hpp"

#include <cstdlib>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "spinbath/errors.hpp"
#include "spinbath/format.hpp"

namespace spinbath::cli {

namespace {

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || text[0] == '-') {
    throw InvalidArgument(key + ": expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

double parse_number(const std::string& text, const std::string& key) {
  try {
    return parse_double(text, key);
  } catch (const DataError& e) {
    throw InvalidArgument(e.what());
  }
}

}  // namespace

ConfigValues read_config_file(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw DataError("config " + path.string() + ": " + e.message() + " (line " +
                    std::to_string(e.line()) + ")");
  }
  ConfigValues values;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      values[section] = body.data();
      continue;
    }
    for (const auto& [key, value] : body) values[section + "." + key] = value.data();
  }
  return values;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_csv_line(text)) {
    if (item.empty()) continue;
    out.push_back(parse_number(item, "list item"));
  }
  if (out.empty()) throw InvalidArgument("empty list '" + text + "'");
  return out;
}

BoxPolicy parse_box_policy(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InvalidArgument("box policy must be target:<spins> or fixed:<nm>, got '" + text + "'");
  }
  const std::string kind = text.substr(0, colon);
  BoxPolicy box;
  box.value = parse_number(text.substr(colon + 1), "box");
  if (kind == "target") {
    box.kind = BoxPolicy::Kind::TargetCount;
  } else if (kind == "fixed") {
    box.kind = BoxPolicy::Kind::FixedHalfWidth;
  } else {
    throw InvalidArgument("unknown box policy '" + kind + "'");
  }
  if (!(box.value > 0.0)) throw InvalidArgument("box policy value must be positive");
  return box;
}

std::string to_string(const BoxPolicy& box) {
  return std::string(box.kind == BoxPolicy::Kind::TargetCount ? "target:" : "fixed:") +
         format_double(box.value);
}

void apply_config(RunConfig& c, const ConfigValues& values) {
  for (const auto& [key, v] : values) {
    if (key == "run.seed") {
      c.master_seed = parse_u64(v, key);
    } else if (key == "run.workers") {
      c.workers = static_cast<unsigned>(parse_u64(v, key));
    } else if (key == "run.out") {
      c.out = v;
    } else if (key == "bath.concentrations") {
      c.concentrations = parse_double_list(v);
    } else if (key == "bath.n_realizations") {
      c.n_realizations = parse_u64(v, key);
    } else if (key == "bath.box") {
      c.box = parse_box_policy(v);
    } else if (key == "bath.placement") {
      c.bath.placement = placement_from_string(v);
    } else if (key == "bath.quantization_axis") {
      c.bath.quantization_axis_index = static_cast<int>(parse_u64(v, key));
    } else if (key == "model.exclusion_fraction") {
      c.model.exclusion_fraction = parse_number(v, key);
    } else if (key == "model.flip_flop_pairs") {
      c.model.pairs = flip_flop_pairs_from_string(v);
    } else if (key == "model.convention") {
      c.model.convention = convention_from_string(v);
    } else if (key == "model.a_parallel_hz") {
      c.model.hyperfine.a_parallel = kTwoPi * parse_number(v, key);
    } else if (key == "model.a_perp_hz") {
      c.model.hyperfine.a_perp = kTwoPi * parse_number(v, key);
    } else if (key == "model.pair_sample_size") {
      c.model.pair_sample_size = parse_u64(v, key);
    } else if (key == "fit.delta_estimator") {
      c.fit.delta = delta_estimator_from_string(v);
    } else if (key == "fit.tau_estimator") {
      c.fit.tau = tau_estimator_from_string(v);
    } else if (key == "fit.histogram_bins") {
      c.fit.histogram_bins = parse_u64(v, key);
    } else if (key == "fit.bootstrap") {
      c.bootstrap_resamples = parse_u64(v, key);
    } else if (key == "fit.confidence") {
      c.confidence = parse_number(v, key);
    } else {
      throw InvalidArgument("unknown config key '" + key + "'");
    }
  }
}

SweepOptions RunConfig::sweep_options() const {
  SweepOptions o;
  o.concentrations = concentrations;
  o.n_realizations = n_realizations;
  o.master_seed = master_seed;
  o.box = box;
  o.bath = bath;
  o.model = model;
  o.fit = fit;
  o.bootstrap_resamples = bootstrap_resamples;
  o.confidence = confidence;
  o.workers = workers;
  return o;
}

std::string RunConfig::to_ini() const {
  std::ostringstream out;
  std::string ppm;
  for (double c : concentrations) ppm += (ppm.empty() ? "" : ",") + format_double(c);
  out << "[run]\n"
      << "seed = " << master_seed << "\n\n"
      << "[bath]\n"
      << "concentrations = " << ppm << '\n'
      << "n_realizations = " << n_realizations << '\n'
      << "box = " << cli::to_string(box) << '\n'
      << "placement = " << spinbath::to_string(bath.placement) << '\n'
      << "quantization_axis = " << bath.quantization_axis_index << "\n\n"
      << "[model]\n"
      << "exclusion_fraction = " << format_double(model.exclusion_fraction) << '\n'
      << "flip_flop_pairs = " << spinbath::to_string(model.pairs) << '\n'
      << "convention = " << spinbath::to_string(model.convention) << '\n'
      << "a_parallel_hz = " << format_double(model.hyperfine.a_parallel / kTwoPi) << '\n'
      << "a_perp_hz = " << format_double(model.hyperfine.a_perp / kTwoPi) << '\n'
      << "pair_sample_size = " << model.pair_sample_size << "\n\n"
      << "[fit]\n"
      << "delta_estimator = " << spinbath::to_string(fit.delta) << '\n'
      << "tau_estimator = " << spinbath::to_string(fit.tau) << '\n'
      << "histogram_bins = " << fit.histogram_bins << '\n'
      << "bootstrap = " << bootstrap_resamples << '\n'
      << "confidence = " << format_double(confidence) << '\n';
  return out.str();
}

nlohmann::json RunConfig::to_json() const {
  return {{"concentrations_ppm", concentrations},
          {"n_realizations", n_realizations},
          {"seed", master_seed},
          {"box", cli::to_string(box)},
          {"placement", spinbath::to_string(bath.placement)},
          {"quantization_axis", bath.quantization_axis_index},
          {"exclusion_fraction", model.exclusion_fraction},
          {"flip_flop_pairs", spinbath::to_string(model.pairs)},
          {"convention", spinbath::to_string(model.convention)},
          {"a_parallel_hz", model.hyperfine.a_parallel / kTwoPi},
          {"a_perp_hz", model.hyperfine.a_perp / kTwoPi},
          {"pair_sample_size", model.pair_sample_size},
          {"delta_estimator", spinbath::to_string(fit.delta)},
          {"tau_estimator", spinbath::to_string(fit.tau)},
          {"histogram_bins", fit.histogram_bins},
          {"bootstrap", bootstrap_resamples},
          {"confidence", confidence}};
}

unsigned resolve_worker_count(std::optional<unsigned> flag, std::optional<unsigned> config) {
  if (flag) return *flag;
  if (config) return *config;
  if (const char* env = std::getenv("SPINBATH_WORKERS"); env && *env) {
    const auto v = parse_u64(env, "SPINBATH_WORKERS");
    if (v == 0) throw InvalidArgument("SPINBATH_WORKERS must be positive");
    return static_cast<unsigned>(v);
  }
  return 1;
}

void validate(const RunConfig& c) {
  if (c.n_realizations == 0) throw InvalidArgument("n_realizations must be positive");
  if (c.workers == 0) throw InvalidArgument("workers must be positive");
  if (!(c.model.exclusion_fraction >= 0.0)) throw InvalidArgument("exclusion_fraction must be >= 0");
  if (!(c.model.hyperfine.a_parallel >= 0.0) || !(c.model.hyperfine.a_perp >= 0.0)) {
    throw InvalidArgument("hyperfine constants must be nonnegative");
  }
  if (c.bath.quantization_axis_index < 0 || c.bath.quantization_axis_index > 3) {
    throw InvalidArgument("quantization_axis must be 0..3");
  }
  if (!(c.confidence > 0.0 && c.confidence < 1.0)) throw InvalidArgument("confidence must lie in (0, 1)");
  for (double ppm : c.concentrations) {
    if (!(ppm > 0.0)) throw InvalidArgument("concentrations must be positive");
    if (ppm < 0.01 || ppm > 1000.0) {
      warn("concentration " + format_double(ppm) + " ppm is outside the studied 0.01-1000 ppm range");
    }
  }
}

}  // namespace spinbath::cli

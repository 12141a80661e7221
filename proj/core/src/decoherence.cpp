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

#include "spinbath/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spinbath/errors.hpp"
#include "spinbath/format.hpp"
#include "spinbath/parallel.hpp"
#include "spinbath/rng.hpp"

namespace spinbath {

namespace {

void validate_model(const OuNoiseModel& model) {
  if (!(model.delta >= 0.0) || !std::isfinite(model.delta)) {
    throw InvalidArgument("OU model: delta must be finite and nonnegative");
  }
  if (!(model.tau_c > 0.0)) throw InvalidArgument("OU model: tau_c must be positive");
}

// chi / (Delta t)^2 as a function of x = t / tau_c. Power series below x = 1
// (all brackets vanish to second or third order at x = 0).
double chi_shape(PulseSequence seq, double x) {
  if (x < 1.0) {
    double term = 0.5;  // x^(k-2) / k!, starting at k = 2
    double sum = 0.0;
    for (int k = 2; k <= 34; ++k) {
      if (k > 2) term *= x / k;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      const double coeff =
          seq == PulseSequence::Ramsey ? sign : sign * (4.0 * std::ldexp(1.0, -k) - 1.0);
      sum += coeff * term;
    }
    return sum;
  }
  const double bracket = seq == PulseSequence::Ramsey
                             ? x - 1.0 + std::exp(-x)
                             : x - 3.0 - std::exp(-x) + 4.0 * std::exp(-0.5 * x);
  return bracket / (x * x);
}

// Exact conditional update of (B, integral of B) over one step of an OU
// process with stationary std sigma and correlation time tau.
struct OuStep {
  double decay = 1.0;       // E[B_h | B_0] = decay * B_0
  double b_std = 0.0;       // sqrt(Var(B_h | B_0))
  double i_mean = 0.0;      // E[I | B_0] = i_mean * B_0
  double i_from_z1 = 0.0;   // loading of I on the B innovation
  double i_resid_std = 0.0; // independent part of I

  OuStep(double h, double sigma, double tau) {
    if (h <= 0.0) return;
    if (!std::isfinite(tau)) {
      i_mean = h;
      return;
    }
    const double x = h / tau;
    const double one_minus_a = -std::expm1(-x);
    decay = 1.0 - one_minus_a;
    const double one_minus_a2 = -std::expm1(-2.0 * x);
    b_std = sigma * std::sqrt(one_minus_a2);
    i_mean = tau * one_minus_a;
    // Cov(I, B_h) = sigma^2 tau (1 - a)^2.
    i_from_z1 = b_std > 0.0 ? sigma * sigma * tau * one_minus_a * one_minus_a / b_std : 0.0;
    // Var(I) - Cov^2 / Var(B_h) = sigma^2 tau^2 r(x).
    double r = 0.0;
    if (x < 0.05) {
      const double x2 = x * x;
      r = x * x2 * (1.0 / 6.0 - x2 / 60.0 + 17.0 * x2 * x2 / 10080.0);
    } else {
      const double g = x - one_minus_a;
      r = 2.0 * g - one_minus_a * one_minus_a -
          one_minus_a * one_minus_a * one_minus_a * one_minus_a / one_minus_a2;
    }
    i_resid_std = sigma * tau * std::sqrt(std::max(r, 0.0));
  }
};

}  // namespace

std::string to_string(PulseSequence seq) {
  return seq == PulseSequence::Ramsey ? "ramsey" : "echo";
}

PulseSequence sequence_from_string(const std::string& name) {
  if (name == "ramsey" || name == "fid") return PulseSequence::Ramsey;
  if (name == "echo" || name == "spin-echo" || name == "hahn") return PulseSequence::SpinEcho;
  throw InvalidArgument("unknown pulse sequence '" + name + "'");
}

DecayCurve DecayCurve::coherence_view() const {
  if (scale == CurveScale::Coherence) return *this;
  DecayCurve out = *this;
  out.scale = CurveScale::Coherence;
  for (auto& v : out.values) v = 2.0 * v - 1.0;
  for (auto& v : out.stderrs) v *= 2.0;
  for (auto& v : out.reference) v = 2.0 * v - 1.0;
  return out;
}

std::string to_csv(const DecayCurve& curve) {
  std::ostringstream os;
  const bool has_ref = !curve.reference.empty();
  os << "t_s,value,stderr" << (has_ref ? ",reference" : "") << '\n';
  for (std::size_t k = 0; k < curve.size(); ++k) {
    os << format_double(curve.times[k]) << ',' << format_double(curve.values[k]) << ','
       << format_double(curve.stderrs.empty() ? 0.0 : curve.stderrs[k]);
    if (has_ref) os << ',' << format_double(curve.reference[k]);
    os << '\n';
  }
  return os.str();
}

DecayCurve decay_curve_from_csv(const std::string& text, const nlohmann::json& metadata) {
  DecayCurve curve;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw DataError("decay curve CSV is empty");
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) -> std::ptrdiff_t {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  const auto t_col = column("t_s");
  auto v_col = column("value");
  if (v_col < 0) v_col = column("coherence");
  if (v_col < 0) v_col = column("probability");
  const auto e_col = column("stderr");
  const auto r_col = column("reference");
  if (t_col < 0 || v_col < 0) throw DataError("decay curve CSV needs t_s and value columns");
  std::size_t row = 1;
  bool any_err = false;
  while (std::getline(is, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_csv_line(line);
    const std::string ctx = "decay curve row " + std::to_string(row);
    if (f.size() < header.size()) throw DataError(ctx + ": too few fields");
    curve.times.push_back(parse_double(f[static_cast<std::size_t>(t_col)], ctx));
    curve.values.push_back(parse_double(f[static_cast<std::size_t>(v_col)], ctx));
    const double e = e_col >= 0 ? parse_double(f[static_cast<std::size_t>(e_col)], ctx) : 0.0;
    any_err = any_err || e != 0.0;
    curve.stderrs.push_back(e);
    if (r_col >= 0) curve.reference.push_back(parse_double(f[static_cast<std::size_t>(r_col)], ctx));
  }
  if (!any_err) curve.stderrs.clear();
  if (metadata.is_object()) {
    curve.metadata = metadata;
    if (metadata.contains("sequence")) {
      curve.sequence = sequence_from_string(metadata["sequence"].get<std::string>());
    }
    if (metadata.contains("scale")) {
      curve.scale = metadata["scale"].get<std::string>() == "coherence" ? CurveScale::Coherence
                                                                        : CurveScale::Probability;
    }
  }
  return curve;
}

void validate_time_grid(std::span<const double> times) {
  if (times.empty()) throw InvalidArgument("time grid is empty");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k] < 0.0) {
      throw InvalidArgument("time grid entries must be finite and nonnegative");
    }
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw InvalidArgument("time grid must be strictly increasing");
    }
  }
}

std::vector<double> linear_grid(double t0, double t1, std::size_t count) {
  if (count < 2 || !(t1 > t0)) throw InvalidArgument("linear_grid: need count >= 2 and t1 > t0");
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return grid;
}

std::vector<double> log_grid(double t0, double t1, std::size_t count) {
  if (count < 2 || !(t0 > 0.0) || !(t1 > t0)) {
    throw InvalidArgument("log_grid: need count >= 2 and 0 < t0 < t1");
  }
  std::vector<double> grid(count);
  const double l0 = std::log(t0);
  const double l1 = std::log(t1);
  for (std::size_t k = 0; k < count; ++k) {
    grid[k] = std::exp(l0 + (l1 - l0) * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  grid.front() = t0;
  grid.back() = t1;
  return grid;
}

double filter_function(PulseSequence seq, double omega_tau) {
  if (seq == PulseSequence::Ramsey) {
    const double s = std::sin(0.5 * omega_tau);
    return 2.0 * s * s;
  }
  const double s = std::sin(0.25 * omega_tau);
  const double s2 = s * s;
  return 8.0 * s2 * s2;
}

double chi(PulseSequence seq, double t, const OuNoiseModel& model) {
  validate_model(model);
  if (!(t >= 0.0)) throw InvalidArgument("chi: t must be nonnegative");
  const double x = std::isfinite(model.tau_c) ? t / model.tau_c : 0.0;
  const double dt = model.delta * t;
  return dt * dt * chi_shape(seq, x);
}

double chi_short_time(PulseSequence seq, double t, const OuNoiseModel& model) {
  validate_model(model);
  if (!(t >= 0.0)) throw InvalidArgument("chi_short_time: t must be nonnegative");
  const double d2 = model.delta * model.delta;
  if (seq == PulseSequence::Ramsey) return 0.5 * d2 * t * t;
  return d2 * t * t * t / (12.0 * model.tau_c);
}

double t2_star_single(double delta) { return std::sqrt(2.0) / delta; }

double t2_single(double delta, double tau_c) { return std::cbrt(12.0 * tau_c / (delta * delta)); }

DecayCurve single_nv_signal(PulseSequence seq, std::span<const double> times,
                            const OuNoiseModel& model) {
  validate_time_grid(times);
  validate_model(model);
  DecayCurve curve;
  curve.sequence = seq;
  curve.times.assign(times.begin(), times.end());
  curve.values.reserve(times.size());
  for (double t : times) {
    curve.values.push_back(0.5 * (1.0 + std::exp(-chi(seq, t, model))));
    curve.reference.push_back(0.5 * (1.0 + std::exp(-chi_short_time(seq, t, model))));
  }
  curve.metadata = {{"source", "single_nv_signal"},
                    {"sequence", to_string(seq)},
                    {"scale", "probability"},
                    {"delta_rad_s", model.delta},
                    {"tau_c_s", model.tau_c}};
  return curve;
}

DecayCurve ou_monte_carlo(PulseSequence seq, std::span<const double> times,
                          const OuNoiseModel& model, std::size_t n_traj, std::uint64_t seed,
                          unsigned workers) {
  validate_time_grid(times);
  validate_model(model);
  if (n_traj < 100) throw InvalidArgument("ou_monte_carlo: need at least 100 trajectories");

  // Integration nodes: every sample time, plus t/2 for the echo pi pulse.
  std::vector<double> nodes(times.begin(), times.end());
  if (seq == PulseSequence::SpinEcho) {
    for (double t : times) nodes.push_back(0.5 * t);
  }
  nodes.push_back(0.0);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  auto node_of = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), t) - nodes.begin());
  };
  std::vector<std::size_t> end_node(times.size());
  std::vector<std::size_t> mid_node(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    end_node[k] = node_of(times[k]);
    mid_node[k] = node_of(0.5 * times[k]);
  }
  std::vector<OuStep> steps;
  steps.reserve(nodes.size());
  steps.emplace_back(0.0, model.delta, model.tau_c);
  for (std::size_t n = 1; n < nodes.size(); ++n) {
    steps.emplace_back(nodes[n] - nodes[n - 1], model.delta, model.tau_c);
  }

  constexpr std::size_t kBlock = 64;
  const std::size_t m = times.size();
  const std::size_t n_blocks = (n_traj + kBlock - 1) / kBlock;
  struct BlockSums {
    std::vector<double> cos_sum;
    std::vector<double> cos2_sum;
  };
  auto blocks = parallel_map<BlockSums>(n_blocks, workers, [&](std::size_t b) {
    BlockSums sums{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    std::vector<double> integral(nodes.size());
    const std::size_t first = b * kBlock;
    const std::size_t last = std::min(n_traj, first + kBlock);
    for (std::size_t traj = first; traj < last; ++traj) {
      Rng rng(derive_seed(seed, traj));
      double field = model.delta * rng.normal();
      double acc = 0.0;
      integral[0] = 0.0;
      for (std::size_t n = 1; n < nodes.size(); ++n) {
        const OuStep& s = steps[n];
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        acc += s.i_mean * field + s.i_from_z1 * z1 + s.i_resid_std * z2;
        field = s.decay * field + s.b_std * z1;
        integral[n] = acc;
      }
      for (std::size_t k = 0; k < m; ++k) {
        const double phase = seq == PulseSequence::Ramsey
                                 ? integral[end_node[k]]
                                 : 2.0 * integral[mid_node[k]] - integral[end_node[k]];
        const double c = std::cos(phase);
        sums.cos_sum[k] += c;
        sums.cos2_sum[k] += c * c;
      }
    }
    return sums;
  });

  DecayCurve curve;
  curve.sequence = seq;
  curve.times.assign(times.begin(), times.end());
  curve.values.resize(m);
  curve.stderrs.resize(m);
  curve.reference.resize(m);
  const double n = static_cast<double>(n_traj);
  for (std::size_t k = 0; k < m; ++k) {
    CompensatedSum c;
    CompensatedSum c2;
    for (const auto& blk : blocks) {
      c += blk.cos_sum[k];
      c2 += blk.cos2_sum[k];
    }
    const double mean = c.value() / n;
    const double var = std::max(c2.value() / n - mean * mean, 0.0) * n / (n - 1.0);
    curve.values[k] = 0.5 * (1.0 + mean);
    curve.stderrs[k] = 0.5 * std::sqrt(var / n);
    curve.reference[k] = 0.5 * (1.0 + std::exp(-chi(seq, times[k], model)));
  }
  curve.metadata = {{"source", "ou_monte_carlo"},
                    {"sequence", to_string(seq)},
                    {"scale", "probability"},
                    {"delta_rad_s", model.delta},
                    {"tau_c_s", model.tau_c},
                    {"n_traj", n_traj},
                    {"seed", seed}};
  return curve;
}

}  // namespace spinbath

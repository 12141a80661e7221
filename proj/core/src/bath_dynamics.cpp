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

#include "spinbath/bath_dynamics.hpp"

#include <array>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "spinbath/errors.hpp"
#include "spinbath/format.hpp"
#include "spinbath/parallel.hpp"

namespace spinbath {

std::string to_string(FlipFlopPairs pairs) {
  return pairs == FlipFlopPairs::All ? "all" : "antiparallel";
}

FlipFlopPairs flip_flop_pairs_from_string(const std::string& name) {
  if (name == "all") return FlipFlopPairs::All;
  if (name == "antiparallel") return FlipFlopPairs::Antiparallel;
  throw InvalidArgument("unknown flip-flop pair selection '" + name + "'");
}

double hyperfine_shift(const BathSpin& spin, const Vector3& axis,
                       const HyperfineConstants& hyperfine) {
  if (spin.nuclear_projection == 0) return 0.0;
  const double c = spin.jt_axis().dot(axis);
  const double c2 = c * c;
  const double s2 = 1.0 - c2;
  return spin.nuclear_projection * std::sqrt(hyperfine.a_parallel * hyperfine.a_parallel * c2 +
                                             hyperfine.a_perp * hyperfine.a_perp * s2);
}

double pair_detuning(const BathConfiguration& config, std::size_t i, std::size_t j,
                     const BathModel& model) {
  const std::size_t n = config.size();
  if (i >= n || j >= n) throw InvalidArgument("pair_detuning: spin index out of range");
  if (i == j) throw InvalidArgument("pair_detuning: i and j must differ");
  const auto& axis = config.quantization_axis();
  const auto& si = config.spins[i];
  const auto& sj = config.spins[j];
  CompensatedSum overhauser;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == i || k == j) continue;
    const auto& sk = config.spins[k];
    const double ci =
        coupling_coefficients(si.position - sk.position, axis, model.convention).c_parallel;
    const double cj =
        coupling_coefficients(sj.position - sk.position, axis, model.convention).c_parallel;
    overhauser += sk.electron_projection * (ci - cj);
  }
  return hyperfine_shift(si, axis, model.hyperfine) - hyperfine_shift(sj, axis, model.hyperfine) +
         overhauser.value();
}

double bath_dephasing_rate(const BathConfiguration& config, const BathModel& model) {
  return std::sqrt(static_cast<double>(config.size())) *
         mean_abs_coupling(config, model.pair_sample_size, model.convention);
}

double flip_flop_rate(const PseudoSpinPair& pair) {
  if (!(pair.gamma_d > 0.0)) throw InvalidArgument("flip_flop_rate: Gamma_d must be positive");
  const double g = pair.gamma_d;
  return pair.omega * pair.omega / g * (g * g / (g * g + pair.delta * pair.delta));
}

FlipFlopOracleResult flip_flop_rate_oracle(const PseudoSpinPair& pair, double t_max) {
  namespace odeint = boost::numeric::odeint;
  if (!(pair.gamma_d >= 0.0)) throw InvalidArgument("flip_flop_rate_oracle: Gamma_d < 0");
  if (!(t_max > 0.0)) throw InvalidArgument("flip_flop_rate_oracle: t_max must be positive");

  // Bloch variables: w = p_e - p_g, x + i y = rho_eg.
  using State = std::array<double, 3>;
  const double omega = pair.omega;
  const double delta = pair.delta;
  const double gamma = pair.gamma_d;
  auto rhs = [=](const State& s, State& ds, double) {
    const double w = s[0];
    const double x = s[1];
    const double y = s[2];
    ds[0] = -4.0 * omega * y;
    ds[1] = 2.0 * delta * y - 2.0 * gamma * x;
    ds[2] = -2.0 * delta * x + omega * w - 2.0 * gamma * y;
  };

  constexpr std::size_t kSamples = 400;
  std::vector<double> times(kSamples + 1);
  for (std::size_t k = 0; k <= kSamples; ++k) {
    times[k] = t_max * static_cast<double>(k) / static_cast<double>(kSamples);
  }
  std::vector<double> w_samples;
  w_samples.reserve(times.size());
  State state{1.0, 0.0, 0.0};
  auto stepper = odeint::make_controlled(1e-10, 1e-10, odeint::runge_kutta_dopri5<State>());
  const double scale = std::max({gamma, omega, std::abs(delta), 1.0 / t_max});
  try {
    odeint::integrate_times(stepper, rhs, state, times.begin(), times.end(), 0.01 / scale,
                            [&](const State& s, double) { w_samples.push_back(s[0]); },
                            odeint::max_step_checker(10'000'000));
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("flip_flop_rate_oracle: ") + e.what());
  }

  // Skip the coherence transient (~ a few 1/Gamma_d) before fitting log w.
  FlipFlopOracleResult result;
  const double transient = gamma > 0.0 ? 5.0 / gamma : 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t n = 0;
  bool positive = true;
  for (std::size_t k = 0; k < w_samples.size(); ++k) {
    const double w = w_samples[k];
    if (!(w > 0.0)) {
      positive = false;
      continue;
    }
    if (times[k] < transient || w < 1e-8) continue;
    const double ly = std::log(w);
    sx += times[k];
    sy += ly;
    sxx += times[k] * times[k];
    sxy += times[k] * ly;
    syy += ly * ly;
    ++n;
  }
  result.samples_used = n;
  if (n < 10) return result;
  const double dn = static_cast<double>(n);
  const double cov = sxy - sx * sy / dn;
  const double var_t = sxx - sx * sx / dn;
  const double var_y = syy - sy * sy / dn;
  const double slope = cov / var_t;
  result.rate = -0.5 * slope;
  result.log_fit_r2 = var_y > 0.0 ? cov * cov / (var_t * var_y) : 0.0;
  result.exponential = positive && gamma > 0.0 && slope < 0.0 && result.log_fit_r2 > 0.999;
  return result;
}

BathRealizationSummary correlation_time(const BathConfiguration& config,
                                        const BathModel& model) {
  const std::size_t n = config.size();
  if (n < 2) throw InvalidArgument("correlation_time: need at least two bath spins");
  if (!(model.exclusion_fraction >= 0.0)) {
    throw InvalidArgument("correlation_time: exclusion fraction must be nonnegative");
  }
  const auto& axis = config.quantization_axis();
  const auto nv = nv_bath_coupling(config, model.convention);
  const CouplingTable table(config, model.convention);

  std::vector<double> shift(n);
  std::vector<double> overhauser(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) shift[i] = hyperfine_shift(config.spins[i], axis, model.hyperfine);
  {
    std::vector<CompensatedSum> field(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double c = table.pairs()[table.index(i, j)].c_parallel;
        field[i] += config.spins[j].electron_projection * c;
        field[j] += config.spins[i].electron_projection * c;
      }
    }
    for (std::size_t i = 0; i < n; ++i) overhauser[i] = field[i].value();
  }

  double mean_coupling = 0.0;
  if (model.pair_sample_size >= table.pair_count()) {
    CompensatedSum s;
    for (const auto& p : table.pairs()) s += std::abs(p.c_parallel);
    mean_coupling = s.value() / static_cast<double>(table.pair_count());
  } else {
    mean_coupling = mean_abs_coupling(config, model.pair_sample_size, model.convention);
  }
  const double gamma_d = std::sqrt(static_cast<double>(n)) * mean_coupling;

  BathRealizationSummary summary;
  summary.seed = config.seed;
  summary.concentration_ppm = config.concentration_ppm;
  summary.delta_single = nv.delta_single;
  summary.gamma_d = gamma_d;
  summary.n_spins = n;

  const double threshold = model.exclusion_fraction * nv.delta_single;
  CompensatedSum total_rate;
  for (std::size_t i = 0; i < n; ++i) {
    const double si = config.spins[i].electron_projection;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sj = config.spins[j].electron_projection;
      const bool can_flip = model.pairs == FlipFlopPairs::All || si != sj;
      const bool weak = std::abs(nv.per_spin_couplings[i] - nv.per_spin_couplings[j]) < threshold;
      if (!can_flip || weak) {
        ++summary.n_pairs_excluded;
        continue;
      }
      const auto& c = table.pairs()[table.index(i, j)];
      // Overhauser fields exclude the pair's own Ising term.
      const double delta = (shift[i] - shift[j]) + (overhauser[i] - sj * c.c_parallel) -
                           (overhauser[j] - si * c.c_parallel);
      total_rate += flip_flop_rate({i, j, std::abs(c.c_perp), delta, gamma_d});
      ++summary.n_pairs_counted;
    }
  }
  const double rate = total_rate.value();
  summary.tau_c_infinite = !(rate > 0.0);
  summary.tau_c_single = summary.tau_c_infinite ? std::numeric_limits<double>::infinity() : 1.0 / rate;
  return summary;
}

BathRealizationSummary correlation_time(const BathConfiguration& config,
                                        double exclusion_fraction, BathModel model) {
  model.exclusion_fraction = exclusion_fraction;
  return correlation_time(config, model);
}

std::string summary_csv_header() {
  return "seed,concentration_ppm,delta_single_rad_s,tau_c_s,gamma_d_rad_s,n_pairs_counted,"
         "n_pairs_excluded";
}

std::string summary_csv_row(const BathRealizationSummary& s) {
  return std::to_string(s.seed) + ',' + format_double(s.concentration_ppm) + ',' +
         format_double(s.delta_single) + ',' + format_double(s.tau_c_single) + ',' +
         format_double(s.gamma_d) + ',' + std::to_string(s.n_pairs_counted) + ',' +
         std::to_string(s.n_pairs_excluded);
}

}  // namespace spinbath

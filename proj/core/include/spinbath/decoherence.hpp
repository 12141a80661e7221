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
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace spinbath {

enum class PulseSequence { Ramsey, SpinEcho };

std::string to_string(PulseSequence seq);
PulseSequence sequence_from_string(const std::string& name);

/// Ornstein-Uhlenbeck bath field: rms `delta` (rad/s), correlation time
/// `tau_c` (s). tau_c = +inf is the static limit.
struct OuNoiseModel {
  double delta = 0.0;
  double tau_c = 1.0;
};

/// Value convention of a DecayCurve.
enum class CurveScale {
  /// Probability of |0>, in [1/2, 1].
  Probability,
  /// Normalized coherence 2p - 1, in [0, 1].
  Coherence,
};

struct DecayCurve {
  std::vector<double> times;   // s, strictly increasing
  std::vector<double> values;
  std::vector<double> stderrs;    // empty when not a sampled estimate
  std::vector<double> reference;  // optional analytic reference column
  PulseSequence sequence = PulseSequence::Ramsey;
  CurveScale scale = CurveScale::Probability;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t size() const { return times.size(); }
  /// Copy mapped to the coherence convention (2p - 1). No-op for coherence curves.
  DecayCurve coherence_view() const;
};

/// Writes "t_s,value,stderr[,reference]" rows with a header.
std::string to_csv(const DecayCurve& curve);
/// Reads the CSV form back; the sequence and scale come from `metadata`
/// when present, else the defaults.
DecayCurve decay_curve_from_csv(const std::string& text, const nlohmann::json& metadata = {});

/// Throws InvalidArgument unless times are finite, nonnegative and strictly increasing.
void validate_time_grid(std::span<const double> times);

/// Evenly spaced grid with `count` points on [t0, t1].
std::vector<double> linear_grid(double t0, double t1, std::size_t count);
/// Log-spaced grid with `count` points on [t0, t1], t0 > 0.
std::vector<double> log_grid(double t0, double t1, std::size_t count);

/// F(omega tau): 2 sin^2(x/2) for Ramsey, 8 sin^4(x/4) for the echo.
double filter_function(PulseSequence seq, double omega_tau);

/// Exact decoherence functional chi(t) for OU noise.
double chi(PulseSequence seq, double t, const OuNoiseModel& model);

/// Short-time forms: Delta^2 t^2 / 2 (Ramsey) and Delta^2 t^3 / (12 tau_c) (echo).
double chi_short_time(PulseSequence seq, double t, const OuNoiseModel& model);

/// T2*_single = sqrt(2) / Delta.
double t2_star_single(double delta);
/// T2_single = (12 tau_c / Delta^2)^(1/3).
double t2_single(double delta, double tau_c);

/// Probability curve (1 + exp(-chi)) / 2 from the exact chi; `reference`
/// holds the short-time form.
DecayCurve single_nv_signal(PulseSequence seq, std::span<const double> times,
                            const OuNoiseModel& model);

/// Monte Carlo estimate of (1 + <cos phi>) / 2 over `n_traj` exact OU
/// trajectories. Trajectory k uses a seed derived from (seed, k), and block
/// sums are combined in a fixed order, so the result does not depend on
/// `workers`. Standard errors are attached.
DecayCurve ou_monte_carlo(PulseSequence seq, std::span<const double> times,
                          const OuNoiseModel& model, std::size_t n_traj, std::uint64_t seed,
                          unsigned workers = 1);

}  // namespace spinbath

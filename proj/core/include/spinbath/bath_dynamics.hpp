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

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

#include "spinbath/constants.hpp"
#include "spinbath/dipolar.hpp"
#include "spinbath/lattice.hpp"

namespace spinbath {

/// 14N hyperfine tensor of the P1 centre (axial about its Jahn-Teller axis), rad/s.
struct HyperfineConstants {
  double a_parallel = kTwoPi * 114.0e6;
  double a_perp = kTwoPi * 81.3e6;
};

/// Which bath pairs may flip-flop.
enum class FlipFlopPairs {
  /// Every pair, regardless of the frozen electron projections.
  All,
  /// Only pairs in |up,down> or |down,up>, the flip-flop subspace.
  Antiparallel,
};

std::string to_string(FlipFlopPairs pairs);
FlipFlopPairs flip_flop_pairs_from_string(const std::string& name);

/// Parameters of the bath-dynamics model that are not fixed by the geometry.
struct BathModel {
  HyperfineConstants hyperfine;
  DipolarConvention convention = DipolarConvention::Reference;
  /// Pairs whose differential NV coupling is below this fraction of
  /// Delta_single are dropped from the tau_c sum.
  double exclusion_fraction = 0.5;
  FlipFlopPairs pairs = FlipFlopPairs::Antiparallel;
  /// Pair budget for the mean |c_par| entering Gamma_d.
  std::size_t pair_sample_size = std::size_t{1} << 22;
};

/// m_I * sqrt(A_par^2 cos^2 + A_perp^2 sin^2), angle between JT axis and `axis`.
double hyperfine_shift(const BathSpin& spin, const Vector3& axis,
                       const HyperfineConstants& hyperfine = {});

/// Local-field difference delta between spins i and j: hyperfine difference
/// plus the Overhauser field of all other spins frozen at their s_k.
double pair_detuning(const BathConfiguration& config, std::size_t i, std::size_t j,
                     const BathModel& model = {});

/// Gamma_d = sqrt(N_b) * mean |c_par| over bath pairs.
double bath_dephasing_rate(const BathConfiguration& config, const BathModel& model = {});

/// Flip-flop subspace of a bath pair mapped to a two-level system.
struct PseudoSpinPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double omega = 0.0;    // Omega = |c_perp|, rad/s
  double delta = 0.0;    // rad/s
  double gamma_d = 0.0;  // rad/s
};

/// Incoherent population-transfer rate (Omega^2/Gamma_d) Gamma_d^2/(Gamma_d^2 + delta^2).
/// Throws InvalidArgument for gamma_d <= 0.
double flip_flop_rate(const PseudoSpinPair& pair);

struct FlipFlopOracleResult {
  double rate = std::numeric_limits<double>::quiet_NaN();  // s^-1
  /// False when the population difference is not a clean decaying exponential
  /// (e.g. coherent Rabi oscillation at Gamma_d = 0).
  bool exponential = false;
  double log_fit_r2 = 0.0;
  std::size_t samples_used = 0;
};

/// Integrates the pseudo-spin master equation
///   d rho/dt = -i [delta sz + Omega sx, rho] + Gamma_d (sz rho sz - rho)
/// from |e> over [0, t_max] with an adaptive Dormand-Prince stepper
/// (tolerance 1e-10) and fits p_e - p_g = exp(-2 W t) for the transfer rate W.
/// Throws IntegrationError when the stepper cannot make progress.
FlipFlopOracleResult flip_flop_rate_oracle(const PseudoSpinPair& pair, double t_max);

struct BathRealizationSummary {
  std::uint64_t seed = 0;
  double concentration_ppm = 0.0;
  double delta_single = 0.0;  // rad/s
  double tau_c_single = std::numeric_limits<double>::infinity();  // s
  double gamma_d = 0.0;  // rad/s
  std::size_t n_spins = 0;
  std::size_t n_pairs_counted = 0;
  std::size_t n_pairs_excluded = 0;
  /// Set when no pair survives the exclusion rule; tau_c_single is +inf.
  bool tau_c_infinite = true;
};

/// Sums flip-flop rates over bath pairs that move the NV field by at least
/// exclusion_fraction * Delta_single and returns tau_c = 1 / sum.
BathRealizationSummary correlation_time(const BathConfiguration& config,
                                        const BathModel& model = {});

/// Convenience overload matching the common call pattern.
BathRealizationSummary correlation_time(const BathConfiguration& config,
                                        double exclusion_fraction, BathModel model = {});

/// CSV header and row for realization summaries.
std::string summary_csv_header();
std::string summary_csv_row(const BathRealizationSummary& s);

}  // namespace spinbath

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

#include "spinbath/bath_dynamics.hpp"
#include "spinbath/decoherence.hpp"
#include "spinbath/lattice.hpp"

namespace spinbath {

/// P(Delta) = (Delta_ens / Delta^2) sqrt(2/pi) exp(-Delta_ens^2 / (2 Delta^2)).
/// Equivalently 1/Delta is half-normal with scale 1/Delta_ens.
double pdf_delta(double delta, double delta_ens);
double cdf_delta(double delta, double delta_ens);

/// Inverse-Gaussian density with mean tau_c_ens and shape lambda (seconds).
double pdf_tau_c(double tau, double tau_c_ens, double lambda);
double cdf_tau_c(double tau, double tau_c_ens, double lambda);

enum class DeltaEstimator {
  /// Delta_ens = 1 / sqrt(mean(1 / Delta_i^2)), the exact MLE.
  MaximumLikelihood,
  /// Delta_ens = Phi^-1(3/4) * median(Delta). Robust to the heavy upper tail.
  MedianMatching,
  /// Least squares on a log-binned histogram.
  HistogramLeastSquares,
};

enum class TauEstimator {
  /// Inverse-Gaussian MLE: mean and 1/lambda = mean(1/tau - 1/mean).
  MaximumLikelihood,
  /// Least squares of the density of log(tau) on a log-binned histogram.
  HistogramLeastSquares,
};

std::string to_string(DeltaEstimator e);
std::string to_string(TauEstimator e);
DeltaEstimator delta_estimator_from_string(const std::string& name);
TauEstimator tau_estimator_from_string(const std::string& name);

struct DistributionFitOptions {
  DeltaEstimator delta = DeltaEstimator::MaximumLikelihood;
  TauEstimator tau = TauEstimator::MaximumLikelihood;
  std::size_t histogram_bins = 40;
};

struct EnsembleStatistics {
  std::vector<double> delta_samples;  // rad/s
  std::vector<double> tau_c_samples;  // s, finite samples only
  double delta_ens = 0.0;             // rad/s
  double tau_c_ens = 0.0;             // s
  double lambda_shape = 0.0;          // s
  /// Kolmogorov-Smirnov distances of the fitted PDFs; fit_residuals is the larger.
  double ks_delta = 0.0;
  double ks_tau = 0.0;
  double fit_residuals = 0.0;
  /// Pearson correlation of log Delta and log tau_c across realizations.
  double log_correlation = 0.0;
  std::size_t n_realizations = 0;
  std::size_t n_tau_infinite = 0;
  DistributionFitOptions method;
};

/// Fits P(Delta) and P(tau_c) to realization summaries. Realizations flagged
/// with infinite tau_c are counted but left out of the tau fit. Throws
/// InvalidArgument for fewer than 100 samples and FitFailure when either
/// sample set is degenerate.
EnsembleStatistics fit_distributions(std::span<const BathRealizationSummary> samples,
                                     const DistributionFitOptions& options = {});

/// Same fit from raw sample vectors.
EnsembleStatistics fit_distributions(std::span<const double> delta_samples,
                                     std::span<const double> tau_samples,
                                     const DistributionFitOptions& options = {});

struct EnsembleDecayParams {
  double delta_ens = 0.0;     // rad/s
  double tau_c_ens = 0.0;     // s
  double lambda_shape = 0.0;  // s
  PulseSequence sequence = PulseSequence::Ramsey;
};

/// T2*_ens = 1 / Delta_ens.
double t2_star_ensemble(double delta_ens);
/// T2_ens = (2 tau_c_ens / Delta_ens^2)^(1/3).
double t2_ensemble(double delta_ens, double tau_c_ens);

/// integral of P(Delta) exp(-Delta^2 t^2 / 2) dDelta by adaptive quadrature.
double ensemble_fid_quadrature(double t, double delta_ens);

/// Ensemble-averaged Ramsey probability by quadrature; `reference` holds
/// (1 + exp(-Delta_ens t)) / 2.
DecayCurve ensemble_fid(std::span<const double> times, const EnsembleDecayParams& params);

/// Ensemble-averaged echo probability by double quadrature over P(Delta) and
/// P(tau_c) of the short-time single-NV echo; `reference` holds
/// (1 + exp(-(t/T2_ens)^(3/2))) / 2. Warns (and flags the metadata) when
/// max t > 0.3 tau_c_ens.
DecayCurve ensemble_echo(std::span<const double> times, const EnsembleDecayParams& params);

/// How the simulation box is sized at each concentration.
struct BoxPolicy {
  enum class Kind { FixedHalfWidth, TargetCount } kind = Kind::TargetCount;
  double value = 500.0;  // nm for FixedHalfWidth, spins for TargetCount

  double half_width(double ppm) const;
};

struct SweepOptions {
  std::vector<double> concentrations;  // ppm
  std::size_t n_realizations = 2000;
  std::uint64_t master_seed = 1;
  BoxPolicy box;
  BathOptions bath;
  BathModel model;
  DistributionFitOptions fit;
  std::size_t bootstrap_resamples = 200;
  double confidence = 0.95;
  unsigned workers = 1;
  bool keep_samples = false;
};

/// Per-realization seed: depends only on (master seed, concentration, index).
std::uint64_t realization_seed(std::uint64_t master_seed, double ppm, std::size_t index);

/// One pipeline pass: lattice -> dipolar -> bath dynamics.
BathRealizationSummary simulate_realization(double ppm, std::size_t index,
                                            const SweepOptions& options);

struct SweepPoint {
  double concentration_ppm = 0.0;
  EnsembleStatistics stats;
  double t2_star = 0.0;  // s
  double t2 = 0.0;       // s
  double t2_star_ci_low = 0.0;
  double t2_star_ci_high = 0.0;
  double t2_ci_low = 0.0;
  double t2_ci_high = 0.0;
  double box_half_width_nm = 0.0;
  std::size_t n_realizations = 0;
  std::uint64_t seed = 0;
  std::vector<BathRealizationSummary> summaries;  // filled when keep_samples
};

/// Runs the realization pipeline at every concentration, fits the
/// distributions and attaches bootstrap confidence bands. Output is
/// bit-identical for any worker count.
std::vector<SweepPoint> sweep_concentration(const SweepOptions& options);

nlohmann::json to_json(const SweepPoint& point);
std::string sweep_csv_header();
std::string sweep_csv_row(const SweepPoint& point);

}  // namespace spinbath

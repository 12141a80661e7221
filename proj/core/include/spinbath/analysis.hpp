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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "spinbath/decoherence.hpp"

namespace spinbath {

/// C0 exp(-(t / t_char)^p) fitted to a coherence curve.
struct StretchedExpFit {
  double c0 = 0.0;
  double t_char = 0.0;  // s
  double p = 0.0;
  double c0_err = 0.0;  // 1 sigma
  double t_char_err = 0.0;
  double p_err = 0.0;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // (c0, t_char, p)
  double residual_norm = 0.0;
  bool converged = false;
  int restarts_used = 0;
  std::size_t n_points = 0;

  double operator()(double t) const;
};

struct StretchedExpOptions {
  int max_restarts = 5;
  std::uint64_t jitter_seed = 0x5eed;
};

/// Fits the coherence view (2p - 1 for probability curves). Requires at least
/// 8 points and a value below C0/e somewhere in range; throws InvalidArgument
/// otherwise and FitFailure when every restart fails.
StretchedExpFit fit_stretched_exp(const DecayCurve& curve, const StretchedExpOptions& options = {});
StretchedExpFit fit_stretched_exp(std::span<const double> times, std::span<const double> coherence,
                                  const StretchedExpOptions& options = {});

enum class Basis { SingleQuantum, DoubleQuantum };
enum class IsotopeClass { C13Natural, C12Enriched };
enum class Measurement { T2, T2Star };

std::string to_string(Basis b);
std::string to_string(IsotopeClass c);
std::string to_string(Measurement m);
Basis basis_from_string(const std::string& name);
IsotopeClass isotope_class_from_string(const std::string& name);
Measurement measurement_from_string(const std::string& name);

/// One sample of a concentration series. Zero uncertainties mean "unknown".
/// The confidence interval on t is read as a 1 sigma band.
struct SamplePoint {
  double concentration_ppm = 0.0;
  double concentration_err_ppm = 0.0;
  double t_seconds = 0.0;
  double t_ci_low = 0.0;
  double t_ci_high = 0.0;
  double p = std::numeric_limits<double>::quiet_NaN();
  Basis basis = Basis::SingleQuantum;
  IsotopeClass isotope_class = IsotopeClass::C13Natural;
  Measurement measurement = Measurement::T2;
  bool basis_normalized = false;

  bool has_t_interval() const;
};

/// Double-quantum T2* values are doubled and relabeled single-quantum.
/// Throws InvalidArgument on an already normalized point.
SamplePoint normalize_basis(const SamplePoint& point);

std::string sample_csv_header();
std::string to_csv(std::span<const SamplePoint> points);
/// Parses the sample table. All schema violations are collected and reported
/// together in one DataError.
std::vector<SamplePoint> read_sample_points(const std::string& text);

enum class ScalingMethod { WeightedLeastSquares, OrthogonalDistance };
std::string to_string(ScalingMethod m);

/// 1/T = rate_per_ppm * [N] (+ 1/t_other).
struct ScalingFit {
  double rate_per_ppm = 0.0;  // s^-1 ppm^-1
  double rate_err = 0.0;
  std::optional<double> intercept;  // s^-1
  double intercept_err = 0.0;
  std::optional<double> t_other;  // s; infinite when the intercept is not positive
  double t_other_err = 0.0;
  Eigen::MatrixXd covariance;  // (rate[, intercept])
  ScalingMethod method = ScalingMethod::WeightedLeastSquares;
  double chi2 = 0.0;
  std::size_t n_points = 0;

  /// Forward model: T([N]) = 1 / (rate [N] + intercept).
  double predict_t(double ppm) const;
};

/// Fits 1/T against [N]. Orthogonal distance regression is used when every
/// point carries both concentration and t uncertainties, weighted least
/// squares otherwise. Point order does not affect the result.
ScalingFit fit_scaling(std::span<const SamplePoint> points, bool include_offset);

/// y = prefactor * x^exponent by least squares in log-log space.
struct PowerLawFit {
  double exponent = 0.0;
  double exponent_err = 0.0;
  double prefactor = 0.0;
};
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// Samples a modulated trace at its revival maxima: the largest value within
/// +-10% of each multiple of `revival_spacing`. Throws EnvelopeFailure when a
/// window inside the time range holds no samples.
DecayCurve extract_envelope(const DecayCurve& modulated, double revival_spacing);

nlohmann::json to_json(const StretchedExpFit& fit);
nlohmann::json to_json(const ScalingFit& fit);

}  // namespace spinbath

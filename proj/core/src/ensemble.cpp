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

#include "spinbath/ensemble.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "spinbath/errors.hpp"
#include "spinbath/format.hpp"
#include "spinbath/least_squares.hpp"
#include "spinbath/parallel.hpp"
#include "spinbath/rng.hpp"

namespace spinbath {

namespace {

constexpr double kSqrt2OverPi = 0.79788456080286535588;  // sqrt(2/pi)
constexpr double kQuartileZ = 0.67448975019608174320;     // Phi^-1(3/4)
constexpr std::uint64_t kBootstrapStream = 0x626f6f74ULL;

using GaussKronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

// log(erfc(y)) without underflow for large y.
double log_erfc(double y) {
  if (y < 25.0) return std::log(std::erfc(y));
  const double y2 = y * y;
  return -y2 - std::log(y * std::sqrt(std::numbers::pi)) +
         std::log1p(-0.5 / y2 + 0.75 / (y2 * y2));
}

double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

template <typename Cdf>
double ks_distance(std::vector<double> samples, Cdf cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

struct LogHistogram {
  std::vector<double> centers;  // log-space bin centers
  std::vector<double> density;  // density of log(x)
};

LogHistogram log_histogram(std::vector<double> samples, std::size_t bins) {
  std::sort(samples.begin(), samples.end());
  const double lo = std::log(quantile_sorted(samples, 0.005));
  const double hi = std::log(quantile_sorted(samples, 0.995));
  LogHistogram h;
  if (!(hi > lo)) return h;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double s : samples) {
    const double l = std::log(s);
    if (l < lo || l > hi) continue;
    auto k = static_cast<std::size_t>((l - lo) / width);
    counts[std::min(k, bins - 1)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(samples.size()) * width);
  for (std::size_t k = 0; k < bins; ++k) {
    h.centers.push_back(lo + (static_cast<double>(k) + 0.5) * width);
    h.density.push_back(counts[k] * norm);
  }
  return h;
}

bool degenerate(std::span<const double> v) {
  if (v.empty()) return true;
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  return !(*mx > *mn);
}

double fit_delta_ens(std::span<const double> deltas, const DistributionFitOptions& options) {
  CompensatedSum inv2;
  for (double d : deltas) inv2 += 1.0 / (d * d);
  const double mle = 1.0 / std::sqrt(inv2.value() / static_cast<double>(deltas.size()));
  switch (options.delta) {
    case DeltaEstimator::MaximumLikelihood:
      return mle;
    case DeltaEstimator::MedianMatching: {
      std::vector<double> sorted(deltas.begin(), deltas.end());
      std::sort(sorted.begin(), sorted.end());
      return kQuartileZ * quantile_sorted(sorted, 0.5);
    }
    case DeltaEstimator::HistogramLeastSquares: {
      const auto h = log_histogram({deltas.begin(), deltas.end()}, options.histogram_bins);
      if (h.centers.empty()) throw FitFailure("fit_distributions: Delta histogram is empty");
      auto residual = [&](const Eigen::VectorXd& p) {
        const double d_ens = std::exp(p[0]);
        Eigen::VectorXd r(static_cast<Eigen::Index>(h.centers.size()));
        for (std::size_t k = 0; k < h.centers.size(); ++k) {
          const double x = std::exp(h.centers[k]);
          r[static_cast<Eigen::Index>(k)] = x * pdf_delta(x, d_ens) - h.density[k];
        }
        return r;
      };
      Eigen::VectorXd init(1);
      init << std::log(mle);
      const auto fit = levenberg_marquardt(residual, init);
      if (!fit.params.allFinite()) throw FitFailure("fit_distributions: Delta histogram fit diverged");
      return std::exp(fit.params[0]);
    }
  }
  return mle;
}

std::pair<double, double> fit_tau(std::span<const double> taus, const DistributionFitOptions& options) {
  const double n = static_cast<double>(taus.size());
  CompensatedSum sum;
  for (double t : taus) sum += t;
  const double mean = sum.value() / n;
  CompensatedSum inv;
  for (double t : taus) inv += 1.0 / t - 1.0 / mean;
  const double lambda_mle = n / inv.value();
  if (options.tau == TauEstimator::MaximumLikelihood) return {mean, lambda_mle};

  const auto h = log_histogram({taus.begin(), taus.end()}, options.histogram_bins);
  if (h.centers.empty()) throw FitFailure("fit_distributions: tau_c histogram is empty");
  auto residual = [&](const Eigen::VectorXd& p) {
    const double mu = std::exp(p[0]);
    const double lam = std::exp(p[1]);
    Eigen::VectorXd r(static_cast<Eigen::Index>(h.centers.size()));
    for (std::size_t k = 0; k < h.centers.size(); ++k) {
      const double x = std::exp(h.centers[k]);
      r[static_cast<Eigen::Index>(k)] = x * pdf_tau_c(x, mu, lam) - h.density[k];
    }
    return r;
  };
  const auto [mn, mx] = std::minmax_element(taus.begin(), taus.end());
  LeastSquaresOptions lso;
  lso.lower = Eigen::Vector2d(std::log(*mn), std::log(*mn) - 10.0);
  lso.upper = Eigen::Vector2d(std::log(*mx), std::log(*mx) + 10.0);
  Eigen::VectorXd init(2);
  init << std::log(mean), std::log(lambda_mle);
  const auto fit = levenberg_marquardt(residual, init, lso);
  if (!fit.params.allFinite()) throw FitFailure("fit_distributions: tau_c histogram fit diverged");
  return {std::exp(fit.params[0]), std::exp(fit.params[1])};
}

double pearson_log(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += std::log(a[i]);
    mb += std::log(b[i]);
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = std::log(a[i]) - ma;
    const double db = std::log(b[i]) - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

// Adaptive Gauss-Kronrod with an error check against an absolute floor.
template <typename F>
double integrate(F f, double a, double b, double abs_tol, const char* what) {
  double error = 0.0;
  const double value = GaussKronrod::integrate(f, a, b, 12, 1e-11, &error);
  if (!std::isfinite(value) || error > std::max(abs_tol, 1e-8 * std::abs(value))) {
    throw QuadratureError(std::string(what) + ": quadrature did not converge (error " +
                          format_double(error) + ")");
  }
  return value;
}

// integral over u in (0, inf) of sqrt(2/pi) exp(-u^2/2 - a2 / (2 u^2)) du, with
// u = Delta_ens / Delta. Analytically exp(-sqrt(a2)); evaluated numerically in
// s = log(u / u_peak), u_peak = a2^(1/4), where the integrand is a smooth bump.
double delta_average(double a2) {
  if (a2 == 0.0) return 1.0;
  if (!std::isfinite(a2)) return 0.0;
  const double peak = std::sqrt(std::sqrt(a2));
  auto f = [a2, peak](double s) {
    const double u = peak * std::exp(s);
    if (!(u > 0.0) || !std::isfinite(u)) return 0.0;
    return kSqrt2OverPi * u * std::exp(-0.5 * u * u - 0.5 * a2 / (u * u));
  };
  // The bump has unit-order width in s for small a2 and shrinks as a2^(-1/4).
  const double w = std::min(4.0, 8.0 / std::max(1.0, peak));
  const double inf = std::numeric_limits<double>::infinity();
  return integrate(f, -inf, -w, 1e-12, "ensemble Delta average") +
         integrate(f, -w, 0.0, 1e-12, "ensemble Delta average") +
         integrate(f, 0.0, w, 1e-12, "ensemble Delta average") +
         integrate(f, w, inf, 1e-12, "ensemble Delta average");
}

}  // namespace

double pdf_delta(double delta, double delta_ens) {
  if (!(delta > 0.0) || !(delta_ens > 0.0)) {
    throw InvalidArgument("pdf_delta: arguments must be positive");
  }
  const double u = delta_ens / delta;
  if (u > 40.0) return 0.0;
  return u / delta * kSqrt2OverPi * std::exp(-0.5 * u * u);
}

double cdf_delta(double delta, double delta_ens) {
  if (!(delta_ens > 0.0)) throw InvalidArgument("cdf_delta: delta_ens must be positive");
  if (!(delta > 0.0)) return 0.0;
  return std::erfc(delta_ens / (delta * std::numbers::sqrt2));
}

double pdf_tau_c(double tau, double tau_c_ens, double lambda) {
  if (!(tau > 0.0) || !(tau_c_ens > 0.0) || !(lambda > 0.0)) {
    throw InvalidArgument("pdf_tau_c: arguments must be positive");
  }
  const double d = tau - tau_c_ens;
  const double log_pdf = 0.5 * std::log(lambda / (2.0 * std::numbers::pi)) - 1.5 * std::log(tau) -
                         lambda * (d / tau_c_ens) * (d / tau_c_ens) / (2.0 * tau);
  return std::exp(log_pdf);
}

double cdf_tau_c(double tau, double tau_c_ens, double lambda) {
  if (!(tau_c_ens > 0.0) || !(lambda > 0.0)) {
    throw InvalidArgument("cdf_tau_c: parameters must be positive");
  }
  if (!(tau > 0.0)) return 0.0;
  const double s = std::sqrt(lambda / tau);
  const double z1 = s * (tau / tau_c_ens - 1.0);
  const double z2 = s * (tau / tau_c_ens + 1.0);
  const double first = 0.5 * std::erfc(-z1 / std::numbers::sqrt2);
  const double second =
      0.5 * std::exp(2.0 * lambda / tau_c_ens + log_erfc(z2 / std::numbers::sqrt2));
  return std::clamp(first + second, 0.0, 1.0);
}

std::string to_string(DeltaEstimator e) {
  switch (e) {
    case DeltaEstimator::MaximumLikelihood: return "mle";
    case DeltaEstimator::MedianMatching: return "median";
    case DeltaEstimator::HistogramLeastSquares: return "histogram";
  }
  return "mle";
}

std::string to_string(TauEstimator e) {
  return e == TauEstimator::MaximumLikelihood ? "mle" : "histogram";
}

DeltaEstimator delta_estimator_from_string(const std::string& name) {
  if (name == "mle") return DeltaEstimator::MaximumLikelihood;
  if (name == "median") return DeltaEstimator::MedianMatching;
  if (name == "histogram") return DeltaEstimator::HistogramLeastSquares;
  throw InvalidArgument("unknown Delta estimator '" + name + "'");
}

TauEstimator tau_estimator_from_string(const std::string& name) {
  if (name == "mle") return TauEstimator::MaximumLikelihood;
  if (name == "histogram") return TauEstimator::HistogramLeastSquares;
  throw InvalidArgument("unknown tau_c estimator '" + name + "'");
}

EnsembleStatistics fit_distributions(std::span<const double> delta_samples,
                                     std::span<const double> tau_samples,
                                     const DistributionFitOptions& options) {
  if (delta_samples.size() < 100) {
    throw InvalidArgument("fit_distributions: need at least 100 samples");
  }
  EnsembleStatistics stats;
  stats.method = options;
  stats.n_realizations = delta_samples.size();
  for (double d : delta_samples) {
    if (!(d > 0.0) || !std::isfinite(d)) throw DataError("fit_distributions: Delta samples must be positive");
  }
  stats.delta_samples.assign(delta_samples.begin(), delta_samples.end());
  std::vector<double> paired_delta;
  for (std::size_t i = 0; i < tau_samples.size(); ++i) {
    if (std::isfinite(tau_samples[i]) && tau_samples[i] > 0.0) {
      stats.tau_c_samples.push_back(tau_samples[i]);
      if (i < delta_samples.size()) paired_delta.push_back(delta_samples[i]);
    } else {
      ++stats.n_tau_infinite;
    }
  }
  if (degenerate(stats.delta_samples)) throw FitFailure("fit_distributions: Delta samples are degenerate");
  if (stats.tau_c_samples.size() < 2 || degenerate(stats.tau_c_samples)) {
    throw FitFailure("fit_distributions: tau_c samples are degenerate");
  }

  stats.delta_ens = fit_delta_ens(stats.delta_samples, options);
  std::tie(stats.tau_c_ens, stats.lambda_shape) = fit_tau(stats.tau_c_samples, options);
  if (!(stats.delta_ens > 0.0) || !(stats.tau_c_ens > 0.0) || !(stats.lambda_shape > 0.0)) {
    throw FitFailure("fit_distributions: nonpositive fitted parameter");
  }
  stats.ks_delta = ks_distance(stats.delta_samples,
                               [&](double x) { return cdf_delta(x, stats.delta_ens); });
  stats.ks_tau = ks_distance(stats.tau_c_samples, [&](double x) {
    return cdf_tau_c(x, stats.tau_c_ens, stats.lambda_shape);
  });
  stats.fit_residuals = std::max(stats.ks_delta, stats.ks_tau);
  if (paired_delta.size() == stats.tau_c_samples.size()) {
    stats.log_correlation = pearson_log(paired_delta, stats.tau_c_samples);
  }
  return stats;
}

EnsembleStatistics fit_distributions(std::span<const BathRealizationSummary> samples,
                                     const DistributionFitOptions& options) {
  std::vector<double> deltas;
  std::vector<double> taus;
  deltas.reserve(samples.size());
  taus.reserve(samples.size());
  for (const auto& s : samples) {
    deltas.push_back(s.delta_single);
    taus.push_back(s.tau_c_infinite ? std::numeric_limits<double>::infinity() : s.tau_c_single);
  }
  return fit_distributions(deltas, taus, options);
}

double t2_star_ensemble(double delta_ens) { return 1.0 / delta_ens; }

double t2_ensemble(double delta_ens, double tau_c_ens) {
  return std::cbrt(2.0 * tau_c_ens / (delta_ens * delta_ens));
}

double ensemble_fid_quadrature(double t, double delta_ens) {
  if (!(delta_ens > 0.0)) throw InvalidArgument("ensemble_fid: delta_ens must be positive");
  if (!(t >= 0.0)) throw InvalidArgument("ensemble_fid: t must be nonnegative");
  const double a = delta_ens * t;
  return delta_average(a * a);
}

DecayCurve ensemble_fid(std::span<const double> times, const EnsembleDecayParams& params) {
  if (params.sequence != PulseSequence::Ramsey) {
    throw InvalidArgument("ensemble_fid: parameters are for a different sequence");
  }
  validate_time_grid(times);
  DecayCurve curve;
  curve.sequence = PulseSequence::Ramsey;
  curve.times.assign(times.begin(), times.end());
  for (double t : times) {
    curve.values.push_back(0.5 * (1.0 + ensemble_fid_quadrature(t, params.delta_ens)));
    curve.reference.push_back(0.5 * (1.0 + std::exp(-params.delta_ens * t)));
  }
  curve.metadata = {{"source", "ensemble_fid"},
                    {"sequence", "ramsey"},
                    {"scale", "probability"},
                    {"delta_ens_rad_s", params.delta_ens},
                    {"t2_star_s", t2_star_ensemble(params.delta_ens)}};
  return curve;
}

DecayCurve ensemble_echo(std::span<const double> times, const EnsembleDecayParams& params) {
  if (params.sequence != PulseSequence::SpinEcho) {
    throw InvalidArgument("ensemble_echo: parameters are for a different sequence");
  }
  if (!(params.delta_ens > 0.0) || !(params.tau_c_ens > 0.0) || !(params.lambda_shape > 0.0)) {
    throw InvalidArgument("ensemble_echo: parameters must be positive");
  }
  validate_time_grid(times);
  const double mu = params.tau_c_ens;
  const double lam = params.lambda_shape;
  const double t2 = t2_ensemble(params.delta_ens, mu);

  // Outer variable v = log(tau / mu); the density in v is tau P(tau).
  const double width = std::max(1.0, 12.0 * std::sqrt(mu / lam));
  auto echo_average = [&](double t) {
    if (t == 0.0) return 1.0;
    const double k = params.delta_ens * params.delta_ens * t * t * t / 12.0;
    auto outer = [&](double v) {
      const double tau = mu * std::exp(v);
      if (!(tau > 0.0) || !std::isfinite(tau)) return 0.0;
      const double weight = tau * pdf_tau_c(tau, mu, lam);
      if (weight < 1e-300) return 0.0;
      return weight * delta_average(2.0 * k / tau);
    };
    const double inf = std::numeric_limits<double>::infinity();
    return integrate(outer, -inf, -width, 1e-9, "ensemble_echo") +
           integrate(outer, -width, 0.0, 1e-9, "ensemble_echo") +
           integrate(outer, 0.0, width, 1e-9, "ensemble_echo") +
           integrate(outer, width, inf, 1e-9, "ensemble_echo");
  };

  DecayCurve curve;
  curve.sequence = PulseSequence::SpinEcho;
  curve.times.assign(times.begin(), times.end());
  for (double t : times) {
    curve.values.push_back(0.5 * (1.0 + echo_average(t)));
    curve.reference.push_back(0.5 * (1.0 + std::exp(-std::pow(t / t2, 1.5))));
  }
  curve.metadata = {{"source", "ensemble_echo"},
                    {"sequence", "echo"},
                    {"scale", "probability"},
                    {"delta_ens_rad_s", params.delta_ens},
                    {"tau_c_ens_s", mu},
                    {"lambda_s", lam},
                    {"t2_s", t2}};
  if (times.back() > 0.3 * mu) {
    const std::string msg = "ensemble_echo: max t exceeds 0.3 tau_c_ens; short-time echo form may be inaccurate";
    warn(msg);
    curve.metadata["regime_warning"] = msg;
  }
  return curve;
}

double BoxPolicy::half_width(double ppm) const {
  if (!(value > 0.0)) throw InvalidArgument("box policy value must be positive");
  return kind == Kind::FixedHalfWidth ? value : half_width_for_count(ppm, value);
}

std::uint64_t realization_seed(std::uint64_t master_seed, double ppm, std::size_t index) {
  return derive_seed(master_seed, index, std::bit_cast<std::uint64_t>(ppm));
}

BathRealizationSummary simulate_realization(double ppm, std::size_t index,
                                            const SweepOptions& options) {
  const auto seed = realization_seed(options.master_seed, ppm, index);
  const auto config = generate_bath(ppm, options.box.half_width(ppm), seed, options.bath);
  return correlation_time(config, options.model);
}

std::vector<SweepPoint> sweep_concentration(const SweepOptions& options) {
  if (options.concentrations.empty()) throw InvalidArgument("sweep: concentration list is empty");
  if (!(options.confidence > 0.0 && options.confidence < 1.0)) {
    throw InvalidArgument("sweep: confidence must lie in (0, 1)");
  }
  std::vector<SweepPoint> points;
  for (double ppm : options.concentrations) {
    if (!(ppm > 0.0)) throw InvalidArgument("sweep: concentrations must be positive");
    if (ppm < 0.01 || ppm > 1000.0) {
      warn("sweep: " + format_double(ppm) + " ppm is outside the studied 0.01-1000 ppm range");
    }
    auto summaries = parallel_map<BathRealizationSummary>(
        options.n_realizations, options.workers,
        [&](std::size_t i) { return simulate_realization(ppm, i, options); });

    SweepPoint point;
    point.concentration_ppm = ppm;
    point.box_half_width_nm = options.box.half_width(ppm);
    point.n_realizations = summaries.size();
    point.seed = options.master_seed;
    point.stats = fit_distributions(summaries, options.fit);
    point.t2_star = t2_star_ensemble(point.stats.delta_ens);
    point.t2 = t2_ensemble(point.stats.delta_ens, point.stats.tau_c_ens);

    if (options.bootstrap_resamples > 0) {
      const std::uint64_t stream = kBootstrapStream ^ std::bit_cast<std::uint64_t>(ppm);
      struct Pair {
        double t2_star = 0.0;
        double t2 = 0.0;
      };
      auto boot = parallel_map<Pair>(options.bootstrap_resamples, options.workers, [&](std::size_t b) {
        Rng rng(derive_seed(options.master_seed, b, stream));
        std::vector<BathRealizationSummary> resample;
        resample.reserve(summaries.size());
        for (std::size_t k = 0; k < summaries.size(); ++k) {
          resample.push_back(summaries[rng.below(summaries.size())]);
        }
        try {
          const auto s = fit_distributions(resample, options.fit);
          return Pair{t2_star_ensemble(s.delta_ens), t2_ensemble(s.delta_ens, s.tau_c_ens)};
        } catch (const FitFailure&) {
          return Pair{NAN, NAN};
        }
      });
      std::vector<double> a;
      std::vector<double> b;
      for (const auto& p : boot) {
        if (std::isfinite(p.t2_star)) a.push_back(p.t2_star);
        if (std::isfinite(p.t2)) b.push_back(p.t2);
      }
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      const double tail = 0.5 * (1.0 - options.confidence);
      if (!a.empty()) {
        point.t2_star_ci_low = quantile_sorted(a, tail);
        point.t2_star_ci_high = quantile_sorted(a, 1.0 - tail);
      }
      if (!b.empty()) {
        point.t2_ci_low = quantile_sorted(b, tail);
        point.t2_ci_high = quantile_sorted(b, 1.0 - tail);
      }
    }
    if (!options.keep_samples) {
      point.stats.delta_samples.clear();
      point.stats.delta_samples.shrink_to_fit();
      point.stats.tau_c_samples.clear();
      point.stats.tau_c_samples.shrink_to_fit();
    } else {
      point.summaries = std::move(summaries);
    }
    points.push_back(std::move(point));
  }
  return points;
}

nlohmann::json to_json(const SweepPoint& p) {
  return {{"concentration_ppm", p.concentration_ppm},
          {"delta_ens_rad_s", p.stats.delta_ens},
          {"tau_c_ens_s", p.stats.tau_c_ens},
          {"lambda_s", p.stats.lambda_shape},
          {"t2_star_s", p.t2_star},
          {"t2_s", p.t2},
          {"ci_low", {{"t2_star_s", p.t2_star_ci_low}, {"t2_s", p.t2_ci_low}}},
          {"ci_high", {{"t2_star_s", p.t2_star_ci_high}, {"t2_s", p.t2_ci_high}}},
          {"n_realizations", p.n_realizations},
          {"n_tau_infinite", p.stats.n_tau_infinite},
          {"ks_delta", p.stats.ks_delta},
          {"ks_tau", p.stats.ks_tau},
          {"log_correlation", p.stats.log_correlation},
          {"box_half_width_nm", p.box_half_width_nm},
          {"seed", p.seed}};
}

std::string sweep_csv_header() {
  return "concentration_ppm,delta_ens_rad_s,tau_c_ens_s,lambda_s,t2_star_s,t2_s,"
         "t2_star_ci_low_s,t2_star_ci_high_s,t2_ci_low_s,t2_ci_high_s,n_realizations,seed";
}

std::string sweep_csv_row(const SweepPoint& p) {
  return format_double(p.concentration_ppm) + ',' + format_double(p.stats.delta_ens) + ',' +
         format_double(p.stats.tau_c_ens) + ',' + format_double(p.stats.lambda_shape) + ',' +
         format_double(p.t2_star) + ',' + format_double(p.t2) + ',' +
         format_double(p.t2_star_ci_low) + ',' + format_double(p.t2_star_ci_high) + ',' +
         format_double(p.t2_ci_low) + ',' + format_double(p.t2_ci_high) + ',' +
         std::to_string(p.n_realizations) + ',' + std::to_string(p.seed);
}

}  // namespace spinbath

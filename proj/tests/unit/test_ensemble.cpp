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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "spinbath/analysis.hpp"
#include "spinbath/ensemble.hpp"
#include "spinbath/errors.hpp"

namespace spinbath {
namespace {

const double kP1e = 0.5 * (1.0 + std::exp(-1.0));

TEST(PdfDelta, NormalizationModeAndLimit) {
  for (double d : {1e3, 1e5, 3e7}) {
    const double norm = oracle::integrate_half_line([&](double x) { return pdf_delta(x, d); }, d);
    EXPECT_NEAR(norm, 1.0, 1e-6);
    // Grid search for the mode around d / sqrt 2.
    double best = 0.0;
    double best_x = 0.0;
    for (int k = 1; k < 20000; ++k) {
      const double x = d * 1e-4 * k;
      if (pdf_delta(x, d) > best) {
        best = pdf_delta(x, d);
        best_x = x;
      }
    }
    EXPECT_NEAR(best_x, d / std::sqrt(2.0), 2e-4 * d);
    EXPECT_LT(pdf_delta(1e-3 * d, d), 1e-100);
    EXPECT_NEAR(cdf_delta(d, d), std::erfc(1.0 / std::sqrt(2.0)), 1e-14);
  }
  EXPECT_THROW(pdf_delta(-1.0, 1.0), InvalidArgument);
  EXPECT_THROW(pdf_delta(1.0, 0.0), InvalidArgument);
}

TEST(PdfTau, NormalizationMeanVariance) {
  const double mu = 2e-4;
  for (double lambda : {1e-7, 2e-5, 2e-4, 5e-3}) {
    auto f = [&](double x) { return pdf_tau_c(x, mu, lambda); };
    const double norm = oracle::integrate_half_line(f, mu);
    EXPECT_NEAR(norm, 1.0, 1e-6) << lambda;
    const double mean = oracle::integrate_half_line([&](double x) { return x * f(x); }, mu);
    EXPECT_NEAR(mean / mu, 1.0, 1e-4) << lambda;
  }
  const double lambda = 1e6 * mu;
  auto f = [&](double x) { return pdf_tau_c(x, mu, lambda); };
  const double sigma = std::sqrt(mu * mu * mu / lambda);
  auto g = [&](double x) { return (x - mu) * (x - mu) * f(x); };
  const double var = oracle::integrate_interval(g, mu - 30.0 * sigma, mu) +
                     oracle::integrate_interval(g, mu, mu + 30.0 * sigma);
  EXPECT_LT(var, 1e-3 * mu * mu);
  EXPECT_NEAR(var, mu * mu * mu / lambda, 1e-3 * mu * mu * mu / lambda);
  EXPECT_NEAR(cdf_tau_c(mu, mu, 2e-4),
              oracle::integrate_interval([](double x) { return pdf_tau_c(x, 2e-4, 2e-4); }, 0.0, mu), 1e-9);
  EXPECT_THROW(pdf_tau_c(1.0, -1.0, 1.0), InvalidArgument);
  EXPECT_THROW(pdf_tau_c(1.0, 1.0, 0.0), InvalidArgument);
}

TEST(FitDistributions, RecoversDeltaFromSyntheticSamples) {
  const auto d = oracle::sample_delta(1e5, 10000, 1);
  const std::vector<double> tau = oracle::sample_inverse_gaussian(1e-4, 3e-4, 10000, 2);
  for (auto est : {DeltaEstimator::MaximumLikelihood, DeltaEstimator::MedianMatching,
                   DeltaEstimator::HistogramLeastSquares}) {
    DistributionFitOptions opt;
    opt.delta = est;
    const auto s = fit_distributions(d, tau, opt);
    EXPECT_NEAR(s.delta_ens, 1e5, 3e3) << to_string(est);
  }
}

TEST(FitDistributions, RecoversInverseGaussianParameters) {
  const auto d = oracle::sample_delta(1e5, 10000, 3);
  for (double lambda : {5e-5, 1e-4, 1e-3}) {
    const auto tau = oracle::sample_inverse_gaussian(1e-4, lambda, 10000, 4);
    const auto s = fit_distributions(d, tau);
    EXPECT_NEAR(s.tau_c_ens, 1e-4, 5e-6) << lambda;
    EXPECT_NEAR(s.lambda_shape, lambda, 0.05 * lambda) << lambda;
    EXPECT_LT(s.ks_tau, 0.03);
    EXPECT_LT(s.ks_delta, 0.03);
    EXPECT_EQ(s.n_realizations, 10000u);
  }
}

TEST(FitDistributions, Errors) {
  const std::vector<double> few(50, 1.0);
  EXPECT_THROW(fit_distributions(few, few), InvalidArgument);
  const std::vector<double> flat(200, 1.0);
  EXPECT_THROW(fit_distributions(flat, flat), FitFailure);
}

TEST(FitDistributions, SimulatedShapes) {
  SweepOptions opt;
  std::vector<BathRealizationSummary> s;
  for (std::size_t i = 0; i < 1000; ++i) s.push_back(simulate_realization(100.0, i, opt));
  const auto st = fit_distributions(s);
  std::vector<double> d = st.delta_samples;
  std::sort(d.begin(), d.end());
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  EXPECT_GT(mean, d[d.size() / 2]);  // right-skewed
  std::vector<double> t = st.tau_c_samples;
  std::sort(t.begin(), t.end());
  EXPECT_GT(t[t.size() * 99 / 100] / t[t.size() / 2], 10.0);  // heavy upper tail
  EXPECT_GT(st.delta_ens, 0.0);
  EXPECT_GT(st.lambda_shape, 0.0);
}

TEST(EnsembleFid, ExactIdentity) {
  const double d = 2.5e6;
  double worst = 0.0;
  for (double t : log_grid(1e-3 / d, 5.0 / d, 60)) {
    worst = std::max(worst, std::abs(ensemble_fid_quadrature(t, d) - std::exp(-d * t)));
  }
  EXPECT_LT(worst, 1e-6);
  // Independent check of the same integral with a double-exponential rule.
  for (double t : {0.1 / d, 1.0 / d, 3.0 / d}) {
    const double ref = oracle::integrate_half_line(
        [&](double x) { return pdf_delta(x, d) * std::exp(-0.5 * x * x * t * t); }, d);
    EXPECT_NEAR(ref, std::exp(-d * t), 1e-8);
  }
}

TEST(EnsembleFid, CurveShapeAndExponent) {
  const EnsembleDecayParams p{1e6, 1e-4, 1e-4, PulseSequence::Ramsey};
  const auto grid = linear_grid(0.0, 5.0 / p.delta_ens, 200);
  const auto c = ensemble_fid(grid, p);
  EXPECT_NEAR(c.values.front(), 1.0, 1e-12);
  for (std::size_t k = 1; k < c.size(); ++k) {
    EXPECT_LE(c.values[k], c.values[k - 1] + 1e-15);
    EXPECT_GE(c.values[k], 0.5);
    EXPECT_NEAR(c.values[k], c.reference[k], 1e-6);
  }
  const std::vector<double> at{1.0 / p.delta_ens};
  EXPECT_NEAR(ensemble_fid(at, p).values[0], kP1e, 1e-6);
  EXPECT_NEAR(fit_stretched_exp(c).p, 1.0, 0.02);
  EXPECT_NEAR(t2_star_ensemble(p.delta_ens), 1e-6, 1e-18);
}

TEST(EnsembleEcho, ExponentReferenceAndAgreement) {
  const double tau = 5.46e-4;
  const EnsembleDecayParams p{9.04e5, tau, tau, PulseSequence::SpinEcho};
  const double t2 = t2_ensemble(p.delta_ens, p.tau_c_ens);
  EXPECT_NEAR(t2, std::cbrt(2.0 * tau / (p.delta_ens * p.delta_ens)), 1e-18);

  const std::vector<double> at{t2};
  EXPECT_NEAR(ensemble_echo(at, p).reference[0], kP1e, 1e-12);

  const auto grid = linear_grid(0.0, t2, 40);
  const auto c = ensemble_echo(grid, p);
  EXPECT_NEAR(c.values.front(), 1.0, 1e-9);
  for (std::size_t k = 1; k < c.size(); ++k) EXPECT_LE(c.values[k], c.values[k - 1] + 1e-12);
  // RMS of the probability difference; ~0.038 measured.
  EXPECT_LT(oracle::rms_difference(c.values, c.reference), 0.05);

  const auto wide = ensemble_echo(linear_grid(0.0, 4.0 * t2, 60), p);
  const double exponent = fit_stretched_exp(wide).p;
  EXPECT_GE(exponent, 1.3);
  EXPECT_LE(exponent, 1.7);
}

TEST(EnsembleEcho, RegimeWarningInMetadata) {
  const EnsembleDecayParams p{1e6, 1e-6, 1e-6, PulseSequence::SpinEcho};
  const std::vector<double> grid{0.0, 1e-7, 5e-7};
  const auto c = ensemble_echo(grid, p);
  EXPECT_TRUE(c.metadata.contains("regime_warning"));
  const std::vector<double> ok{0.0, 1e-8, 2e-7};
  EXPECT_FALSE(ensemble_echo(ok, p).metadata.contains("regime_warning"));
}

TEST(Seeds, RealizationSeedDependsOnlyOnInputs) {
  EXPECT_EQ(realization_seed(1, 10.0, 5), realization_seed(1, 10.0, 5));
  EXPECT_NE(realization_seed(1, 10.0, 5), realization_seed(1, 10.0, 6));
  EXPECT_NE(realization_seed(1, 10.0, 5), realization_seed(1, 30.0, 5));
  EXPECT_NE(realization_seed(1, 10.0, 5), realization_seed(2, 10.0, 5));
}

SweepOptions small_sweep() {
  SweepOptions o;
  o.concentrations = {3.0, 30.0};
  o.n_realizations = 300;
  o.bootstrap_resamples = 20;
  o.master_seed = 5;
  return o;
}

TEST(Sweep, IdenticalForAnyWorkerCount) {
  auto o = small_sweep();
  o.workers = 1;
  const auto a = sweep_concentration(o);
  o.workers = 4;
  const auto b = sweep_concentration(o);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(to_json(a[k]).dump(), to_json(b[k]).dump());
    EXPECT_EQ(sweep_csv_row(a[k]), sweep_csv_row(b[k]));
  }
}

TEST(Sweep, OutputSchema) {
  const auto pts = sweep_concentration(small_sweep());
  ASSERT_EQ(pts.size(), 2u);
  const auto j = to_json(pts[0]);
  for (const char* key : {"concentration_ppm", "delta_ens_rad_s", "tau_c_ens_s", "lambda_s", "t2_star_s",
                          "t2_s", "ci_low", "ci_high", "n_realizations", "seed"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  for (const auto& p : pts) {
    EXPECT_NEAR(p.t2_star, 1.0 / p.stats.delta_ens, 1e-20);
    EXPECT_NEAR(p.t2, std::cbrt(2.0 * p.stats.tau_c_ens / std::pow(p.stats.delta_ens, 2)), 1e-18);
    EXPECT_LE(p.t2_star_ci_low, p.t2_star);
    EXPECT_GE(p.t2_star_ci_high, p.t2_star);
  }
  EXPECT_EQ(sweep_csv_header().substr(0, 17), "concentration_ppm");
  SweepOptions empty;
  EXPECT_THROW(sweep_concentration(empty), InvalidArgument);
}

TEST(Sweep, DeltaEnsStableUnderDoubling) {
  SweepOptions o;
  o.concentrations = {10.0};
  o.bootstrap_resamples = 0;
  o.n_realizations = 2000;
  const double a = sweep_concentration(o)[0].stats.delta_ens;
  o.n_realizations = 4000;
  const double b = sweep_concentration(o)[0].stats.delta_ens;
  EXPECT_NEAR(b / a, 1.0, 0.02);
}

TEST(Sweep, RatioConcentrationIndependent) {
  SweepOptions opt;
  opt.concentrations = {1.0, 10.0, 100.0};
  opt.n_realizations = 2000;
  opt.bootstrap_resamples = 0;
  const auto points = sweep_concentration(opt);
  std::vector<double> ratios;
  for (const auto& pt : points) ratios.push_back(pt.t2 / pt.t2_star);
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double mid = sorted[1];
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    EXPECT_NEAR(ratios[k] / mid, 1.0, 0.2) << opt.concentrations[k] << " ppm";
  }
}

TEST(BoxPolicy, HalfWidth) {
  BoxPolicy fixed{BoxPolicy::Kind::FixedHalfWidth, 12.0};
  EXPECT_EQ(fixed.half_width(3.0), 12.0);
  BoxPolicy target{BoxPolicy::Kind::TargetCount, 500.0};
  EXPECT_NEAR(expected_spin_count(7.0, target.half_width(7.0)), 500.0, 1e-9);
}

TEST(Estimators, StringRoundTrip) {
  for (auto e : {DeltaEstimator::MaximumLikelihood, DeltaEstimator::MedianMatching,
                 DeltaEstimator::HistogramLeastSquares}) {
    EXPECT_EQ(delta_estimator_from_string(to_string(e)), e);
  }
  for (auto e : {TauEstimator::MaximumLikelihood, TauEstimator::HistogramLeastSquares}) {
    EXPECT_EQ(tau_estimator_from_string(to_string(e)), e);
  }
  EXPECT_THROW(delta_estimator_from_string("mean"), InvalidArgument);
}

}  // namespace
}  // namespace spinbath

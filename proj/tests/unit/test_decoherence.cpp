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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "spinbath/analysis.hpp"
#include "spinbath/decoherence.hpp"
#include "spinbath/errors.hpp"

namespace spinbath {
namespace {

constexpr double kPi = std::numbers::pi;
const double kP1e = 0.5 * (1.0 + std::exp(-1.0));

TEST(FilterFunction, Examples) {
  EXPECT_NEAR(filter_function(PulseSequence::Ramsey, kPi), 2.0, 1e-15);
  EXPECT_EQ(filter_function(PulseSequence::SpinEcho, 0.0), 0.0);
  EXPECT_NEAR(filter_function(PulseSequence::SpinEcho, 2.0 * kPi), 8.0, 1e-14);
  EXPECT_NEAR(filter_function(PulseSequence::Ramsey, 0.7), 2.0 * std::pow(std::sin(0.35), 2), 1e-15);
}

TEST(Chi, Examples) {
  const OuNoiseModel m{3.0, 2.0};
  const double scale = m.delta * m.delta * m.tau_c * m.tau_c;
  EXPECT_NEAR(chi(PulseSequence::Ramsey, m.tau_c, m) / scale, std::exp(-1.0), 1e-14);
  EXPECT_NEAR(chi(PulseSequence::Ramsey, m.tau_c, m) / scale, 0.367879, 1e-6);
  const double bracket = 1.0 - 3.0 - std::exp(-1.0) + 4.0 * std::exp(-0.5);
  EXPECT_NEAR(chi(PulseSequence::SpinEcho, m.tau_c, m) / scale, bracket, 1e-14);
  // The bracket is 0.0582432; the four-digit hand value 0.058236 is 7e-6 low.
  EXPECT_NEAR(chi(PulseSequence::SpinEcho, m.tau_c, m) / scale, 0.058236, 1e-5);
  EXPECT_EQ(chi(PulseSequence::Ramsey, 0.0, m), 0.0);
  EXPECT_EQ(chi(PulseSequence::SpinEcho, 0.0, m), 0.0);
}

TEST(Chi, MatchesCorrelationDoubleIntegral) {
  for (double delta : {0.3, 2.0, 50.0}) {
    for (double tau : {0.01, 1.0, 30.0}) {
      const OuNoiseModel m{delta, tau};
      for (double t : {1e-3, 0.05, 0.7, 4.0, 40.0}) {
        for (bool echo : {false, true}) {
          const double ref = oracle::chi_double_integral(echo, t, delta, tau);
          const double got = chi(echo ? PulseSequence::SpinEcho : PulseSequence::Ramsey, t, m);
          EXPECT_NEAR(got, ref, 1e-9 * std::max(ref, 1e-12)) << delta << ' ' << tau << ' ' << t << ' ' << echo;
        }
      }
    }
  }
}

TEST(Chi, StableAtTinyTimes) {
  const OuNoiseModel m{1e6, 1e-3};
  for (double r : {1e-12, 1e-9, 1e-7, 3e-6}) {
    const double t = r * m.tau_c;
    const double fid = chi(PulseSequence::Ramsey, t, m);
    const double se = chi(PulseSequence::SpinEcho, t, m);
    EXPECT_NEAR(fid / chi_short_time(PulseSequence::Ramsey, t, m), 1.0, 1e-5);
    EXPECT_NEAR(se / chi_short_time(PulseSequence::SpinEcho, t, m), 1.0, 1e-5);
    EXPECT_GE(se, 0.0);
  }
}

TEST(Chi, Properties) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const OuNoiseModel m{std::pow(10.0, 6.0 * u(gen) - 1.0), std::pow(10.0, 4.0 * u(gen) - 2.0)};
    double prev_fid = 0.0;
    double prev_se = 0.0;
    for (int i = 1; i <= 60; ++i) {
      const double t = m.tau_c * std::pow(10.0, -4.0 + 0.1 * i);
      const double fid = chi(PulseSequence::Ramsey, t, m);
      const double se = chi(PulseSequence::SpinEcho, t, m);
      ASSERT_GE(fid, 0.0);
      ASSERT_GE(se, 0.0);
      ASSERT_GE(fid, prev_fid * (1.0 - 1e-12));
      ASSERT_GE(se, prev_se * (1.0 - 1e-12));
      ASSERT_LE(se, fid * (1.0 + 1e-12));
      OuNoiseModel stronger = m;
      stronger.delta *= 1.1;
      ASSERT_GT(chi(PulseSequence::Ramsey, t, stronger), fid);
      prev_fid = fid;
      prev_se = se;
    }
  }
}

TEST(ChiShortTime, Examples) {
  EXPECT_NEAR(chi_short_time(PulseSequence::SpinEcho, 1.0, {std::sqrt(12.0), 1.0}), 1.0, 1e-15);
  EXPECT_EQ(chi_short_time(PulseSequence::Ramsey, 0.0, {2.0, 1.0}), 0.0);
  EXPECT_EQ(chi_short_time(PulseSequence::SpinEcho, 0.0, {2.0, 1.0}), 0.0);
  const OuNoiseModel m{5.0, 1.0};
  for (double t = 1e-4; t <= 0.03; t += 1e-3) {
    const double exact = chi(PulseSequence::Ramsey, t, m);
    EXPECT_LT(std::abs(chi_short_time(PulseSequence::Ramsey, t, m) - exact) / exact, 0.01);
  }
}

TEST(SingleNvSignal, Examples) {
  const OuNoiseModel m{2e6, 1e-3};
  const double t2s = t2_star_single(m.delta);
  const double t2 = t2_single(m.delta, m.tau_c);
  EXPECT_NEAR(t2s, std::sqrt(2.0) / m.delta, 1e-20);
  EXPECT_NEAR(t2, std::cbrt(12.0 * m.tau_c / (m.delta * m.delta)), 1e-18);

  const std::vector<double> ts{t2s};
  const auto fid = single_nv_signal(PulseSequence::Ramsey, ts, m);
  EXPECT_NEAR(fid.reference[0], kP1e, 1e-12);
  EXPECT_NEAR(fid.values[0], kP1e, 2e-3);
  const std::vector<double> te{t2};
  const auto echo = single_nv_signal(PulseSequence::SpinEcho, te, m);
  EXPECT_NEAR(echo.reference[0], kP1e, 1e-12);
  EXPECT_NEAR(echo.values[0], kP1e, 2e-3);

  const std::vector<double> late{0.0, 1.0};
  const auto floor = single_nv_signal(PulseSequence::Ramsey, late, m);
  EXPECT_NEAR(floor.values[0], 1.0, 1e-12);
  EXPECT_NEAR(floor.values[1], 0.5, 1e-12);
  EXPECT_EQ(floor.scale, CurveScale::Probability);
}

TEST(SingleNvSignal, StretchExponentRecovery) {
  const OuNoiseModel m{1e7, 1e-3};
  const auto grid = linear_grid(0.0, 0.1 * m.tau_c, 400);
  const auto fid = fit_stretched_exp(single_nv_signal(PulseSequence::Ramsey, grid, m));
  EXPECT_NEAR(fid.p, 2.0, 0.05);
  const auto echo = fit_stretched_exp(single_nv_signal(PulseSequence::SpinEcho, grid, m));
  EXPECT_NEAR(echo.p, 3.0, 0.1);
}

TEST(TimeGrid, Validation) {
  EXPECT_NO_THROW(validate_time_grid(linear_grid(0.0, 1.0, 5)));
  const std::vector<double> dup{0.0, 1.0, 1.0};
  EXPECT_THROW(validate_time_grid(dup), InvalidArgument);
  const std::vector<double> neg{-1.0, 1.0};
  EXPECT_THROW(validate_time_grid(neg), InvalidArgument);
  const auto lg = log_grid(1e-6, 1e-2, 5);
  EXPECT_NEAR(lg[2], 1e-4, 1e-18);
  EXPECT_THROW(log_grid(0.0, 1.0, 5), InvalidArgument);
}

TEST(DecayCurve, CsvRoundTripAndCoherenceView) {
  const OuNoiseModel m{1e6, 1e-4};
  const auto curve = single_nv_signal(PulseSequence::SpinEcho, linear_grid(0.0, 2e-5, 17), m);
  const auto back = decay_curve_from_csv(to_csv(curve), curve.metadata);
  EXPECT_EQ(back.times, curve.times);
  EXPECT_EQ(back.values, curve.values);
  EXPECT_EQ(back.reference, curve.reference);
  EXPECT_EQ(back.sequence, PulseSequence::SpinEcho);
  const auto coh = curve.coherence_view();
  EXPECT_EQ(coh.scale, CurveScale::Coherence);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    EXPECT_NEAR(coh.values[k], 2.0 * curve.values[k] - 1.0, 1e-15);
  }
  EXPECT_THROW(decay_curve_from_csv("t_s,value\n1,abc\n"), DataError);
}

TEST(OuMonteCarlo, NoNoise) {
  const auto grid = linear_grid(0.0, 1.0, 11);
  const auto mc = ou_monte_carlo(PulseSequence::Ramsey, grid, {0.0, 1.0}, 200, 3);
  for (double v : mc.values) EXPECT_EQ(v, 1.0);
  EXPECT_THROW(ou_monte_carlo(PulseSequence::Ramsey, grid, {1.0, 1.0}, 99, 3), InvalidArgument);
}

TEST(OuMonteCarlo, StaticFieldEchoRefocuses) {
  const double t_max = 1e-5;
  const auto grid = linear_grid(0.0, t_max, 21);
  const auto mc = ou_monte_carlo(PulseSequence::SpinEcho, grid, {1e6, 1e6 * t_max}, 2000, 4);
  for (double v : mc.values) EXPECT_NEAR(v, 1.0, 1e-3);
}

TEST(OuMonteCarlo, WithinThreeStandardErrors) {
  const OuNoiseModel m{1e6, 5e-6};
  const auto grid = linear_grid(1e-7, 6e-6, 30);
  for (auto seq : {PulseSequence::Ramsey, PulseSequence::SpinEcho}) {
    const auto mc = ou_monte_carlo(seq, grid, m, 10000, 17);
    const auto exact = single_nv_signal(seq, grid, m);
    int outside = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      ASSERT_GT(mc.stderrs[k], 0.0);
      if (std::abs(mc.values[k] - exact.values[k]) > 3.0 * mc.stderrs[k]) ++outside;
    }
    // Correlated points along one trajectory set; allow a single excursion.
    EXPECT_LE(outside, 1) << to_string(seq);
  }
}

TEST(OuMonteCarlo, IndependentOfWorkers) {
  const auto grid = linear_grid(0.0, 4e-6, 25);
  const OuNoiseModel m{1e6, 2e-6};
  const auto a = ou_monte_carlo(PulseSequence::SpinEcho, grid, m, 1000, 9, 1);
  const auto b = ou_monte_carlo(PulseSequence::SpinEcho, grid, m, 1000, 9, 3);
  EXPECT_EQ(to_csv(a), to_csv(b));
}

TEST(PulseSequenceNames, RoundTrip) {
  EXPECT_EQ(sequence_from_string(to_string(PulseSequence::Ramsey)), PulseSequence::Ramsey);
  EXPECT_EQ(sequence_from_string(to_string(PulseSequence::SpinEcho)), PulseSequence::SpinEcho);
  EXPECT_THROW(sequence_from_string("cpmg"), InvalidArgument);
}

}  // namespace
}  // namespace spinbath

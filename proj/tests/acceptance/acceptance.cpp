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

// Prints one PASS/FAIL line per acceptance criterion. Exit status is nonzero
// when any hard criterion fails; criterion 7 and the lines marked INFO are
// reported but do not affect it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spinbath/analysis.hpp"
#include "spinbath/bath_dynamics.hpp"
#include "spinbath/constants.hpp"
#include "spinbath/decoherence.hpp"
#include "spinbath/ensemble.hpp"
#include "spinbath/lattice.hpp"
#include "spinbath/rng.hpp"
#include "spinbath_cli/app.hpp"
#include "spinbath_cli/manifest.hpp"

using namespace spinbath;

namespace {

int hard_failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail, bool informational = false) {
  std::printf("criterion %d [%s] %s%s  %s\n", id, title, pass ? "PASS" : "FAIL",
              informational ? " (informational)" : "", detail.c_str());
  std::fflush(stdout);
  if (!pass && !informational) ++hard_failures;
}

void info(const std::string& line) {
  std::printf("INFO %s\n", line.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<SamplePoint> points_of(const std::vector<SweepPoint>& sweep, bool t2) {
  std::vector<SamplePoint> out;
  for (const auto& p : sweep) {
    SamplePoint s;
    s.concentration_ppm = p.concentration_ppm;
    s.t_seconds = t2 ? p.t2 : p.t2_star;
    s.measurement = t2 ? Measurement::T2 : Measurement::T2Star;
    out.push_back(s);
  }
  return out;
}

double rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

// Time at which chi reaches `target`, by bisection.
double chi_crossing(PulseSequence seq, const OuNoiseModel& m, double target) {
  double hi = 1.0 / m.delta;
  while (chi(seq, hi, m) < target) hi *= 2.0;
  double lo = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (chi(seq, mid, m) < target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> ppm{1.0, 3.0, 10.0, 30.0, 100.0};

  SweepOptions sweep_opt;
  sweep_opt.concentrations = ppm;
  sweep_opt.n_realizations = 2000;
  sweep_opt.master_seed = 1;
  sweep_opt.box = {BoxPolicy::Kind::TargetCount, 500.0};
  sweep_opt.bootstrap_resamples = 0;
  sweep_opt.keep_samples = true;
  const auto sweep = sweep_concentration(sweep_opt);
  const double sweep_time = seconds_since(start);

  // 1. T2* scaling.
  {
    const auto fit = fit_scaling(points_of(sweep, false), false);
    const double inv_a = 1.0 / fit.rate_per_ppm * 1e6;
    std::vector<double> t;
    for (const auto& p : sweep) t.push_back(p.t2_star);
    const double slope = fit_power_law(ppm, t).exponent;
    const bool pass = inv_a >= 9.6 / 2.0 && inv_a <= 9.6 * 2.0 && std::abs(slope + 1.0) <= 0.05 && sweep_time < 600.0;
    report(1, "dephasing-rate scaling", pass,
           fmt("1/A = %.2f us*ppm (allowed 4.8-19.2), slope = %.3f (allowed -1.00 +- 0.05), sweep %.0f s", inv_a,
               slope, sweep_time));
  }

  // 2. T2 scaling.
  double inv_b = 0.0;
  {
    const auto fit = fit_scaling(points_of(sweep, true), false);
    inv_b = 1.0 / fit.rate_per_ppm * 1e6;
    std::vector<double> t;
    for (const auto& p : sweep) t.push_back(p.t2);
    const double slope = fit_power_law(ppm, t).exponent;
    const bool pass = inv_b >= 160.0 / 3.0 && inv_b <= 160.0 * 3.0 && std::abs(slope + 1.0) <= 0.15;
    report(2, "decoherence scaling", pass,
           fmt("1/B = %.1f us*ppm (allowed 53.3-480), slope = %.3f (allowed -1.0 +- 0.15)", inv_b, slope));
  }

  // 3. Stretch exponents.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const OuNoiseModel single{1e7, 1e-3};
    const auto grid = linear_grid(0.0, 0.1 * single.tau_c, 400);
    const double p_fid = fit_stretched_exp(single_nv_signal(PulseSequence::Ramsey, grid, single)).p;
    const double p_echo = fit_stretched_exp(single_nv_signal(PulseSequence::SpinEcho, grid, single)).p;

    const auto& mid = sweep[2];
    const double d = mid.stats.delta_ens;
    const double tau = mid.stats.tau_c_ens;
    const EnsembleDecayParams fid_params{d, tau, tau, PulseSequence::Ramsey};
    const double p_ens_fid = fit_stretched_exp(ensemble_fid(linear_grid(0.0, 5.0 / d, 200), fid_params)).p;
    const EnsembleDecayParams echo_params{d, tau, tau, PulseSequence::SpinEcho};
    const double t2 = t2_ensemble(d, tau);
    const auto echo_grid = linear_grid(0.0, 4.0 * t2, 60);
    const double p_ens_echo = fit_stretched_exp(ensemble_echo(echo_grid, echo_params)).p;
    const bool pass = std::abs(p_fid - 2.0) <= 0.05 && std::abs(p_echo - 3.0) <= 0.1 &&
                      std::abs(p_ens_fid - 1.0) <= 0.05 && p_ens_echo >= 1.3 && p_ens_echo <= 1.7;
    report(3, "decay-shape exponents", pass,
           fmt("single FID p = %.4f, single echo p = %.4f, ensemble FID p = %.4f, ensemble echo p = %.4f", p_fid,
               p_echo, p_ens_fid, p_ens_echo) +
               fmt(" (lambda = tau_c,ens at %.0f ppm), %.1f s", mid.concentration_ppm, seconds_since(t0)));

    EnsembleDecayParams fitted = echo_params;
    fitted.lambda_shape = mid.stats.lambda_shape;
    const double p_fitted = fit_stretched_exp(ensemble_echo(echo_grid, fitted)).p;
    info(fmt("ensemble echo with the fitted lambda = %.3g s (lambda/tau_c,ens = %.2g): p = %.4f",
             fitted.lambda_shape, fitted.lambda_shape / tau, p_fitted));
  }

  // 4. Ensemble FID identity.
  {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double d : {sweep[0].stats.delta_ens, sweep[2].stats.delta_ens, sweep[4].stats.delta_ens}) {
      for (double t : log_grid(1e-3 / d, 5.0 / d, 50)) {
        worst = std::max(worst, std::abs(ensemble_fid_quadrature(t, d) - std::exp(-d * t)));
      }
    }
    const double elapsed = seconds_since(t0);
    report(4, "exact ensemble-FID identity", worst < 1e-6 && elapsed < 3.0,
           fmt("max |quadrature - exp(-Delta_ens t)| = %.2e over 3 x 50 log-spaced t (allowed 1e-6), %.3f s",
               worst, elapsed));
  }

  // 5. OU Monte Carlo vs closed form.
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const double delta = std::pow(10.0, 5.0 + 2.0 * u(gen));
      const double product = std::pow(10.0, std::log10(3.0) + (2.0 - std::log10(3.0)) * u(gen));
      const OuNoiseModel m{delta, product / delta};
      for (auto seq : {PulseSequence::Ramsey, PulseSequence::SpinEcho}) {
        const auto grid = linear_grid(0.0, chi_crossing(seq, m, 5.0), 50);
        const auto mc = ou_monte_carlo(seq, grid, m, 10000, derive_seed(55, static_cast<std::uint64_t>(k)));
        const auto exact = single_nv_signal(seq, grid, m);
        worst = std::max(worst, rms(mc.values, exact.values));
      }
    }
    const double elapsed = seconds_since(t0);
    report(5, "OU oracle equivalence", worst < 0.02 && elapsed < 120.0,
           fmt("worst RMS(p_MC - p_exact) = %.4f over 10 (Delta, tau_c) x {FID, echo} (allowed 0.02), %.1f s",
               worst, elapsed));
  }

  // 6. Flip-flop rate vs master equation.
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    bool all_exponential = true;
    for (int k = 0; k < 50; ++k) {
      PseudoSpinPair pair;
      pair.omega = std::pow(10.0, 2.0 + 3.0 * u(gen));
      pair.gamma_d = pair.omega * std::pow(10.0, 1.0 + u(gen));
      pair.delta = pair.gamma_d * (u(gen) < 0.2 ? 0.0 : std::pow(10.0, -2.0 + 2.5 * u(gen)));
      const double rate = flip_flop_rate(pair);
      const auto oracle = flip_flop_rate_oracle(pair, 2.5 / rate);
      all_exponential = all_exponential && oracle.exponential;
      worst = std::max(worst, std::abs(oracle.rate / rate - 1.0));
    }
    const double elapsed = seconds_since(t0);
    report(6, "flip-flop-rate oracle", worst <= 0.15 && all_exponential && elapsed < 60.0,
           fmt("worst |R_oracle / R - 1| = %.4f over 50 pairs with Gamma_d/Omega in [10, 100] (allowed 0.15), %.1f s",
               worst, elapsed));
  }

  // 7. T2 / T2* ratio.
  {
    const double r10 = sweep[2].t2 / sweep[2].t2_star;
    const double r100 = sweep[4].t2 / sweep[4].t2_star;
    const bool pass = r10 >= 5.0 && r10 <= 50.0 && r100 >= 5.0 && r100 <= 50.0;
    report(7, "T2/T2* ratio", pass, fmt("T2/T2* = %.2f at 10 ppm, %.2f at 100 ppm (range 5-50)", r10, r100), true);
  }

  // 8. Forward-model fixtures.
  {
    ScalingFit f;
    f.rate_per_ppm = kTwoPi * 1.0e3;
    f.intercept = 1.0 / 694e-6;
    const double t10 = f.predict_t(10.0) * 1e6;
    const double t01 = f.predict_t(0.1) * 1e6;
    // Hand evaluation: 1 / (62831.85 + 1440.92) s and 1 / (628.32 + 1440.92) s.
    const bool pass = std::abs(t10 - 15.559) < 0.01 && std::abs(t01 - 483.27) < 0.1 && t01 < 694.0;
    report(8, "forward-model prediction fixture", pass,
           fmt("T2(10 ppm) = %.3f us (fixture 15.56), T2(0.1 ppm) = %.2f us (fixture 483.3, below 694)", t10, t01));
  }

  // 9. Determinism under worker count.
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> differing;
    auto check = [&](bool equal, const std::string& what) {
      if (!equal) differing.push_back(what);
    };
    SweepOptions o;
    o.concentrations = {1.0, 10.0, 100.0};
    o.n_realizations = 400;
    o.bootstrap_resamples = 20;
    o.master_seed = 9;
    o.workers = 1;
    const auto a = sweep_concentration(o);
    o.workers = 4;
    const auto b = sweep_concentration(o);
    for (std::size_t k = 0; k < a.size(); ++k) check(to_json(a[k]).dump() == to_json(b[k]).dump(), "sweep");
    check(generate_bath(10.0, 30.0, 77) == generate_bath(10.0, 30.0, 77), "generate_bath");
    const auto grid = linear_grid(0.0, 5e-6, 40);
    const OuNoiseModel m{1e6, 3e-6};
    check(to_csv(ou_monte_carlo(PulseSequence::SpinEcho, grid, m, 2000, 4, 1)) ==
              to_csv(ou_monte_carlo(PulseSequence::SpinEcho, grid, m, 2000, 4, 4)),
          "ou_monte_carlo");

    namespace fs = std::filesystem;
    const auto tmp = fs::temp_directory_path() / "spinbath_acceptance";
    fs::remove_all(tmp);
    std::ostringstream sink;
    for (const char* w : {"1", "4"}) {
      const std::vector<std::string> args{"spinbath", "sweep", "--ppm", "3,30", "--n", "200", "--seed", "2",
                                          "--bootstrap", "10", "--keep-samples", "--workers", w,
                                          "--out", (tmp / w).string()};
      check(cli::run_cli(args, sink, sink) == 0, std::string("cli sweep exit, workers ") + w);
      const std::vector<std::string> gen{"spinbath", "gen-bath", "--ppm", "50", "--n", "5", "--seed", "3",
                                         "--workers", w, "--out", (tmp / w).string()};
      check(cli::run_cli(gen, sink, sink) == 0, std::string("cli gen-bath exit, workers ") + w);
    }
    for (const auto& e : fs::recursive_directory_iterator(tmp / "1")) {
      if (!e.is_regular_file()) continue;
      const auto rel = fs::relative(e.path(), tmp / "1");
      const auto name = rel.filename().string();
      if (name.find("manifest") != std::string::npos) continue;
      check(fs::exists(tmp / "4" / rel) && cli::read_file(e.path()) == cli::read_file(tmp / "4" / rel),
            rel.string());
    }
    fs::remove_all(tmp);
    const bool same = differing.empty();
    std::string detail = "sweep, gen-bath, OU Monte Carlo and CLI outputs";
    if (same) {
      detail += " bit-identical for 1 vs 4 workers";
    } else {
      detail += " differ for 1 vs 4 workers in:";
      for (const auto& d : differing) detail += " " + d;
    }
    report(9, "determinism", same, detail + fmt(", %.1f s", seconds_since(t0)));
  }

  // Box-size convergence at 10 ppm.
  {
    SweepOptions o = sweep_opt;
    o.concentrations = {10.0};
    o.box = {BoxPolicy::Kind::TargetCount, 1000.0};
    const auto big = sweep_concentration(o)[0];
    const auto& ref = sweep[2];
    info(fmt("box volume x2 at 10 ppm: Delta_ens changes by %.2f%%, T2 by %.1f%%, median tau_c,single by %.1f%%",
             100.0 * (big.stats.delta_ens / ref.stats.delta_ens - 1.0), 100.0 * (big.t2 / ref.t2 - 1.0),
             100.0 * ([&] {
               auto m1 = big.stats.tau_c_samples;
               auto m0 = ref.stats.tau_c_samples;
               std::nth_element(m1.begin(), m1.begin() + m1.size() / 2, m1.end());
               std::nth_element(m0.begin(), m0.begin() + m0.size() / 2, m0.end());
               return m1[m1.size() / 2] / m0[m0.size() / 2] - 1.0;
             }())));
  }
  for (const auto& p : sweep) {
    info(fmt("[N] = %g ppm: T2* = %.4g s, T2 = %.4g s, KS(Delta) = %.3f", p.concentration_ppm, p.t2_star, p.t2,
             p.stats.ks_delta) +
         fmt(", KS(tau) = %.3f, corr(log Delta, log tau) = %.3f", p.stats.ks_tau, p.stats.log_correlation));
  }
  info(fmt("total runtime %.0f s", seconds_since(start)));
  return hard_failures == 0 ? 0 : 1;
}

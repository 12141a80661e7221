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

#include <benchmark/benchmark.h>

#include <vector>

#include "spinbath/bath_dynamics.hpp"
#include "spinbath/decoherence.hpp"
#include "spinbath/dipolar.hpp"
#include "spinbath/ensemble.hpp"
#include "spinbath/lattice.hpp"

namespace {

using namespace spinbath;

void BM_GenerateBath(benchmark::State& state) {
  BathOptions opt;
  opt.placement = state.range(1) == 0 ? PlacementMode::Lattice : PlacementMode::Continuum;
  const double ppm = 10.0;
  const double hw = half_width_for_count(ppm, static_cast<double>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_bath(ppm, hw, seed++, opt));
  state.SetLabel(opt.placement == PlacementMode::Lattice ? "lattice" : "continuum");
}
BENCHMARK(BM_GenerateBath)->Args({500, 0})->Args({500, 1})->Args({2000, 0})->Args({2000, 1});

void BM_CorrelationTime(benchmark::State& state) {
  const double ppm = 10.0;
  const auto bath = generate_bath(ppm, half_width_for_count(ppm, static_cast<double>(state.range(0))), 3);
  for (auto _ : state) benchmark::DoNotOptimize(correlation_time(bath));
  state.counters["spins"] = static_cast<double>(bath.size());
}
BENCHMARK(BM_CorrelationTime)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Realization(benchmark::State& state) {
  SweepOptions opt;
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_realization(10.0, i++, opt));
}
BENCHMARK(BM_Realization)->Unit(benchmark::kMillisecond);

void BM_EnsembleFidQuadrature(benchmark::State& state) {
  const double d = 1e6;
  const auto grid = log_grid(1e-3 / d, 5.0 / d, 50);
  for (auto _ : state) {
    for (double t : grid) benchmark::DoNotOptimize(ensemble_fid_quadrature(t, d));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_EnsembleFidQuadrature);

void BM_EnsembleEcho(benchmark::State& state) {
  const EnsembleDecayParams p{9e5, 5e-4, 5e-4, PulseSequence::SpinEcho};
  const auto grid = linear_grid(0.0, 4.0 * t2_ensemble(p.delta_ens, p.tau_c_ens),
                                 static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_echo(grid, p));
}
BENCHMARK(BM_EnsembleEcho)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_OuMonteCarlo(benchmark::State& state) {
  const OuNoiseModel m{1e6, 5e-6};
  const auto grid = linear_grid(0.0, 6e-6, 50);
  const auto seq = state.range(0) == 0 ? PulseSequence::Ramsey : PulseSequence::SpinEcho;
  for (auto _ : state) benchmark::DoNotOptimize(ou_monte_carlo(seq, grid, m, 10000, 1));
  state.SetLabel(to_string(seq));
}
BENCHMARK(BM_OuMonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FlipFlopOracle(benchmark::State& state) {
  const PseudoSpinPair pair{0, 1, 1e3, 3e4, 3e4};
  const double t_max = 2.5 / flip_flop_rate(pair);
  for (auto _ : state) benchmark::DoNotOptimize(flip_flop_rate_oracle(pair, t_max));
}
BENCHMARK(BM_FlipFlopOracle)->Unit(benchmark::kMillisecond);

}  // namespace

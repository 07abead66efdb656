// Copyright 2026 The btow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "btow/bias.h"
#include "btow/cones.h"
#include "btow/game.h"
#include "btow/generators.h"
#include "btow/harmonic.h"
#include "btow/metric_space.h"

namespace btow {
namespace {

DiscretizedSpace annulus(double spacing) {
  AnnulusSpec a;
  a.spacing = spacing;
  a.boundary_value = [](double x, double y) {
    return std::hypot(x, y) > 0.375 ? 1.0 : 0.0;
  };
  return build_annulus(a);
}

void BM_Within(benchmark::State& state) {
  const auto sp = annulus(1.0 / state.range(0));
  int source = 0;
  for (auto _ : state) {
    // A fresh space each time would dominate; rotate sources instead.
    benchmark::DoNotOptimize(sp.within(source, 0.1, false));
    source = (source + 97) % sp.size();
  }
  state.counters["vertices"] = sp.size();
}
BENCHMARK(BM_Within)->Arg(64)->Arg(128);

void BM_BallIndex(benchmark::State& state) {
  const auto sp = annulus(1.0 / state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(BallIndex::build(sp, 4.0 / state.range(0)));
  }
  state.counters["vertices"] = sp.size();
}
BENCHMARK(BM_BallIndex)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_DppSweep(benchmark::State& state) {
  const auto sp = annulus(1.0 / 64);
  const double eps = 4.0 / 64;
  const BallIndex b = BallIndex::build(sp, eps);
  const GameBias bias = bias_for(OddsFunction::exponential(1.0), eps);
  std::vector<double> u = sp.boundary_extension(0.5);
  for (auto _ : state) {
    u = dpp_step(sp, b, bias, u);
    benchmark::DoNotOptimize(u.data());
  }
  state.counters["vertices"] = sp.size();
}
BENCHMARK(BM_DppSweep)->Unit(benchmark::kMicrosecond);

void BM_SolveValue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sp = build_interval(n, 1.0, 0.0, 1.0);
  const GameBias bias = bias_for(OddsFunction::exponential(1.0), 4.0 / n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_value(sp, bias).report.sweeps);
  }
}
BENCHMARK(BM_SolveValue)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Playouts(benchmark::State& state) {
  const int n = 32;
  const auto sp = build_interval(n, 1.0, 0.0, 1.0);
  const BallIndex b = BallIndex::build(sp, 1.0 / n, BallClosure::kClosed);
  const GameBias bias = GameBias::from_theta(1.0 / n, 0.0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto r = estimate_value(sp, b, bias, Strategy::pull_toward(n),
                                  Strategy::pull_toward(0), n / 2, 1000,
                                  seed++);
    benchmark::DoNotOptimize(r.mean_payoff);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Playouts)->Unit(benchmark::kMillisecond);

void BM_CecScan(benchmark::State& state) {
  const int n = 64;
  const auto sp = build_interval(n, 1.0, 0.0, 1.0);
  const double eps = 4.0 / n;
  const BallIndex b = BallIndex::build(sp, eps);
  const auto u =
      solve_value(sp, bias_for(OddsFunction::exponential(1.0), eps)).value();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cec_scan(sp, b, u, 1.0, CecSide::kAbove, 200, 1, {8.0, eps}).pass);
  }
}
BENCHMARK(BM_CecScan)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace btow

BENCHMARK_MAIN();

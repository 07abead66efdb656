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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "btow/analysis.h"
#include "btow/bias.h"
#include "btow/error.h"
#include "btow/game.h"
#include "btow/generators.h"

namespace btow {
namespace {

TEST(Play, FullBiasWalksAShortestPath) {
  const int n = 32;
  const double eps = 3.0 / n;
  const auto sp = build_interval(n, 1.0, 0.0, 1.0);
  const BallIndex b = BallIndex::build(sp, eps, BallClosure::kClosed);
  const GameBias bias = GameBias::from_theta(eps, 1.0);
  for (int start : {1, 5, 17}) {
    const Playout p = play(sp, b, bias, Strategy::pull_toward(n),
                           Strategy::pull_toward(0), start, 4, 0, {});
    EXPECT_FALSE(p.capped);
    EXPECT_EQ(p.trajectory.back(), n);
    const double d = (n - start) / double(n);
    // Closed balls hop exactly eps, so no sub-eps slack is needed.
    EXPECT_EQ(p.tau, std::lround(step_distance(d, eps, BallClosure::kClosed) /
                                 eps));
    EXPECT_EQ(p.tau, (n - start + 2) / 3);
    for (char t : p.tosses) EXPECT_EQ(t, 1);
    for (std::size_t k = 1; k < p.trajectory.size(); ++k) {
      EXPECT_LE(std::abs(p.trajectory[k] - p.trajectory[k - 1]), 3);
    }
  }
}

TEST(Play, FullBiasOnAGridTakesManhattanSteps) {
  GridSpec g;
  g.nx = 9;
  g.ny = 7;
  g.spacing = 0.125;
  const auto sp = build_grid_domain(g);
  const BallIndex b = BallIndex::build(sp, g.spacing, BallClosure::kClosed);
  const GameBias bias = GameBias::from_theta(g.spacing, 1.0);
  const auto ids = grid_vertex_ids(g);
  const int start = ids[3 * 9 + 4], target = ids[0 * 9 + 0];
  const Playout p = play(sp, b, bias, Strategy::pull_toward(target),
                         Strategy::stay(), start, 1, 0, {});
  // The walk stops once it reaches the rim, three rows down.
  EXPECT_EQ(p.tau, 3);
  EXPECT_TRUE(sp.is_boundary(p.trajectory.back()));
}

TEST(Play, StayAgainstStayIsCapped) {
  const auto sp = build_interval(8, 1.0, 0.0, 1.0);
  const BallIndex b = BallIndex::build(sp, 0.125, BallClosure::kClosed);
  PlayOptions o;
  o.max_steps = 100;
  const Playout p = play(sp, b, GameBias::from_theta(0.125, 0.3),
                         Strategy::stay(), Strategy::stay(), 4, 1, 0, o);
  EXPECT_TRUE(p.capped);
  EXPECT_EQ(p.tau, 100);
  EXPECT_EQ(p.trajectory.size(), 101u);
}

TEST(Play, DeterministicInSeedAndIndex) {
  const auto sp = build_interval(16, 1.0, 0.0, 1.0);
  const BallIndex b = BallIndex::build(sp, 1.0 / 16, BallClosure::kClosed);
  const GameBias bias = GameBias::from_theta(1.0 / 16, 0.1);
  const auto a = play(sp, b, bias, Strategy::random_uniform(),
                      Strategy::pull_toward(0), 8, 3, 12, {});
  const auto c = play(sp, b, bias, Strategy::random_uniform(),
                      Strategy::pull_toward(0), 8, 3, 12, {});
  const auto d = play(sp, b, bias, Strategy::random_uniform(),
                      Strategy::pull_toward(0), 8, 3, 13, {});
  EXPECT_EQ(a.trajectory, c.trajectory);
  EXPECT_EQ(a.tosses, c.tosses);
  EXPECT_NE(a.trajectory, d.trajectory);
}

TEST(Play, RejectsBadInput) {
  const auto sp = build_interval(8, 1.0, 0.0, 1.0);
  const BallIndex b = BallIndex::build(sp, 0.125, BallClosure::kClosed);
  const GameBias bias = GameBias::from_theta(0.125, 0.0);
  EXPECT_THROW(play(sp, b, bias, Strategy::stay(), Strategy::stay(), 0, 1, 0,
                    {}),
               ValidationError);
  EXPECT_THROW(play(sp, b, bias, Strategy::stay(), Strategy::stay(), 9, 1, 0,
                    {}),
               ValidationError);
  EXPECT_THROW(play(sp, b, bias, Strategy::pull_toward(40), Strategy::stay(),
                    3, 1, 0, {}),
               ValidationError);
  EXPECT_THROW(play(sp, b, bias, Strategy::greedy_max({1.0, 2.0}),
                    Strategy::stay(), 3, 1, 0, {}),
               ValidationError);
}

TEST(EstimateValue, AllCappedIsAnError) {
  const auto sp = build_interval(8, 1.0, 0.0, 1.0);
  const BallIndex b = BallIndex::build(sp, 0.125, BallClosure::kClosed);
  PlayOptions o;
  o.max_steps = 10;
  try {
    estimate_value(sp, b, GameBias::from_theta(0.125, 0.0), Strategy::stay(),
                   Strategy::stay(), 4, 20, 1, o);
    FAIL() << "expected an error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("not terminating"), std::string::npos);
  }
}

TEST(EstimateValue, FairRuinFromTheMiddle) {
  const int n = 8;
  const auto sp = build_interval(n, 1.0, 0.0, 1.0);
  const BallIndex b = BallIndex::build(sp, 1.0 / n, BallClosure::kClosed);
  const SimReport r = estimate_value(
      sp, b, GameBias::from_theta(1.0 / n, 0.0), Strategy::pull_toward(n),
      Strategy::pull_toward(0), n / 2, 100000, 5);
  EXPECT_EQ(r.capped, 0);
  EXPECT_LE(std::abs(r.mean_payoff - 0.5), 3 * r.payoff_stderr);
  // Expected duration of the fair walk is j (n - j).
  EXPECT_LE(std::abs(r.mean_tau - 16.0), 3 * r.tau_stderr);
}

TEST(EstimateValue, BiasedRuinProbabilities) {
  const int n = 10;
  const double eps = 1.0 / n;
  const auto sp = build_interval(n, 1.0, 0.0, 1.0);
  const BallIndex b = BallIndex::build(sp, eps, BallClosure::kClosed);
  const GameBias bias = bias_for(OddsFunction::exponential(2.0), eps);
  for (int j : {1, 3, 7}) {
    const SimReport r =
        estimate_value(sp, b, bias, Strategy::pull_toward(n),
                       Strategy::pull_toward(0), j, 40000, 10 + j);
    const double exact =
        (1 - std::pow(bias.rho, -j)) / (1 - std::pow(bias.rho, -n));
    EXPECT_LE(std::abs(r.mean_payoff - exact), 3 * r.payoff_stderr)
        << "start " << j;
  }
}

TEST(EstimateValue, ConstantBoundaryPaysExactly) {
  GridSpec g;
  g.nx = 7;
  g.ny = 7;
  g.spacing = 0.25;
  g.boundary_value = [](double, double) { return 2.5; };
  const auto sp = build_grid_domain(g);
  const BallIndex b = BallIndex::build(sp, 0.5);
  const SimReport r =
      estimate_value(sp, b, GameBias::from_theta(0.5, 0.4),
                     Strategy::random_uniform(), Strategy::random_uniform(),
                     grid_vertex_ids(g)[24], 500, 2);
  EXPECT_EQ(r.mean_payoff, 2.5);
  EXPECT_EQ(r.payoff_stderr, 0.0);
}

TEST(EstimateValue, RunningPayoffAddsEpsSquaredPerStep) {
  const auto sp = build_interval(8, 1.0, 0.0, 0.0);
  const BallIndex b = BallIndex::build(sp, 0.125, BallClosure::kClosed);
  const std::vector<double> f(sp.size(), 1.0);
  PlayOptions o;
  o.running_payoff = f;
  const Playout p = play(sp, b, GameBias::from_theta(0.125, 0.0),
                         Strategy::pull_toward(8), Strategy::pull_toward(0), 3,
                         8, 1, o);
  EXPECT_NEAR(p.payoff, p.tau * 0.125 * 0.125, 1e-15);
}

TEST(Moments, MatchesTwoPassStatistics) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd(1e6, 2.0);
  std::vector<double> x(10007);
  for (double& v : x) v = nd(gen);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double var = ss / (x.size() - 1);

  const Moments m = pairwise_moments(x);
  EXPECT_EQ(m.n, 10007);
  EXPECT_NEAR(m.mean, mean, 1e-9);
  EXPECT_NEAR(m.variance(), var, 1e-9 * var);
  EXPECT_NEAR(m.stderr_of_mean(), std::sqrt(var / x.size()), 1e-9);

  Moments a, b;
  for (std::size_t i = 0; i < x.size(); ++i) (i < 3000 ? a : b).add(x[i]);
  a.merge(b);
  EXPECT_EQ(a.n, m.n);
  EXPECT_NEAR(a.mean, mean, 1e-9);
  EXPECT_NEAR(a.variance(), var, 1e-9 * var);

  Moments empty;
  empty.merge(m);
  EXPECT_EQ(empty.mean, m.mean);
}

TEST(Duration, LogLogSlope) {
  const std::vector<double> x = {1, 2, 4, 8};
  const std::vector<double> y = {3, 12, 48, 192};
  EXPECT_NEAR(loglog_slope(x, y), 2.0, 1e-12);
  EXPECT_THROW(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}),
               ValidationError);
}

TEST(Duration, FullBiasIsDeterministic) {
  const std::vector<double> eps = {1.0 / 8, 1.0 / 16, 1.0 / 32};
  auto setup = [](double e) {
    const int n = static_cast<int>(std::lround(1 / e));
    return DurationSetup{build_interval(n, 1.0, 0.0, 1.0),
                         BallClosure::kClosed, 1, Strategy::pull_toward(n),
                         Strategy::pull_toward(0)};
  };
  const DurationTable t =
      duration_stats(setup, OddsFunction::constant_theta(1.0), eps, 50, 1);
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.report.mean_tau, std::lround(1 / r.eps) - 1);
    EXPECT_EQ(r.report.tau_stderr, 0.0);
  }
  EXPECT_NEAR(t.slope, 1.0, 0.1);
}

TEST(Duration, UnbiasedSlopeNearTwo) {
  const std::vector<double> eps = {1.0 / 8, 1.0 / 16, 1.0 / 32};
  auto setup = [](double e) {
    const int n = static_cast<int>(std::lround(1 / e));
    return DurationSetup{build_interval(n, 1.0, 0.0, 1.0),
                         BallClosure::kClosed, n / 2, Strategy::pull_toward(n),
                         Strategy::pull_toward(0)};
  };
  const DurationTable t =
      duration_stats(setup, OddsFunction::exponential(0.0), eps, 2000, 7);
  EXPECT_GE(t.slope, 1.7);
  EXPECT_LE(t.slope, 2.3);
}

}  // namespace
}  // namespace btow

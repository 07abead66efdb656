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

// Monte-Carlo playouts of the epsilon-game with pluggable strategies.

#ifndef BTOW_GAME_H_
#define BTOW_GAME_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "btow/bias.h"
#include "btow/metric_space.h"

namespace btow {

enum class StrategyKind {
  kPullToward,     // minimize the distance to a target vertex
  kGreedyMax,      // argmax of a field over the ball
  kGreedyMin,      // argmin of a field over the ball
  kStay,
  kRandomUniform,  // uniform over the ball
};

// Ties always go to the lowest vertex index.
class Strategy {
 public:
  static Strategy pull_toward(int target);
  static Strategy greedy_max(std::vector<double> field);
  static Strategy greedy_min(std::vector<double> field);
  static Strategy stay();
  static Strategy random_uniform();

  StrategyKind kind() const { return kind_; }
  int target() const { return target_; }
  const std::vector<double>* field() const { return field_.get(); }
  std::string describe() const;

 private:
  StrategyKind kind_ = StrategyKind::kStay;
  int target_ = -1;
  std::shared_ptr<const std::vector<double>> field_;
};

struct Playout {
  std::vector<int> trajectory;  // x_0, ..., x_tau
  std::vector<char> tosses;     // 1 when player I won toss k
  long tau = 0;                 // steps taken (the cap when capped)
  bool capped = false;
  double payoff = 0.0;          // F(x_tau) plus the running payoff
};

struct PlayOptions {
  long max_steps = 0;  // 0: default_max_steps
  bool record = true;  // keep trajectory and tosses
  // Optional running payoff f; adds eps^2 f(x_i) for i < tau.
  std::span<const double> running_payoff;
};

// 100 ceil((diam / eps)^2) (1 + |beta| diam), with diam bounded by twice the
// eccentricity of vertex 0.
long default_max_steps(const DiscretizedSpace& space, double eps, double beta);

// One game from start; deterministic in (seed, playout_index).
Playout play(const DiscretizedSpace& space, const BallIndex& balls,
             const GameBias& bias, const Strategy& player_one,
             const Strategy& player_two, int start, std::uint64_t seed,
             std::uint64_t playout_index, const PlayOptions& options);

struct SimReport {
  long n = 0;           // playouts
  long terminated = 0;  // not capped
  long capped = 0;
  double mean_payoff = 0.0;  // over terminated playouts
  double payoff_stderr = 0.0;
  double mean_tau = 0.0;  // over all playouts, capped ones at the cap
  double tau_stderr = 0.0;
  long max_steps = 0;
};

// Throws ValidationError("game not terminating under these strategies")
// when every playout hits the cap.
SimReport estimate_value(const DiscretizedSpace& space, const BallIndex& balls,
                         const GameBias& bias, const Strategy& player_one,
                         const Strategy& player_two, int start, long n_samples,
                         std::uint64_t seed, PlayOptions options = {},
                         double beta_for_cap = 0.0);

// Streaming mean / variance with an associative merge (Chan et al.).
struct Moments {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const Moments& other);
  double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
  double stderr_of_mean() const;
};

// Pairwise merge over fixed-size blocks, independent of thread count.
Moments pairwise_moments(std::span<const double> values);

struct DurationRow {
  double eps = 0.0;
  SimReport report;
};

struct DurationTable {
  std::vector<DurationRow> rows;
  // Least-squares slope of log(mean tau) against log(1 / eps).
  double slope = 0.0;
};

// One game per epsilon: the space, start vertex and strategies are produced
// by setup(eps).
struct DurationSetup {
  DiscretizedSpace space;
  BallClosure closure = BallClosure::kOpen;
  int start = 0;
  Strategy player_one;
  Strategy player_two;
};

DurationTable duration_stats(
    const std::function<DurationSetup(double eps)>& setup,
    const OddsFunction& odds, std::span<const double> eps_list,
    long n_samples, std::uint64_t seed);

double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace btow

#endif  // BTOW_GAME_H_

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

#include "btow/game.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "btow/error.h"
#include "btow/random.h"

namespace btow {
namespace {

// Per-playout state a strategy needs beyond the field itself.
struct BoundStrategy {
  const Strategy* spec = nullptr;
  DiscretizedSpace::DistanceRow target_dist;
};

BoundStrategy bind(const DiscretizedSpace& space, const Strategy& s,
                   const char* who) {
  BoundStrategy b;
  b.spec = &s;
  switch (s.kind()) {
    case StrategyKind::kPullToward:
      if (s.target() < 0 || s.target() >= space.size()) {
        throw ValidationError(std::string(who) + " pull target " +
                              std::to_string(s.target()) +
                              " is not a vertex");
      }
      b.target_dist = space.distances_from(s.target());
      break;
    case StrategyKind::kGreedyMax:
    case StrategyKind::kGreedyMin:
      if (static_cast<int>(s.field()->size()) != space.size()) {
        throw ValidationError(std::string(who) + " greedy field has " +
                              std::to_string(s.field()->size()) +
                              " values for " + std::to_string(space.size()) +
                              " vertices");
      }
      break;
    default:
      break;
  }
  return b;
}

int choose(const BoundStrategy& b, std::span<const int> ball, int x,
           CounterRng& rng) {
  switch (b.spec->kind()) {
    case StrategyKind::kStay:
      return x;
    case StrategyKind::kRandomUniform:
      return ball[rng.below(ball.size())];
    case StrategyKind::kPullToward: {
      const auto& d = *b.target_dist;
      int best = ball[0];
      for (int y : ball) {
        if (d[y] < d[best]) best = y;
      }
      return best;
    }
    case StrategyKind::kGreedyMax: {
      const auto& f = *b.spec->field();
      int best = ball[0];
      for (int y : ball) {
        if (f[y] > f[best]) best = y;
      }
      return best;
    }
    case StrategyKind::kGreedyMin: {
      const auto& f = *b.spec->field();
      int best = ball[0];
      for (int y : ball) {
        if (f[y] < f[best]) best = y;
      }
      return best;
    }
  }
  return x;
}

}  // namespace

Strategy Strategy::pull_toward(int target) {
  Strategy s;
  s.kind_ = StrategyKind::kPullToward;
  s.target_ = target;
  return s;
}

Strategy Strategy::greedy_max(std::vector<double> field) {
  Strategy s;
  s.kind_ = StrategyKind::kGreedyMax;
  s.field_ = std::make_shared<const std::vector<double>>(std::move(field));
  return s;
}

Strategy Strategy::greedy_min(std::vector<double> field) {
  Strategy s;
  s.kind_ = StrategyKind::kGreedyMin;
  s.field_ = std::make_shared<const std::vector<double>>(std::move(field));
  return s;
}

Strategy Strategy::stay() { return Strategy(); }

Strategy Strategy::random_uniform() {
  Strategy s;
  s.kind_ = StrategyKind::kRandomUniform;
  return s;
}

std::string Strategy::describe() const {
  switch (kind_) {
    case StrategyKind::kPullToward: return "pull:" + std::to_string(target_);
    case StrategyKind::kGreedyMax: return "greedy-max";
    case StrategyKind::kGreedyMin: return "greedy-min";
    case StrategyKind::kStay: return "stay";
    case StrategyKind::kRandomUniform: return "random";
  }
  return "?";
}

long default_max_steps(const DiscretizedSpace& space, double eps,
                       double beta) {
  const double diam = space.diameter_upper_bound();
  const double hops = std::ceil((diam / eps) * (diam / eps));
  const double cap = 100.0 * hops * (1.0 + std::abs(beta) * diam);
  return static_cast<long>(std::min(cap, 1e15));
}

Playout play(const DiscretizedSpace& space, const BallIndex& balls,
             const GameBias& bias, const Strategy& player_one,
             const Strategy& player_two, int start, std::uint64_t seed,
             std::uint64_t playout_index, const PlayOptions& options) {
  if (start < 0 || start >= space.size()) {
    throw ValidationError("start vertex " + std::to_string(start) +
                          " is not a vertex");
  }
  if (space.is_boundary(start)) {
    throw ValidationError("start vertex " + std::to_string(start) +
                          " lies in Y");
  }
  const long max_steps = options.max_steps > 0
                             ? options.max_steps
                             : default_max_steps(space, bias.eps, 0.0);
  const std::span<const double> f = options.running_payoff;
  if (!f.empty() && static_cast<int>(f.size()) != space.size()) {
    throw ValidationError("running payoff size does not match the space");
  }
  const BoundStrategy one = bind(space, player_one, "player I");
  const BoundStrategy two = bind(space, player_two, "player II");

  Playout out;
  int x = start;
  double running = 0.0;
  if (options.record) out.trajectory.push_back(x);
  long k = 0;
  while (!space.is_boundary(x)) {
    if (k == max_steps) {
      out.capped = true;
      break;
    }
    if (!f.empty()) running += f[x];
    CounterRng rng(seed, playout_index, static_cast<std::uint64_t>(k));
    const bool one_wins = rng.uniform() < bias.p;
    const BoundStrategy& mover = one_wins ? one : two;
    const auto ball = balls.ball(x);
    const int next = choose(mover, ball, x, rng);
    if (!std::binary_search(ball.begin(), ball.end(), next)) {
      std::ostringstream msg;
      msg << (one_wins ? "player I" : "player II") << " strategy "
          << mover.spec->describe() << " moved from " << x << " to " << next
          << ", outside the ball";
      throw ValidationError(msg.str());
    }
    x = next;
    ++k;
    if (options.record) {
      out.trajectory.push_back(x);
      out.tosses.push_back(one_wins ? 1 : 0);
    }
  }
  out.tau = k;
  out.payoff = (out.capped ? 0.0 : space.boundary_value(x)) +
               bias.eps * bias.eps * running;
  return out;
}

void Moments::add(double x) {
  ++n;
  const double delta = x - mean;
  mean += delta / n;
  m2 += delta * (x - mean);
}

void Moments::merge(const Moments& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const long total = n + o.n;
  const double delta = o.mean - mean;
  mean += delta * o.n / total;
  m2 += o.m2 + delta * delta * (double(n) * o.n / total);
  n = total;
}

double Moments::stderr_of_mean() const {
  return n > 1 ? std::sqrt(variance() / n) : 0.0;
}

Moments pairwise_moments(std::span<const double> values) {
  constexpr std::size_t kBlock = 256;
  if (values.size() <= kBlock) {
    Moments m;
    for (double v : values) m.add(v);
    return m;
  }
  const std::size_t half = values.size() / 2;
  Moments left = pairwise_moments(values.subspan(0, half));
  left.merge(pairwise_moments(values.subspan(half)));
  return left;
}

SimReport estimate_value(const DiscretizedSpace& space, const BallIndex& balls,
                         const GameBias& bias, const Strategy& player_one,
                         const Strategy& player_two, int start, long n_samples,
                         std::uint64_t seed, PlayOptions options,
                         double beta_for_cap) {
  if (n_samples < 1) throw ValidationError("n_samples must be >= 1");
  if (options.max_steps <= 0) {
    options.max_steps = default_max_steps(space, bias.eps, beta_for_cap);
  }
  options.record = false;
  // Validate once up front so worker threads never throw on bad input.
  play(space, balls, bias, Strategy::stay(), Strategy::stay(), start, seed,
       0, PlayOptions{1, false, options.running_payoff});
  bind(space, player_one, "player I");
  bind(space, player_two, "player II");

  std::vector<double> payoff(n_samples), tau(n_samples);
  std::vector<char> capped(n_samples);
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n_samples; ++i) {
    Playout p = play(space, balls, bias, player_one, player_two, start, seed,
                     static_cast<std::uint64_t>(i), options);
    payoff[i] = p.payoff;
    tau[i] = static_cast<double>(p.tau);
    capped[i] = p.capped;
  }
  SimReport rep;
  rep.n = n_samples;
  rep.max_steps = options.max_steps;
  std::vector<double> done;
  done.reserve(n_samples);
  for (long i = 0; i < n_samples; ++i) {
    if (capped[i]) {
      ++rep.capped;
    } else {
      done.push_back(payoff[i]);
    }
  }
  rep.terminated = static_cast<long>(done.size());
  if (done.empty()) {
    throw ValidationError(
        "game not terminating under these strategies (all " +
        std::to_string(n_samples) + " playouts reached " +
        std::to_string(options.max_steps) + " steps)");
  }
  const Moments pm = pairwise_moments(done);
  const Moments tm = pairwise_moments(tau);
  rep.mean_payoff = pm.mean;
  rep.payoff_stderr = pm.stderr_of_mean();
  rep.mean_tau = tm.mean;
  rep.tau_stderr = tm.stderr_of_mean();
  return rep;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("slope fit needs >= 2 matching points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) {
      throw ValidationError("log-log fit needs positive values");
    }
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ValidationError("slope fit needs distinct x");
  return (n * sxy - sx * sy) / denom;
}

DurationTable duration_stats(
    const std::function<DurationSetup(double eps)>& setup,
    const OddsFunction& odds, std::span<const double> eps_list,
    long n_samples, std::uint64_t seed) {
  if (eps_list.size() < 2) {
    throw ValidationError("duration_stats needs >= 2 epsilon values");
  }
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw ValidationError("duration_stats epsilon list must decrease");
    }
  }
  DurationTable table;
  std::vector<double> inv_eps, taus;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const double eps = eps_list[i];
    DurationSetup s = setup(eps);
    const BallIndex balls = BallIndex::build(s.space, eps, s.closure);
    const GameBias bias = bias_for(odds, eps);
    const double beta = std::isfinite(odds.beta()) ? odds.beta() : 0.0;
    DurationRow row;
    row.eps = eps;
    row.report = estimate_value(s.space, balls, bias, s.player_one,
                                s.player_two, s.start, n_samples,
                                seed + i, {}, beta);
    inv_eps.push_back(1.0 / eps);
    taus.push_back(row.report.mean_tau);
    table.rows.push_back(row);
  }
  table.slope = loglog_slope(inv_eps, taus);
  return table;
}

}  // namespace btow

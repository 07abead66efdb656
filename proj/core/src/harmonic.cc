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

#include "btow/harmonic.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "btow/error.h"

namespace btow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Residual at or below this fraction of tol with an open gap means both
// iterates have reached (distinct) fixed points.
constexpr double kStallFraction = 1e-3;

void check_field_size(const DiscretizedSpace& space,
                      std::span<const double> field, const char* what) {
  if (static_cast<int>(field.size()) != space.size()) {
    std::ostringstream msg;
    msg << what << " has " << field.size() << " values for "
        << space.size() << " vertices";
    throw ValidationError(msg.str());
  }
}

void check_balls_nontrivial(const DiscretizedSpace& space,
                            const BallIndex& balls) {
  for (int v : space.interior()) {
    if (balls.ball(v).size() < 2) {
      std::ostringstream msg;
      msg << "epsilon too small for mesh: ball of interior vertex " << v
          << " is {" << v << "}";
      throw ValidationError(msg.str());
    }
  }
}

std::vector<double> with_boundary(const DiscretizedSpace& space,
                                  std::span<const double> field) {
  std::vector<double> out(field.begin(), field.end());
  for (int y : space.boundary().vertices) out[y] = space.boundary_value(y);
  return out;
}

// out[x] = p sup_B in + (1 - p) inf_B in + eps2 f(x) on the interior.
// max and min of in over ids. Four independent chains hide the latency of
// the compare (the compiler may not reorder max/min on its own).
inline void ball_minmax(std::span<const int> ids, const double* in,
                        double& hi_out, double& lo_out) {
  double h0 = -kInf, h1 = -kInf, h2 = -kInf, h3 = -kInf;
  double l0 = kInf, l1 = kInf, l2 = kInf, l3 = kInf;
  const std::size_t n = ids.size();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const double a = in[ids[k]], b = in[ids[k + 1]];
    const double c = in[ids[k + 2]], d = in[ids[k + 3]];
    h0 = std::max(h0, a); l0 = std::min(l0, a);
    h1 = std::max(h1, b); l1 = std::min(l1, b);
    h2 = std::max(h2, c); l2 = std::min(l2, c);
    h3 = std::max(h3, d); l3 = std::min(l3, d);
  }
  for (; k < n; ++k) {
    h0 = std::max(h0, in[ids[k]]);
    l0 = std::min(l0, in[ids[k]]);
  }
  hi_out = std::max(std::max(h0, h1), std::max(h2, h3));
  lo_out = std::min(std::min(l0, l1), std::min(l2, l3));
}

template <bool kMax>
inline double ball_extreme(std::span<const int> ids, const double* in) {
  constexpr double init = kMax ? -kInf : kInf;
  double e0 = init, e1 = init, e2 = init, e3 = init;
  const std::size_t n = ids.size();
  std::size_t k = 0;
  auto pick = [](double a, double b) {
    return kMax ? std::max(a, b) : std::min(a, b);
  };
  for (; k + 4 <= n; k += 4) {
    e0 = pick(e0, in[ids[k]]);
    e1 = pick(e1, in[ids[k + 1]]);
    e2 = pick(e2, in[ids[k + 2]]);
    e3 = pick(e3, in[ids[k + 3]]);
  }
  for (; k < n; ++k) e0 = pick(e0, in[ids[k]]);
  return pick(pick(e0, e1), pick(e2, e3));
}

void dpp_kernel(const DiscretizedSpace& space, const BallIndex& balls,
                double p, std::span<const double> in, std::span<double> out,
                const double* f, double eps2) {
  const auto interior = space.interior();
  const int n = static_cast<int>(interior.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const int x = interior[i];
    double hi, lo;
    ball_minmax(balls.ball(x), in.data(), hi, lo);
    double value = lo + p * (hi - lo);
    if (f != nullptr) value += eps2 * f[x];
    out[x] = value;
  }
}

// Ball-wise min (or max) of a field at every vertex.
template <bool kMax>
void ball_extremum(const BallIndex& balls, std::span<const double> in,
                   std::vector<double>& out) {
  const int n = balls.size();
  out.resize(n);
#pragma omp parallel for schedule(static)
  for (int z = 0; z < n; ++z) {
    out[z] = ball_extreme<kMax>(balls.ball(z), in.data());
  }
}

struct Scratch {
  std::vector<double> a, b, g;
};

void favored_lower_kernel(const GameBalls& gb, double p,
                          std::span<const double> in, std::span<double> out,
                          Scratch& s) {
  const BallIndex& balls = gb.ball();
  const auto min_f2 = gb.boundary_min2();
  ball_extremum<false>(balls, in, s.a);
  ball_extremum<false>(balls, s.a, s.b);  // min over the two-step ball
  const int n = balls.size();
  s.g.resize(n);
  for (int z = 0; z < n; ++z) {
    const double accept = std::min(in[z], min_f2[z]);
    s.g[z] = s.b[z] + p * (accept - s.b[z]);
  }
  const auto interior = gb.space().interior();
  const int m = static_cast<int>(interior.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    const int x = interior[i];
    double best = -kInf;
    for (int z : balls.ball(x)) best = std::max(best, s.g[z]);
    out[x] = best;
  }
}

void favored_upper_kernel(const GameBalls& gb, double p,
                          std::span<const double> in, std::span<double> out,
                          Scratch& s) {
  const BallIndex& balls = gb.ball();
  const auto max_f2 = gb.boundary_max2();
  ball_extremum<true>(balls, in, s.a);
  ball_extremum<true>(balls, s.a, s.b);  // max over the two-step ball
  const int n = balls.size();
  s.g.resize(n);
  for (int z = 0; z < n; ++z) {
    const double accept = std::max(in[z], max_f2[z]);
    s.g[z] = accept + p * (s.b[z] - accept);
  }
  const auto interior = gb.space().interior();
  const int m = static_cast<int>(interior.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    const int x = interior[i];
    double best = kInf;
    for (int z : balls.ball(x)) best = std::min(best, s.g[z]);
    out[x] = best;
  }
}

// One monotone iterate: the current field, a buffer for the next, and the
// direction the sweeps must move in (+1 up, -1 down, 0 unchecked).
struct Iterate {
  std::vector<double> cur;
  std::vector<double> next;
  int direction = 0;
};

template <typename Kernel>
double sweep(const DiscretizedSpace& space, Kernel& kernel, Iterate& it,
             double guard, long sweep_number) {
  kernel(std::span<const double>(it.cur), std::span<double>(it.next));
  double residual = 0.0;
  int bad = -1;
  double bad_change = 0.0;
  for (int x : space.interior()) {
    const double change = it.next[x] - it.cur[x];
    residual = std::max(residual, std::abs(change));
    if (it.direction != 0 && change * it.direction < -guard && bad < 0) {
      bad = x;
      bad_change = change;
    }
  }
  if (bad >= 0) {
    std::ostringstream msg;
    msg << "sweep " << sweep_number << " moved vertex " << bad << " by "
        << bad_change << " against the "
        << (it.direction > 0 ? "nondecreasing" : "nonincreasing")
        << " direction; the operator is not monotone";
    throw ConsistencyError(msg.str());
  }
  std::swap(it.cur, it.next);
  if (!std::isfinite(residual)) {
    throw ConvergenceError("value iteration produced a non-finite value",
                           sweep_number, residual);
  }
  return residual;
}

double sup_gap(const DiscretizedSpace& space, const std::vector<double>& lo,
               const std::vector<double>& hi) {
  double gap = 0.0;
  for (int x : space.interior()) gap = std::max(gap, hi[x] - lo[x]);
  return gap;
}

double field_scale(const DiscretizedSpace& space) {
  const auto& b = space.boundary();
  return std::max({1.0, std::abs(b.min_value), std::abs(b.max_value)});
}

struct DriverResult {
  std::vector<double> lower, upper;
  SolveReport report;
};

// Value iteration on a monotone operator. Two-sided runs iterate from min F
// and max F in lockstep; single-sided from the configured start.
template <typename Kernel>
DriverResult drive(const DiscretizedSpace& space, Kernel& kernel,
                   const SolverConfig& config, int forced_direction) {
  config.validate();
  const auto& b = space.boundary();
  const double scale = field_scale(space);
  const double guard =
      config.check_monotone ? 64 * 1e-16 * scale : kInf;

  auto start = [&](double fill) {
    Iterate it;
    it.cur = space.boundary_extension(fill);
    it.next = it.cur;
    return it;
  };

  DriverResult result;
  SolveReport& rep = result.report;
  const bool two_sided = config.two_sided && forced_direction == 0;

  if (two_sided) {
    Iterate lo = start(b.min_value), hi = start(b.max_value);
    lo.direction = +1;
    hi.direction = -1;
    for (long s = 1; s <= config.max_sweeps; ++s) {
      const double r = std::max(sweep(space, kernel, lo, guard, s),
                                sweep(space, kernel, hi, guard, s));
      rep.sweeps = s;
      rep.residual = r;
      if (r > config.tol) continue;
      rep.gap = sup_gap(space, lo.cur, hi.cur);
      if (rep.gap <= config.gap_factor * config.tol) break;
      if (r <= kStallFraction * config.tol) {
        rep.stalled = true;
        std::ostringstream msg;
        msg << "iterates from below and above settled " << rep.gap
            << " apart; the fixed point is not unique";
        rep.warnings.push_back(msg.str());
        break;
      }
      if (s == config.max_sweeps) break;
    }
    if (rep.residual > config.tol ||
        (!rep.stalled && rep.gap > config.gap_factor * config.tol)) {
      std::ostringstream msg;
      msg << "value iteration did not converge in " << config.max_sweeps
          << " sweeps (residual " << rep.residual << ", gap "
          << sup_gap(space, lo.cur, hi.cur) << ")";
      throw ConvergenceError(msg.str(), rep.sweeps, rep.residual);
    }
    result.lower = std::move(lo.cur);
    result.upper = std::move(hi.cur);
  } else {
    Iterate it;
    int direction = forced_direction;
    if (forced_direction == 0) {
      switch (config.init) {
        case InitKind::kFromBelow:
          it = start(b.min_value);
          direction = +1;
          break;
        case InitKind::kFromAbove:
          it = start(b.max_value);
          direction = -1;
          break;
        case InitKind::kCustom:
          check_field_size(space, config.custom_init, "custom init");
          it.cur = with_boundary(space, config.custom_init);
          it.next = it.cur;
          direction = 0;
          break;
      }
    } else if (forced_direction == 2) {
      // Unchecked plain iteration (sign-changing running payoff).
      it = start(b.min_value);
      direction = 0;
    } else {
      it = start(forced_direction > 0 ? b.min_value : b.max_value);
      direction = forced_direction;
    }
    it.direction = direction;
    rep.residual = kInf;
    for (long s = 1; s <= config.max_sweeps && rep.residual > config.tol;
         ++s) {
      rep.residual = sweep(space, kernel, it, guard, s);
      rep.sweeps = s;
    }
    if (rep.residual > config.tol) {
      std::ostringstream msg;
      msg << "value iteration did not converge in " << config.max_sweeps
          << " sweeps (residual " << rep.residual << ")";
      throw ConvergenceError(msg.str(), rep.sweeps, rep.residual);
    }
    rep.gap = kNaN;
    result.lower = std::move(it.cur);
    result.upper = result.lower;
  }

  // Certify the returned field against the operator directly.
  std::vector<double> check = result.lower;
  kernel(std::span<const double>(result.lower), std::span<double>(check));
  rep.dpp_residual = 0.0;
  for (int x : space.interior()) {
    rep.dpp_residual =
        std::max(rep.dpp_residual, std::abs(check[x] - result.lower[x]));
  }
  return result;
}

}  // namespace

const char* to_string(ValueTag tag) {
  switch (tag) {
    case ValueTag::kLower: return "u_lower";
    case ValueTag::kUpper: return "u_upper";
    case ValueTag::kFavoredLower: return "v_favored";
    case ValueTag::kFavoredUpper: return "w_favored";
    case ValueTag::kOracle: return "oracle";
    case ValueTag::kCustom: return "custom";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (max_sweeps < 1) throw ValidationError("max_sweeps must be >= 1");
  if (!(gap_factor > 0.0)) throw ValidationError("gap_factor must be > 0");
  if (!(min_step_ratio > 0.0)) {
    throw ValidationError("min_step_ratio must be positive");
  }
}

GameBalls::GameBalls(const DiscretizedSpace& space, double eps,
                     BallClosure closure, double min_step_ratio)
    : space_(space) {
  const double h = space.mesh_width();
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ValidationError("epsilon must be positive");
  }
  if (eps < min_step_ratio * h * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "epsilon = " << eps << " is below " << min_step_ratio
        << " x mesh width (h = " << h << ")";
    throw ValidationError(msg.str());
  }
  ball_ = BallIndex::build(space, eps, closure);
  check_balls_nontrivial(space, ball_);

  const int n = space.size();
  std::vector<double> min_f1(n, kInf), max_f1(n, -kInf);
  for (int z = 0; z < n; ++z) {
    for (int y : ball_.ball(z)) {
      if (!space.is_boundary(y)) continue;
      min_f1[z] = std::min(min_f1[z], space.boundary_value(y));
      max_f1[z] = std::max(max_f1[z], space.boundary_value(y));
    }
  }
  ball_extremum<false>(ball_, min_f1, min_f2_);
  ball_extremum<true>(ball_, max_f1, max_f2_);
}

std::vector<double> dpp_step(const DiscretizedSpace& space,
                             const BallIndex& balls, const GameBias& bias,
                             std::span<const double> field) {
  check_field_size(space, field, "field");
  check_balls_nontrivial(space, balls);
  std::vector<double> out = with_boundary(space, field);
  dpp_kernel(space, balls, bias.p, field, out, nullptr, 0.0);
  return out;
}

std::vector<double> running_payoff_step(const DiscretizedSpace& space,
                                        const BallIndex& balls,
                                        const GameBias& bias,
                                        std::span<const double> field,
                                        std::span<const double> f) {
  check_field_size(space, field, "field");
  check_field_size(space, f, "running payoff");
  check_balls_nontrivial(space, balls);
  std::vector<double> out = with_boundary(space, field);
  dpp_kernel(space, balls, bias.p, field, out, f.data(), bias.eps * bias.eps);
  return out;
}

std::vector<double> favored_lower_step(const GameBalls& balls,
                                       const GameBias& bias,
                                       std::span<const double> field) {
  check_field_size(balls.space(), field, "field");
  std::vector<double> out = with_boundary(balls.space(), field);
  Scratch s;
  favored_lower_kernel(balls, bias.p, field, out, s);
  return out;
}

std::vector<double> favored_upper_step(const GameBalls& balls,
                                       const GameBias& bias,
                                       std::span<const double> field) {
  check_field_size(balls.space(), field, "field");
  std::vector<double> out = with_boundary(balls.space(), field);
  Scratch s;
  favored_upper_kernel(balls, bias.p, field, out, s);
  return out;
}

LocalVariation local_variation(const DiscretizedSpace& space,
                               const BallIndex& balls,
                               std::span<const double> field) {
  check_field_size(space, field, "field");
  const int n = space.size();
  LocalVariation lv;
  lv.plus.resize(n);
  lv.minus.resize(n);
  for (int x = 0; x < n; ++x) {
    double hi = -kInf, lo = kInf;
    for (int y : balls.ball(x)) {
      hi = std::max(hi, field[y]);
      lo = std::min(lo, field[y]);
    }
    lv.plus[x] = hi - field[x];
    lv.minus[x] = field[x] - lo;
  }
  return lv;
}

ValueSolution solve_value(const DiscretizedSpace& space, const GameBias& bias,
                          const SolverConfig& config,
                          std::span<const double> running_payoff) {
  GameBalls balls(space, bias.eps, config.closure, config.min_step_ratio);
  return solve_value(balls, bias, config, running_payoff);
}

ValueSolution solve_value(const GameBalls& balls, const GameBias& bias,
                          const SolverConfig& config,
                          std::span<const double> running_payoff) {
  const DiscretizedSpace& space = balls.space();
  const double p = bias.p;
  ValueSolution sol;
  DriverResult r;
  if (running_payoff.empty()) {
    auto kernel = [&](std::span<const double> in, std::span<double> out) {
      dpp_kernel(space, balls.ball(), p, in, out, nullptr, 0.0);
    };
    r = drive(space, kernel, config, 0);
  } else {
    check_field_size(space, running_payoff, "running payoff");
    double f_min = kInf, f_max = -kInf;
    for (int x : space.interior()) {
      f_min = std::min(f_min, running_payoff[x]);
      f_max = std::max(f_max, running_payoff[x]);
    }
    int direction = 2;
    std::string warning;
    if (f_min > 0.0) {
      direction = +1;
    } else if (f_max < 0.0) {
      direction = -1;
    } else if (f_min == 0.0 && f_max == 0.0) {
      direction = 0;
    } else {
      warning =
          "running payoff changes sign or touches 0; the game need not have "
          "a value, iterating without a monotonicity certificate";
    }
    const double eps2 = bias.eps * bias.eps;
    auto kernel = [&](std::span<const double> in, std::span<double> out) {
      dpp_kernel(space, balls.ball(), p, in, out, running_payoff.data(),
                 eps2);
    };
    r = drive(space, kernel, config, direction);
    if (!warning.empty()) r.report.warnings.push_back(warning);
  }
  sol.lower = {std::move(r.lower), ValueTag::kLower, bias};
  sol.upper = {std::move(r.upper), ValueTag::kUpper, bias};
  sol.report = std::move(r.report);
  return sol;
}

FavoredSolution solve_favored_lower(const DiscretizedSpace& space,
                                    const GameBias& bias,
                                    const SolverConfig& config) {
  GameBalls balls(space, bias.eps, config.closure, config.min_step_ratio);
  return solve_favored_lower(balls, bias, config);
}

FavoredSolution solve_favored_lower(const GameBalls& balls,
                                    const GameBias& bias,
                                    const SolverConfig& config) {
  Scratch s;
  auto kernel = [&](std::span<const double> in, std::span<double> out) {
    favored_lower_kernel(balls, bias.p, in, out, s);
  };
  DriverResult r = drive(balls.space(), kernel, config, 0);
  return {{std::move(r.lower), ValueTag::kFavoredLower, bias},
          std::move(r.report)};
}

FavoredSolution solve_favored_upper(const DiscretizedSpace& space,
                                    const GameBias& bias,
                                    const SolverConfig& config) {
  GameBalls balls(space, bias.eps, config.closure, config.min_step_ratio);
  return solve_favored_upper(balls, bias, config);
}

FavoredSolution solve_favored_upper(const GameBalls& balls,
                                    const GameBias& bias,
                                    const SolverConfig& config) {
  Scratch s;
  auto kernel = [&](std::span<const double> in, std::span<double> out) {
    favored_upper_kernel(balls, bias.p, in, out, s);
  };
  DriverResult r = drive(balls.space(), kernel, config, 0);
  return {{std::move(r.lower), ValueTag::kFavoredUpper, bias},
          std::move(r.report)};
}

}  // namespace btow

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

// Dynamic-programming operators for the epsilon-game and its favored
// variants, and the value-iteration solvers built on them.
//
// All sweeps are Jacobi updates: every vertex reads the previous field only,
// which keeps the operators exactly monotone and the results independent of
// the thread count.

#ifndef BTOW_HARMONIC_H_
#define BTOW_HARMONIC_H_

#include <span>
#include <string>
#include <vector>

#include "btow/bias.h"
#include "btow/metric_space.h"

namespace btow {

enum class ValueTag {
  kLower,         // u_I, iterated from below
  kUpper,         // u_II, iterated from above
  kFavoredLower,  // v, the II-favored game
  kFavoredUpper,  // w, the I-favored game
  kOracle,
  kCustom,
};

const char* to_string(ValueTag tag);

struct ValueField {
  std::vector<double> values;
  ValueTag tag = ValueTag::kCustom;
  GameBias bias;
};

enum class InitKind { kFromBelow, kFromAbove, kCustom };

struct SolverConfig {
  double tol = 1e-10;
  long max_sweeps = 1000000;
  // Iterate from min_Y F and max_Y F in lockstep and stop once both have
  // settled and their gap is below gap_factor * tol.
  bool two_sided = true;
  double gap_factor = 10.0;
  InitKind init = InitKind::kFromBelow;  // single-sided start
  std::vector<double> custom_init;       // used with InitKind::kCustom
  // Require eps >= min_step_ratio * h.
  double min_step_ratio = 4.0;
  BallClosure closure = BallClosure::kOpen;
  bool check_monotone = true;

  void validate() const;
};

struct SolveReport {
  long sweeps = 0;
  double residual = 0.0;  // sup-norm change of the last sweep
  double gap = 0.0;       // sup(upper - lower); NaN when single-sided
  // sup |T(u) - u| of the returned field, from one extra application.
  double dpp_residual = 0.0;
  // Both iterates stopped moving before their gap closed.
  bool stalled = false;
  std::vector<std::string> warnings;
};

// The epsilon-ball of a space together with the boundary data every
// favored-game sweep needs: min and max of F over Y within two steps.
class GameBalls {
 public:
  // Throws ValidationError when eps < min_step_ratio * h or some interior
  // ball is {x}.
  GameBalls(const DiscretizedSpace& space, double eps,
            BallClosure closure = BallClosure::kOpen,
            double min_step_ratio = 4.0);

  const DiscretizedSpace& space() const { return space_; }
  const BallIndex& ball() const { return ball_; }
  double eps() const { return ball_.radius(); }
  // min / max of F over Y within the two-step ball; +inf / -inf when empty.
  std::span<const double> boundary_min2() const { return min_f2_; }
  std::span<const double> boundary_max2() const { return max_f2_; }

 private:
  DiscretizedSpace space_;
  BallIndex ball_;
  std::vector<double> min_f2_;
  std::vector<double> max_f2_;
};

// One application of u -> p sup_B u + (1 - p) inf_B u on the interior,
// u = F on Y.
std::vector<double> dpp_step(const DiscretizedSpace& space,
                             const BallIndex& balls, const GameBias& bias,
                             std::span<const double> field);

// dpp_step plus eps^2 f(x) on the interior.
std::vector<double> running_payoff_step(const DiscretizedSpace& space,
                                        const BallIndex& balls,
                                        const GameBias& bias,
                                        std::span<const double> field,
                                        std::span<const double> f);

// II-favored sweep:
//   v(x) = max_{z in B(x)} [p min(v(z), min F on Y within 2 steps of z)
//                           + (1 - p) min_{B_2(z)} v]
std::vector<double> favored_lower_step(const GameBalls& balls,
                                       const GameBias& bias,
                                       std::span<const double> field);

// I-favored sweep:
//   w(x) = min_{z in B(x)} [p max_{B_2(z)} w
//                           + (1 - p) max(w(z), max F on Y within 2 of z)]
std::vector<double> favored_upper_step(const GameBalls& balls,
                                       const GameBias& bias,
                                       std::span<const double> field);

struct LocalVariation {
  std::vector<double> plus;   // sup_B u - u(x)
  std::vector<double> minus;  // u(x) - inf_B u
};

LocalVariation local_variation(const DiscretizedSpace& space,
                               const BallIndex& balls,
                               std::span<const double> field);

struct ValueSolution {
  ValueField lower;  // the reported game value
  ValueField upper;  // equal to lower when single-sided
  SolveReport report;

  const std::vector<double>& value() const { return lower.values; }
};

struct FavoredSolution {
  ValueField field;
  SolveReport report;
};

// Game value u^eps. running_payoff, when given, adds eps^2 f per step; it is
// then solved one-sided (from below for f > 0, from above for f < 0).
// Throws ConvergenceError past max_sweeps and ConsistencyError when a sweep
// breaks monotonicity.
ValueSolution solve_value(const DiscretizedSpace& space, const GameBias& bias,
                          const SolverConfig& config = {},
                          std::span<const double> running_payoff = {});
ValueSolution solve_value(const GameBalls& balls, const GameBias& bias,
                          const SolverConfig& config = {},
                          std::span<const double> running_payoff = {});

FavoredSolution solve_favored_lower(const DiscretizedSpace& space,
                                    const GameBias& bias,
                                    const SolverConfig& config = {});
FavoredSolution solve_favored_lower(const GameBalls& balls,
                                    const GameBias& bias,
                                    const SolverConfig& config = {});

FavoredSolution solve_favored_upper(const DiscretizedSpace& space,
                                    const GameBias& bias,
                                    const SolverConfig& config = {});
FavoredSolution solve_favored_upper(const GameBalls& balls,
                                    const GameBias& bias,
                                    const SolverConfig& config = {});

}  // namespace btow

#endif  // BTOW_HARMONIC_H_

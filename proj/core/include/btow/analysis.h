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

// Refinement experiments, sandwich and bound checks, and finite-difference
// residuals of Delta_inf u + beta |grad u| on lattice spaces.

#ifndef BTOW_ANALYSIS_H_
#define BTOW_ANALYSIS_H_

#include <span>
#include <string>
#include <vector>

#include "btow/bias.h"
#include "btow/families.h"
#include "btow/harmonic.h"
#include "btow/metric_space.h"

namespace btow {

enum class RefinementMode {
  kRefined,  // a fresh discretization per eps
  kFixed,    // every eps on the finest discretization
};

const char* to_string(RefinementMode mode);

struct ConvergenceConfig {
  double eps0 = 0.125;
  int depth = 4;  // number of levels, eps0 ... eps0 / 2^(depth-1)
  RefinementMode mode = RefinementMode::kRefined;
  SolverConfig solver;
  bool favored = true;  // also solve v and w
  // Allowed pointwise decrease of v (increase of w) between levels, in units
  // of M. Negative: 100 * tol.
  double monotone_slack = -1.0;
  // Throw PropertyViolation on a monotonicity failure.
  bool strict = false;
};

struct ConvergenceRow {
  double eps = 0.0;
  int vertices = 0;
  double ref_error = 0.0;  // sup |u - reference| on reference vertices
  double v_gap = 0.0;      // sup |v - u|
  double w_gap = 0.0;      // sup |w - u|
  // Versus the previous level on common vertices; true on the first row.
  bool v_monotone = true;
  bool w_monotone = true;
  double v_drop = 0.0;  // largest decrease of v, in units of M
  double w_rise = 0.0;  // largest increase of w, in units of M
  int v_witness = -1;   // vertex of this level
  int w_witness = -1;
  int common = 0;  // vertices shared with the previous level
  long sweeps = 0;
  double seconds = 0.0;
};

struct ConvergenceTable {
  std::string family;
  std::string reference;  // "oracle" or "finest"
  LogShape shape = LogShape::kUnknown;
  RefinementMode mode = RefinementMode::kRefined;
  bool check_v = false;  // v monotonicity is implied by the odds
  bool check_w = false;
  double oscillation = 0.0;
  std::vector<ConvergenceRow> rows;

  bool monotone_ok() const;
};

ConvergenceTable dyadic_convergence(const SpaceFamily& family,
                                    const OddsFunction& odds,
                                    const ConvergenceConfig& config);

struct SandwichReport {
  bool pass = true;
  double below = 0.0;  // max (v - candidate)
  double above = 0.0;  // max (candidate - w)
  double slack = 0.0;
  std::vector<int> witnesses;  // vertices outside [v - slack, w + slack]
  std::vector<double> v;
  std::vector<double> w;
};

// Solves v and w and checks v - slack <= candidate <= w + slack. Candidate
// must equal F on Y. Negative slack: 100 * tol.
SandwichReport sandwich_check(const GameBalls& balls, const GameBias& bias,
                              std::span<const double> candidate,
                              const SolverConfig& config = {},
                              double slack = -1.0);

struct ResidualConfig {
  double beta = 0.0;
  // Mask |grad u| below this. Negative: 1e-6 * M / diam.
  double grad_threshold = -1.0;
  int fd_cells = 1;     // difference step in lattice cells
  double margin = 0.0;  // skip points with dist(., Y) < margin
};

struct ResidualField {
  std::vector<double> phi;  // NaN where not evaluated
  std::vector<char> valid;
  double spacing = 0.0;     // inferred lattice spacing
  double fd_step = 0.0;
  int evaluated = 0;
  int masked_gradient = 0;  // stencil complete but |grad u| too small
  double max_abs = 0.0;
  int argmax = -1;
};

// Phi u = nu . D^2 u . nu + beta |grad u| with nu = grad u / |grad u|, by
// central differences on the coordinate lattice. Throws ValidationError
// without coords or with fewer than 3 lattice points along some axis.
ResidualField residual(const DiscretizedSpace& space,
                       std::span<const double> field,
                       const ResidualConfig& config);

struct BoundCheck {
  std::string name;
  bool applicable = true;
  std::string reason;  // why not applicable
  long pairs = 0;
  double worst_margin = 0.0;  // max over pairs of lhs - rhs
  int witness_x = -1;
  int witness_y = -1;
  double slack = 0.0;
  bool pass = true;
};

// Step-count distance of a game whose balls have the given closure: the
// open form eps + eps floor(d / eps), or eps ceil(d / eps) for closed balls.
double step_distance(double d, double eps, BallClosure closure);

// Pairs are exhaustive when the space has at most 2000 vertices; otherwise
// at most 256 evenly spaced boundary vertices are used as y.

// v(x) >= F(y) - (2 eps + d_eps(x, y)) Lip for all x and y in Y. Needs
// theta >= 0.
BoundCheck check_vbound(const DiscretizedSpace& space,
                        std::span<const double> v, const GameBias& bias,
                        BallClosure closure = BallClosure::kOpen,
                        double slack = 1e-8);

// u(x) <= F(y) + rho^(d_eps(X) / eps) eps Lip when d_eps(x, y) = eps. Needs
// rho >= 1.
BoundCheck check_ubound(const DiscretizedSpace& space,
                        std::span<const double> u, const GameBias& bias,
                        BallClosure closure = BallClosure::kOpen,
                        double slack = 1e-8);

// w(x) <= F(y) + sqrt(eta) (Lip + exp(4 beta sqrt(eta)) sup_Y F) for
// eta = d_eps(x, y) in [eps, 1) with at least one full step below
// sqrt(eta). Needs beta > 0, rho <= 1 + 2 beta eps and sup_Y F >= 0.
BoundCheck check_wbound(const DiscretizedSpace& space,
                        std::span<const double> w, const GameBias& bias,
                        double beta, BallClosure closure = BallClosure::kOpen,
                        double slack = 1e-8);

}  // namespace btow

#endif  // BTOW_ANALYSIS_H_

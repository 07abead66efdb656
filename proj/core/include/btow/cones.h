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

// Exponential cones C(r) = sgn(beta) A (1 - exp(-+beta r)) + B and the
// comparison-with-cones (CEC) certificate for value fields.

#ifndef BTOW_CONES_H_
#define BTOW_CONES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "btow/metric_space.h"

namespace btow {

enum class ConeSign { kPlus, kMinus };

struct ConeSpec {
  // Center vertex, or -1 for a held-out point given by center_point
  // (Euclidean distance; needs coords).
  int center = -1;
  std::vector<double> center_point;
  ConeSign sign = ConeSign::kPlus;
  double A = 0.0;  // >= 0
  double B = 0.0;
  double beta = 1.0;
};

// Value at distance r >= 0 from the center. For beta = 0 the cones are the
// linear limits B + A r (plus) and B - A r (minus).
double cone_eval(const ConeSpec& cone, double r);

// The cone of the given sign through (r1, val1) and (r2, val2). Throws
// ValidationError when that would need A < 0 (use the other sign).
ConeSpec fit_cone(double beta, ConeSign sign, double r1, double val1,
                  double r2, double val2);

// Distance of every vertex to the cone center.
std::vector<double> cone_distances(const DiscretizedSpace& space,
                                   const ConeSpec& cone);
std::vector<double> cone_field(const DiscretizedSpace& space,
                               const ConeSpec& cone);

enum class CecSide {
  kAbove,  // u <= cone on the boundary  =>  u <= cone inside
  kBelow,  // u >= cone on the boundary  =>  u >= cone inside
};

struct CecWitness {
  ConeSpec cone;
  int v_center = -1;     // V = interior vertices with d(v_center, .) < v_radius
  double v_radius = 0.0;
  int vertex = -1;       // where the violation is largest
  double violation = 0;  // u - cone (above) or cone - u (below)
  double slack = 0;
};

struct CecReport {
  bool pass = true;
  // Largest violation seen and largest excess over the allowed slack.
  double worst_violation = 0.0;
  double worst_excess = -1e300;
  int trials = 0;
  int hypothesis_not_met = 0;
  // Fraction of interior vertices inside at least one tested V.
  double coverage = 0.0;
  std::vector<CecWitness> witnesses;  // failing pairs, worst first
};

// One (V, cone) pair. V must be a nonempty set of interior vertices. The
// boundary of V' = V \ {center} is every vertex outside V' with a
// ball-neighbor in V'.
CecReport cec_check(const DiscretizedSpace& space, const BallIndex& balls,
                    std::span<const double> field, std::span<const int> V,
                    const ConeSpec& cone, CecSide side, double slack);

struct SlackRule {
  double c = 8.0;  // slack = c * eps * M / s
  double eps = 0.0;
};

// Randomized CEC certification; deterministic for a given seed.
CecReport cec_scan(const DiscretizedSpace& space, const BallIndex& balls,
                   std::span<const double> field, double beta, CecSide side,
                   int n_trials, std::uint64_t seed, const SlackRule& rule);

// max |u(x1) - u(x2)| / (d_eps(x1, x2) M / s) over interior pairs with
// min d(x_i, Y) > 2 eps, s = max d(x_i, Y). Exhaustive up to 2000 interior
// vertices, otherwise a seeded sample.
double lipschitz_check(const DiscretizedSpace& space,
                       std::span<const double> field, double eps,
                       std::uint64_t seed = 1);

std::string describe(const ConeSpec& cone);

}  // namespace btow

#endif  // BTOW_CONES_H_

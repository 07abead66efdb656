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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "btow/bias.h"
#include "btow/cones.h"
#include "btow/error.h"
#include "btow/generators.h"
#include "btow/harmonic.h"

namespace btow {
namespace {

TEST(ConeEval, Examples) {
  ConeSpec c;
  c.A = 1.0;
  c.B = 0.75;
  c.beta = 1.0;
  EXPECT_DOUBLE_EQ(cone_eval(c, 0.0), 0.75);
  c.B = 0.0;
  EXPECT_NEAR(cone_eval(c, std::log(2.0)), 0.5, 1e-15);
}

TEST(ConeEval, PlusConeStaysInRange) {
  ConeSpec c;
  c.A = 2.0;
  c.B = -1.0;
  c.beta = 3.0;
  for (double r = 0.0; r < 10.0; r += 0.1) {
    EXPECT_GE(cone_eval(c, r), c.B);
    EXPECT_LT(cone_eval(c, r), c.B + c.A);
  }
}

TEST(ConeEval, ZeroBetaIsLinear) {
  ConeSpec c;
  c.A = 2.0;
  c.B = 1.0;
  c.beta = 0.0;
  EXPECT_DOUBLE_EQ(cone_eval(c, 0.25), 1.5);
  c.sign = ConeSign::kMinus;
  EXPECT_DOUBLE_EQ(cone_eval(c, 0.25), 0.5);
}

TEST(FitCone, UnitCone) {
  const ConeSpec c = fit_cone(1.0, ConeSign::kPlus, 0.0, 0.0, 1.0, 1.0);
  EXPECT_NEAR(c.A, 1.0 / (1.0 - std::exp(-1.0)), 1e-14);
  EXPECT_NEAR(c.B, 0.0, 1e-15);
  for (double x : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(cone_eval(c, x), (1 - std::exp(-x)) / (1 - std::exp(-1.0)),
                1e-14);
  }
}

TEST(FitCone, FlatThroughEqualValues) {
  const ConeSpec c = fit_cone(2.0, ConeSign::kPlus, 0.2, 0.4, 0.9, 0.4);
  EXPECT_EQ(c.A, 0.0);
  EXPECT_DOUBLE_EQ(c.B, 0.4);
}

TEST(FitCone, MinusConeFromTheOtherEnd) {
  const ConeSpec minus = fit_cone(1.0, ConeSign::kMinus, 0.0, 1.0, 1.0, 0.0);
  const ConeSpec plus = fit_cone(1.0, ConeSign::kPlus, 0.0, 0.0, 1.0, 1.0);
  const double e = std::exp(1.0);
  for (double x : {0.0, 0.25, 0.5, 1.0}) {
    EXPECT_NEAR(cone_eval(minus, x), (e - std::exp(x)) / (e - 1), 1e-14);
    // Same curve as the plus cone seen from the opposite end.
    EXPECT_NEAR(cone_eval(minus, x), cone_eval(plus, 1 - x), 1e-14);
  }
}

TEST(FitCone, RejectsImpossibleSigns) {
  EXPECT_THROW(fit_cone(1.0, ConeSign::kPlus, 0.0, 1.0, 1.0, 0.0),
               ValidationError);
  EXPECT_THROW(fit_cone(1.0, ConeSign::kPlus, 0.5, 1.0, 0.5, 0.0),
               ValidationError);
}

struct Exact1D {
  DiscretizedSpace space = build_interval(32, 1.0, 0.0, 1.0);
  BallIndex balls = BallIndex::build(space, 1.0 / 32, BallClosure::kClosed);
  std::vector<double> u;

  explicit Exact1D(double beta) {
    SolverConfig c;
    c.tol = 1e-12;
    c.closure = BallClosure::kClosed;
    c.min_step_ratio = 1.0;
    u = solve_value(space, bias_for(OddsFunction::exponential(beta), 1.0 / 32),
                    c)
            .lower.values;
  }
};

TEST(CecCheck, ConeFieldPassesWithZeroViolation) {
  AnnulusSpec a;
  a.spacing = 1.0 / 24;
  const auto sp = build_annulus(a);
  const BallIndex b = BallIndex::build(sp, 0.2);
  ConeSpec cone;
  cone.center = 17;
  cone.A = 0.7;
  cone.B = 0.1;
  cone.beta = 1.5;
  const auto f = cone_field(sp, cone);
  std::vector<int> V(sp.interior().begin(), sp.interior().begin() + 40);
  for (CecSide side : {CecSide::kAbove, CecSide::kBelow}) {
    const CecReport r = cec_check(sp, b, f, V, cone, side, 0.0);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.worst_violation, 0.0);
  }
}

TEST(CecCheck, ExactSolutionPassesEverySampledCone) {
  const double beta = 1.0;
  const Exact1D ex(beta);
  std::mt19937 gen(11);
  int tested = 0;
  for (int t = 0; t < 400; ++t) {
    // Contiguous V = [a, b] inside (0, 32).
    int a = 1 + gen() % 30, b = 1 + gen() % 30;
    if (a > b) std::swap(a, b);
    std::vector<int> V;
    for (int x = a; x <= b; ++x) V.push_back(x);
    ConeSpec cone;
    cone.beta = beta;
    cone.center = gen() % 33;
    cone.sign = gen() % 2 ? ConeSign::kPlus : ConeSign::kMinus;
    cone.A = std::pow(10.0, -2.0 + 4.0 * (gen() % 1000) / 1000.0);
    const auto d = cone_distances(ex.space, cone);
    for (CecSide side : {CecSide::kAbove, CecSide::kBelow}) {
      const double dir = side == CecSide::kAbove ? 1.0 : -1.0;
      // Tight on the ball boundary of V minus the center.
      ConeSpec c = cone;
      double shift = -1e300;
      for (int y : {a - 1, b + 1, cone.center}) {
        if (y < 0 || y > 32) continue;
        c.B = 0.0;
        shift = std::max(shift, dir * (ex.u[y] - cone_eval(c, d[y])));
      }
      c.B = dir * shift;
      const CecReport r = cec_check(ex.space, ex.balls, ex.u, V, c, side, 1e-10);
      EXPECT_EQ(r.hypothesis_not_met, 0);
      EXPECT_TRUE(r.pass) << "V [" << a << ", " << b << "] center "
                          << cone.center << " violation " << r.worst_violation;
      ++tested;
    }
  }
  EXPECT_EQ(tested, 800);
}

TEST(CecScan, ConstantFieldPassesWithoutSlack) {
  const auto sp = build_interval(40, 1.0, 0.3, 0.3);
  const BallIndex b = BallIndex::build(sp, 0.1);
  const std::vector<double> f(sp.size(), 0.3);
  for (CecSide side : {CecSide::kAbove, CecSide::kBelow}) {
    EXPECT_TRUE(cec_scan(sp, b, f, 1.0, side, 200, 5, {0.0, 0.1}).pass);
  }
}

TEST(CecScan, DeterministicForASeed) {
  const Exact1D ex(2.0);
  const auto a = cec_scan(ex.space, ex.balls, ex.u, 2.0, CecSide::kAbove, 100,
                          9, {8.0, 1.0 / 32});
  const auto b = cec_scan(ex.space, ex.balls, ex.u, 2.0, CecSide::kAbove, 100,
                          9, {8.0, 1.0 / 32});
  EXPECT_EQ(a.worst_violation, b.worst_violation);
  EXPECT_EQ(a.worst_excess, b.worst_excess);
  EXPECT_EQ(a.coverage, b.coverage);
}

TEST(CecScan, SolvedFieldsPassWithEpsSlack) {
  GridSpec g;
  g.nx = 33;
  g.ny = 17;
  g.spacing = 1.0 / 32;
  g.boundary_value = [](double x, double y) { return x * y + x; };
  const auto sp = build_grid_domain(g);
  for (double eps : {0.25, 0.125}) {
    const GameBalls balls(sp, eps, BallClosure::kClosed, 1.0);
    SolverConfig c;
    c.closure = BallClosure::kClosed;
    c.min_step_ratio = 1.0;
    const auto u = solve_value(balls, bias_for(OddsFunction::exponential(1.0), eps), c);
    for (CecSide side : {CecSide::kAbove, CecSide::kBelow}) {
      const auto r = cec_scan(sp, balls.ball(), u.value(), 1.0, side, 300, 1,
                              {8.0, eps});
      EXPECT_TRUE(r.pass) << "eps " << eps;
      EXPECT_GT(r.coverage, 0.5);
    }
  }
}

TEST(CecScan, BumpAtOneVertexIsCaught) {
  const Exact1D ex(1.0);
  const int peak = 16;
  // The largest slack a trial can use has s = the smallest dist(x, Y).
  const double slack = 8.0 * (1.0 / 32) * 1.0 / (1.0 / 32);
  std::vector<double> f = ex.u;
  f[peak] += 10 * slack;
  const auto r = cec_scan(ex.space, ex.balls, f, 1.0, CecSide::kAbove, 300, 3,
                          {8.0, 1.0 / 32});
  ASSERT_FALSE(r.pass);
  EXPECT_EQ(r.witnesses.front().vertex, peak);
  EXPECT_GT(r.witnesses.front().violation, r.witnesses.front().slack);
}

TEST(Lipschitz, ConstantFieldIsZero) {
  const auto sp = build_interval(32, 1.0, 1.0, 1.0);
  EXPECT_EQ(lipschitz_check(sp, std::vector<double>(sp.size(), 1.0), 0.125),
            0.0);
}

TEST(Lipschitz, StableAcrossEpsAndFlagsJumps) {
  std::vector<double> ratios;
  for (int n : {8, 16, 32}) {
    const auto sp = build_interval(n, 1.0, 0.0, 1.0);
    SolverConfig c;
    c.closure = BallClosure::kClosed;
    c.min_step_ratio = 1.0;
    const auto u = solve_value(sp, bias_for(OddsFunction::exponential(1.0), 1.0 / n), c);
    ratios.push_back(lipschitz_check(sp, u.value(), 1.0 / n));
    if (n == 32) {
      std::vector<double> jump = u.value();
      for (int j = 16; j <= n - 1; ++j) jump[j] += 0.5;
      EXPECT_GT(lipschitz_check(sp, jump, 1.0 / n), 5 * ratios.back());
    }
  }
  // Few pairs qualify at eps = 1/8, so only a uniform bound is expected.
  for (double r : ratios) {
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, 1.0);
  }
  EXPECT_LT(ratios[2], 1.25 * ratios[1]);
}

}  // namespace
}  // namespace btow

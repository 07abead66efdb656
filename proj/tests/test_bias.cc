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
#include <cstdio>
#include <fstream>
#include <string>

#include "btow/bias.h"
#include "btow/error.h"

namespace btow {
namespace {

TEST(Theta0, UnbiasedIsZero) {
  for (double eps : {0.01, 0.3, 2.0}) EXPECT_EQ(theta0(0.0, eps), 0.0);
}

TEST(Theta0, BothClosedForms) {
  EXPECT_DOUBLE_EQ(theta0(1.0, 0.1), std::tanh(0.05));
  for (int k = 0; k < 100; ++k) {
    const double eps = 0.01 + 0.05 * k, beta = 1.7;
    const double e = std::exp(beta * eps);
    EXPECT_NEAR(theta0(beta, eps), (e - 1) / (e + 1), 1e-15);
  }
}

TEST(Theta0, SeriesRemainderIsFifthOrder) {
  const double beta = 1.0;
  double prev = 0.0;
  for (double eps : {0.1, 0.05, 0.025}) {
    const double x = beta * eps;
    const double third = theta0(beta, eps) - x / 2;
    EXPECT_NEAR(third / (x * x * x), -1.0 / 24, 0.01 * x);
    const double fifth = std::abs(third + x * x * x / 24);
    if (prev > 0) {
      EXPECT_LT(fifth, prev / 20);  // 2^5 = 32 per halving
    }
    prev = fifth;
  }
}

TEST(Theta0, BelowLinearTheta) {
  for (double beta : {0.5, 1.0, 3.0}) {
    for (double eps : {0.01, 0.1, 0.5}) {
      EXPECT_LE(theta0(beta, eps), beta * eps / 2);
      EXPECT_DOUBLE_EQ(OddsFunction::linear_theta(beta).theta(eps),
                       beta * eps / 2);
    }
  }
}

TEST(RhoTheta, RoundTrip) {
  for (int k = -99; k <= 99; ++k) {
    const double theta = k / 100.0;
    EXPECT_NEAR(theta_from_rho(rho_from_theta(theta)), theta, 1e-12);
  }
  EXPECT_TRUE(std::isinf(rho_from_theta(1.0)));
  EXPECT_TRUE(std::isinf(bias_for(OddsFunction::constant_theta(1.0), 0.1).rho));
}

TEST(Odds, ExponentialAtLogThree) {
  const GameBias b = bias_for(OddsFunction::exponential(1.0), std::log(3.0));
  EXPECT_NEAR(b.rho, 3.0, 1e-14);
  EXPECT_NEAR(b.theta, 0.5, 1e-15);
  EXPECT_NEAR(b.p, 0.75, 1e-15);
}

TEST(Odds, LinearTheta) {
  const GameBias b = bias_for(OddsFunction::linear_theta(2.0), 0.1);
  EXPECT_NEAR(b.theta, 0.1, 1e-15);
  EXPECT_NEAR(b.rho, 11.0 / 9.0, 1e-14);
}

TEST(Odds, ExponentialSquaresUnderDoubling) {
  const auto o = OddsFunction::exponential(1.3);
  for (double eps : {0.01, 0.1, 0.4}) {
    EXPECT_NEAR(o.rho(eps) * o.rho(eps), o.rho(2 * eps), 1e-13);
  }
}

TEST(Odds, ConstantTheta) {
  const auto o = OddsFunction::constant_theta(0.2);
  EXPECT_DOUBLE_EQ(o.theta(0.01), 0.2);
  EXPECT_DOUBLE_EQ(o.theta(1.0), 0.2);
  EXPECT_THROW(OddsFunction::constant_theta(1.2), ValidationError);
}

TEST(LogShape, Families) {
  EXPECT_EQ(log_shape(OddsFunction::exponential(1.0)), LogShape::kLinear);
  EXPECT_EQ(log_shape(OddsFunction::linear_theta(1.0)), LogShape::kConvex);
  EXPECT_EQ(log_shape(OddsFunction::constant_theta(0.3)), LogShape::kLinear);
}

TEST(LogShape, LinearThetaSecondDifferenceIsPositive) {
  const auto o = OddsFunction::linear_theta(1.0);
  const double h = 1e-3;
  for (double eps : {0.1, 0.5, 1.0}) {
    const double d2 =
        o.log_rho(eps + h) - 2 * o.log_rho(eps) + o.log_rho(eps - h);
    EXPECT_GT(d2, 0.0);
  }
}

TEST(CustomTable, InterpolatesAndKeepsConcavity) {
  // log rho = 2 eps - eps^2 is concave.
  auto lr = [](double e) { return 2 * e - e * e; };
  std::vector<double> eps, rho;
  for (int i = 0; i <= 10; ++i) {
    eps.push_back(0.05 * i);
    rho.push_back(std::exp(lr(0.05 * i)));
  }
  const auto o = OddsFunction::custom(eps, rho);
  EXPECT_NEAR(o.rho(0.2), std::exp(lr(0.2)), 1e-12);
  EXPECT_NEAR(o.log_rho(0.125), lr(0.125), 1e-3);
  EXPECT_EQ(log_shape(o), LogShape::kConcave);
  EXPECT_THROW(OddsFunction::custom({0.1}, {1.1}), ValidationError);
  EXPECT_THROW(OddsFunction::custom({0.2, 0.1}, {1.1, 1.2}), ValidationError);
}

TEST(CustomTable, LoadsFromFile) {
  const std::string path = ::testing::TempDir() + "odds_table.csv";
  {
    std::ofstream f(path);
    f.precision(17);
    f << "eps,rho\n# linear in log\n0.0,1\n0.5,"
      << std::exp(0.5) << "\n1.0," << std::exp(1.0) << "\n";
  }
  const auto o = OddsFunction::load_table(path);
  EXPECT_EQ(o.family(), OddsFamily::kCustom);
  EXPECT_NEAR(o.rho(0.25), std::exp(0.25), 1e-12);
  std::remove(path.c_str());
  EXPECT_THROW(OddsFunction::load_table(path), ValidationError);
}

TEST(Bias, RejectsNonPositiveEps) {
  EXPECT_THROW(bias_for(OddsFunction::exponential(1.0), 0.0), ValidationError);
  EXPECT_THROW(GameBias::from_theta(0.1, 1.5), ValidationError);
}

TEST(Bias, NegativeBetaSwapsRoles) {
  const GameBias plus = bias_for(OddsFunction::exponential(1.0), 0.2);
  const GameBias minus = bias_for(OddsFunction::exponential(-1.0), 0.2);
  EXPECT_NEAR(plus.p + minus.p, 1.0, 1e-15);
  EXPECT_NEAR(plus.rho * minus.rho, 1.0, 1e-14);
}

}  // namespace
}  // namespace btow
